/*
 * Copyright (c) The webbot Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace webbot {

enum class ErrorKind {
  // ingest
  MalformedLine,
  BadTimestamp,
  BadStatus,
  NonPositiveTimeout,
  // distfit
  EmptySample,
  TooFewSamples,
  NonPositiveSample,
  NonPositiveDuration,
  DomainError,
  AllOnes,
  InvalidParams,
  // resource_model
  EmptyTrace,
  EmptyCatalog,
  UnknownSubdirectory,
  ZeroGlobalCounts,
  InconsistentCounts,
  // generator
  EmptyInput,
  NoInactiveRobot,
  InvalidModel,
  InvalidStopCondition,
  // cache_sim
  NonPositiveCapacity,
  BadCapacityGrid,
  // evalcmp
  TooFewSessions,
  // io
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to a stage and exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace webbot
