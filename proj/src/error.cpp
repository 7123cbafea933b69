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

#include "webbot/error.hpp"

namespace webbot {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::BadTimestamp: return "BadTimestamp";
    case ErrorKind::BadStatus: return "BadStatus";
    case ErrorKind::NonPositiveTimeout: return "NonPositiveTimeout";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonPositiveSample: return "NonPositiveSample";
    case ErrorKind::NonPositiveDuration: return "NonPositiveDuration";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::AllOnes: return "AllOnes";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::EmptyCatalog: return "EmptyCatalog";
    case ErrorKind::UnknownSubdirectory: return "UnknownSubdirectory";
    case ErrorKind::ZeroGlobalCounts: return "ZeroGlobalCounts";
    case ErrorKind::InconsistentCounts: return "InconsistentCounts";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoInactiveRobot: return "NoInactiveRobot";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidStopCondition: return "InvalidStopCondition";
    case ErrorKind::NonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorKind::BadCapacityGrid: return "BadCapacityGrid";
    case ErrorKind::TooFewSessions: return "TooFewSessions";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace webbot
