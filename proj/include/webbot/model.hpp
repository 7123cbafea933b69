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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "webbot/distfit.hpp"
#include "webbot/ingest.hpp"
#include "webbot/log_model.hpp"
#include "webbot/resource_model.hpp"

namespace webbot {

inline constexpr const char* kModelSchema = "webbot.model/1";
inline constexpr const char* kToolVersion = "0.1.0";

struct FitConfig {
  double session_timeout = kDefaultSessionTimeout;
  AgentMode agent_mode = AgentMode::UserAgentAndIp;
  PriorConfig prior;
  std::optional<std::uint64_t> pool_size_override;
};

/// Bookkeeping from the fit, kept with the model for provenance.
struct FitDiagnostics {
  std::uint64_t num_requests = 0;
  std::uint64_t num_sessions = 0;
  double observation_window = 0.0;
  std::uint64_t num_gaps = 0;
  std::uint64_t zero_gaps_excluded = 0;
};

struct FittedModel {
  ExponentialParams arrival;     // session inter-arrival rate
  ZetaParams session_length;
  LognormalParams request_gap;   // intra-session gaps
  std::vector<AgentId> robots;
  CategoricalParams rho;         // robot selection weights
  PathModel paths;
  std::uint64_t pool_size = 1;
  FitConfig config;
  FitDiagnostics diagnostics;

  /// Throws Error(InvalidModel) naming the first violated invariant.
  void validate() const;
};

/// Fits every block of the model from robot requests. Requests need not be
/// sorted.
FittedModel fit_model(std::vector<Request> requests, const FitConfig& config);

std::string to_json(const FittedModel& model);
FittedModel model_from_json(const std::string& text);

}  // namespace webbot
