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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "webbot/distfit.hpp"
#include "webbot/log_model.hpp"
#include "webbot/model.hpp"
#include "webbot/rng.hpp"

namespace webbot {

/// Request-weighted mean number of sessions whose [start, end] covers each
/// observed request, rounded, at least 1.
std::uint64_t estimate_pool_size(std::span<const Session> sessions);

/// Draws an inactive robot with probability rho_i renormalised over the
/// inactive set.
std::size_t draw_robot(Rng& rng, const CategoricalParams& rho, const std::vector<bool>& active);

inline constexpr std::uint64_t kDefaultMaxSessionLength = 1'000'000;

struct ActiveSession {
  std::size_t robot = 0;
  std::uint64_t session_id = 0;
  double start_time = 0.0;
  std::uint64_t target_length = 1;
  std::uint64_t emitted = 0;
  double next_request_time = 0.0;
  bool length_capped = false;
};

/// Next session on the global arrival clock: start = prev_arrival + Exp(lambda),
/// length ~ Zeta(s) (capped at max_length), robot from the inactive pool.
ActiveSession next_session(Rng& rng, const FittedModel& model, double prev_arrival,
                           const std::vector<bool>& active,
                           std::uint64_t max_length = kDefaultMaxSessionLength);

class StopCondition {
 public:
  enum class Kind { RequestCount, TimeHorizon };

  static StopCondition request_count(std::uint64_t count);
  static StopCondition time_horizon(double end_time);

  Kind kind() const { return kind_; }
  std::uint64_t count() const { return count_; }
  double end_time() const { return end_time_; }

 private:
  StopCondition(Kind kind, std::uint64_t count, double end_time)
      : kind_(kind), count_(count), end_time_(end_time) {}

  Kind kind_;
  std::uint64_t count_;
  double end_time_;
};

struct GeneratedRequest {
  double time = 0.0;
  std::size_t robot = 0;
  std::uint64_t session_id = 0;
  std::string path;
};

struct GeneratedTrace {
  std::vector<GeneratedRequest> requests;
  std::vector<AgentId> robots;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> truncated_sessions;  // in flight when the run stopped
  std::uint64_t sessions_started = 0;
  std::uint64_t capped_sessions = 0;

  Trace to_trace() const;
};

struct GeneratorOptions {
  std::uint64_t max_session_length = kDefaultMaxSessionLength;
};

/// Event-driven generator holding N active sessions. Each step() emits the
/// request of the active session with the earliest next request time.
class TrafficGenerator {
 public:
  TrafficGenerator(const FittedModel& model, StopCondition stop, std::uint64_t seed,
                   GeneratorOptions options = {});

  /// Next request, or nullopt once the stop condition is reached.
  std::optional<GeneratedRequest> step();

  bool done() const { return done_; }
  std::size_t active_count() const { return queue_.size(); }
  const std::vector<bool>& active_robots() const { return active_; }
  std::vector<ActiveSession> active_sessions() const;
  std::uint64_t emitted() const { return emitted_; }
  std::uint64_t sessions_started() const { return next_session_id_; }
  std::uint64_t capped_sessions() const { return capped_; }

  GeneratedTrace run();

 private:
  struct Later {
    bool operator()(const ActiveSession& a, const ActiveSession& b) const;
  };

  void admit(double not_before);

  const FittedModel& model_;
  StopCondition stop_;
  std::uint64_t seed_;
  GeneratorOptions options_;
  Rng session_rng_;
  Rng gap_rng_;
  Rng path_rng_;
  std::priority_queue<ActiveSession, std::vector<ActiveSession>, Later> queue_;
  std::vector<bool> active_;
  double arrival_clock_ = 0.0;
  std::uint64_t next_session_id_ = 0;
  std::uint64_t emitted_ = 0;
  std::uint64_t capped_ = 0;
  bool done_ = false;
};

GeneratedTrace generate(const FittedModel& model, StopCondition stop, std::uint64_t seed,
                        GeneratorOptions options = {});

}  // namespace webbot
