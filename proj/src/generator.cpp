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

#include "webbot/generator.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "webbot/error.hpp"

namespace webbot {

std::uint64_t estimate_pool_size(std::span<const Session> sessions) {
  if (sessions.empty()) fail(ErrorKind::EmptyInput, "pool size needs at least one session");
  std::vector<double> starts, ends, times;
  for (const auto& session : sessions) {
    starts.push_back(session.start_time);
    ends.push_back(session.end_time());
    for (const auto& request : session.requests) times.push_back(request.time);
  }
  if (times.empty()) fail(ErrorKind::EmptyInput, "pool size needs at least one request");
  std::sort(starts.begin(), starts.end());
  std::sort(ends.begin(), ends.end());
  std::sort(times.begin(), times.end());

  // Sessions covering t: started at or before t, not ended before t.
  double total = 0.0;
  std::size_t started = 0, ended = 0;
  for (double t : times) {
    while (started < starts.size() && starts[started] <= t) ++started;
    while (ended < ends.size() && ends[ended] < t) ++ended;
    total += static_cast<double>(started - ended);
  }
  const auto mean = std::llround(total / static_cast<double>(times.size()));
  return static_cast<std::uint64_t>(std::max<long long>(1, mean));
}

std::size_t draw_robot(Rng& rng, const CategoricalParams& rho, const std::vector<bool>& active) {
  double total = 0.0;
  std::size_t inactive = 0;
  for (std::size_t i = 0; i < rho.probs.size(); ++i) {
    if (i < active.size() && active[i]) continue;
    total += rho.probs[i];
    ++inactive;
  }
  if (inactive == 0) fail(ErrorKind::NoInactiveRobot, "every robot already has an active session");

  const bool uniform = !(total > 0.0);
  const double u = rng.uniform() * (uniform ? static_cast<double>(inactive) : total);
  double cumulative = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < rho.probs.size(); ++i) {
    if (i < active.size() && active[i]) continue;
    const double weight = uniform ? 1.0 : rho.probs[i];
    if (weight <= 0.0) continue;
    cumulative += weight;
    last = i;
    if (u < cumulative) return i;
  }
  return last;
}

ActiveSession next_session(Rng& rng, const FittedModel& model, double prev_arrival,
                           const std::vector<bool>& active, std::uint64_t max_length) {
  ActiveSession session;
  session.start_time = prev_arrival + sample_exponential(rng, model.arrival);
  session.next_request_time = session.start_time;
  const std::uint64_t length = sample_zeta(rng, model.session_length);
  session.length_capped = length > max_length;
  session.target_length = std::min(length, max_length);
  session.robot = draw_robot(rng, model.rho, active);
  return session;
}

StopCondition StopCondition::request_count(std::uint64_t count) {
  if (count < 1) fail(ErrorKind::InvalidStopCondition, "request count must be at least 1");
  return StopCondition(Kind::RequestCount, count, 0.0);
}

StopCondition StopCondition::time_horizon(double end_time) {
  if (!(end_time > 0.0)) fail(ErrorKind::InvalidStopCondition, "time horizon must be positive");
  return StopCondition(Kind::TimeHorizon, 0, end_time);
}

Trace GeneratedTrace::to_trace() const {
  Trace trace;
  trace.origin = TraceOrigin::Generated;
  trace.requests.reserve(requests.size());
  for (const auto& request : requests) {
    trace.requests.push_back(Request{robots.at(request.robot), request.time, request.path});
  }
  return trace;
}

bool TrafficGenerator::Later::operator()(const ActiveSession& a, const ActiveSession& b) const {
  return std::tie(a.next_request_time, a.robot, a.session_id) >
         std::tie(b.next_request_time, b.robot, b.session_id);
}

TrafficGenerator::TrafficGenerator(const FittedModel& model, StopCondition stop, std::uint64_t seed,
                                   GeneratorOptions options)
    : model_(model),
      stop_(stop),
      seed_(seed),
      options_(options),
      session_rng_(Rng(seed).derive(1)),
      gap_rng_(Rng(seed).derive(2)),
      path_rng_(Rng(seed).derive(3)) {
  model_.validate();
  if (options_.max_session_length < 1) {
    fail(ErrorKind::InvalidParams, "maximum session length must be at least 1");
  }
  active_.assign(model_.robots.size(), false);
  for (std::uint64_t i = 0; i < model_.pool_size; ++i) admit(0.0);
}

void TrafficGenerator::admit(double not_before) {
  ActiveSession session =
      next_session(session_rng_, model_, arrival_clock_, active_, options_.max_session_length);
  arrival_clock_ = session.start_time;
  session.start_time = std::max(session.start_time, not_before);
  session.next_request_time = session.start_time;
  session.session_id = next_session_id_++;
  if (session.length_capped) ++capped_;
  active_[session.robot] = true;
  queue_.push(session);
}

std::optional<GeneratedRequest> TrafficGenerator::step() {
  if (done_) return std::nullopt;
  if (stop_.kind() == StopCondition::Kind::TimeHorizon &&
      queue_.top().next_request_time > stop_.end_time()) {
    done_ = true;
    return std::nullopt;
  }

  ActiveSession session = queue_.top();
  queue_.pop();
  GeneratedRequest request{session.next_request_time, session.robot, session.session_id,
                           model_.paths.sample_request_path(path_rng_, session.robot)};
  ++emitted_;
  ++session.emitted;
  if (session.emitted < session.target_length) {
    session.next_request_time += sample_lognormal(gap_rng_, model_.request_gap);
    queue_.push(session);
  } else {
    active_[session.robot] = false;
    admit(request.time);
  }
  if (stop_.kind() == StopCondition::Kind::RequestCount && emitted_ >= stop_.count()) done_ = true;
  return request;
}

std::vector<ActiveSession> TrafficGenerator::active_sessions() const {
  auto copy = queue_;
  std::vector<ActiveSession> sessions;
  while (!copy.empty()) {
    sessions.push_back(copy.top());
    copy.pop();
  }
  return sessions;
}

GeneratedTrace TrafficGenerator::run() {
  GeneratedTrace trace;
  trace.robots = model_.robots;
  trace.seed = seed_;
  if (stop_.kind() == StopCondition::Kind::RequestCount) trace.requests.reserve(stop_.count());
  while (auto request = step()) trace.requests.push_back(std::move(*request));
  for (const auto& session : active_sessions()) {
    if (session.emitted > 0 && session.emitted < session.target_length) {
      trace.truncated_sessions.push_back(session.session_id);
    }
  }
  std::sort(trace.truncated_sessions.begin(), trace.truncated_sessions.end());
  trace.sessions_started = next_session_id_;
  trace.capped_sessions = capped_;
  return trace;
}

GeneratedTrace generate(const FittedModel& model, StopCondition stop, std::uint64_t seed,
                        GeneratorOptions options) {
  TrafficGenerator generator(model, stop, seed, options);
  return generator.run();
}

}  // namespace webbot
