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

namespace webbot {

/// One parsed access-log record.
struct RawLogEntry {
  std::string ip;
  double timestamp = 0.0;  // UTC epoch seconds
  std::string method;
  std::string path;
  std::string http_version;
  int status = 0;
  std::optional<std::uint64_t> response_size;
  std::optional<std::string> referrer;
  std::optional<std::string> user_agent;
};

enum class AgentMode { UserAgent, Ip, UserAgentAndIp };

std::string to_string(AgentMode mode);
AgentMode parse_agent_mode(const std::string& text);

/// Identity of a requesting agent. Both fields are kept when known; the mode
/// decides which of them take part in comparisons.
class AgentId {
 public:
  AgentId() = default;
  AgentId(std::optional<std::string> user_agent, std::optional<std::string> ip,
          AgentMode mode = AgentMode::UserAgentAndIp);

  /// An opaque identity, e.g. the robot label read back from a generated trace.
  static AgentId from_label(std::string label);

  const std::optional<std::string>& user_agent() const { return user_agent_; }
  const std::optional<std::string>& ip() const { return ip_; }
  AgentMode mode() const { return mode_; }

  /// Canonical key over the mode-selected fields.
  const std::string& key() const { return key_; }

  friend bool operator==(const AgentId& a, const AgentId& b) { return a.key_ == b.key_; }
  friend auto operator<=>(const AgentId& a, const AgentId& b) { return a.key_ <=> b.key_; }

 private:
  std::optional<std::string> user_agent_;
  std::optional<std::string> ip_;
  AgentMode mode_ = AgentMode::UserAgentAndIp;
  std::string key_;
};

struct AgentIdHash {
  std::size_t operator()(const AgentId& id) const noexcept;
};

struct Request {
  AgentId agent;
  double time = 0.0;
  std::string path;
};

/// S = (A, t0, k) together with the requests that realised it.
struct Session {
  AgentId agent;
  double start_time = 0.0;
  std::uint64_t length = 0;
  std::vector<Request> requests;

  double end_time() const { return requests.empty() ? start_time : requests.back().time; }
};

enum class TraceOrigin { Observed, Generated };

struct Trace {
  std::vector<Request> requests;  // nondecreasing in time
  TraceOrigin origin = TraceOrigin::Observed;
};

/// Stable-sorts by time; ties keep their input order.
void sort_by_time(std::vector<Request>& requests);

}  // namespace webbot
