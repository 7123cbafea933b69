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

#include "webbot/log_model.hpp"

#include <algorithm>
#include <functional>
#include <utility>

#include "webbot/error.hpp"

namespace webbot {

std::string to_string(AgentMode mode) {
  switch (mode) {
    case AgentMode::UserAgent: return "ua";
    case AgentMode::Ip: return "ip";
    case AgentMode::UserAgentAndIp: return "ua+ip";
  }
  return "ua+ip";
}

AgentMode parse_agent_mode(const std::string& text) {
  if (text == "ua") return AgentMode::UserAgent;
  if (text == "ip") return AgentMode::Ip;
  if (text == "ua+ip") return AgentMode::UserAgentAndIp;
  fail(ErrorKind::InvalidParams, "unknown agent-id mode '" + text + "' (expected ua, ip or ua+ip)");
}

AgentId::AgentId(std::optional<std::string> user_agent, std::optional<std::string> ip,
                 AgentMode mode)
    : user_agent_(std::move(user_agent)), ip_(std::move(ip)), mode_(mode) {
  if (!user_agent_ && !ip_) {
    fail(ErrorKind::InvalidParams, "agent id needs a user agent or an ip");
  }
  // Absent and empty fields differ: prefix each present field with a marker.
  auto field = [](const std::optional<std::string>& value) {
    return value ? "+" + *value : std::string("-");
  };
  switch (mode_) {
    case AgentMode::UserAgent: key_ = field(user_agent_); break;
    case AgentMode::Ip: key_ = field(ip_); break;
    case AgentMode::UserAgentAndIp: key_ = field(user_agent_) + '\x1f' + field(ip_); break;
  }
}

AgentId AgentId::from_label(std::string label) {
  return AgentId(std::move(label), std::nullopt, AgentMode::UserAgent);
}

std::size_t AgentIdHash::operator()(const AgentId& id) const noexcept {
  return std::hash<std::string>{}(id.key());
}

void sort_by_time(std::vector<Request>& requests) {
  std::stable_sort(requests.begin(), requests.end(),
                   [](const Request& a, const Request& b) { return a.time < b.time; });
}

}  // namespace webbot
