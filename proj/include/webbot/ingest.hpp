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
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "webbot/log_model.hpp"

namespace webbot {

enum class LogFormat { Common, Combined };

LogFormat parse_log_format(const std::string& text);

/// Parses one NCSA Common or Combined record (no trailing newline). Dashes map
/// to absent optionals and the timestamp is normalised to UTC.
RawLogEntry parse_log_line(std::string_view line, LogFormat format);

/// Case-insensitive substrings identifying robot User-Agents.
class UserAgentDatabase {
 public:
  explicit UserAgentDatabase(std::vector<std::string> patterns);

  /// One pattern per line; blank lines and lines starting with '#' are skipped.
  static UserAgentDatabase parse(std::string_view text);

  bool matches(std::string_view user_agent) const;
  const std::vector<std::string>& patterns() const { return patterns_; }

 private:
  std::vector<std::string> patterns_;  // lower-cased
};

std::vector<RawLogEntry> filter_robots(std::span<const RawLogEntry> entries,
                                       const UserAgentDatabase& db);

/// Strips any query string or fragment and reduces absolute URIs to their path.
std::string normalize_path(std::string_view path);

std::vector<Request> to_requests(std::span<const RawLogEntry> entries, AgentMode mode);

inline constexpr double kDefaultSessionTimeout = 1800.0;
inline constexpr double kNoTimeout = std::numeric_limits<double>::infinity();

/// Groups requests per agent and splits wherever consecutive requests are more
/// than timeout seconds apart. Sessions come back ordered by start time, then
/// agent key.
std::vector<Session> sessionize(std::span<const Request> requests, double timeout);

struct SummaryStats {
  std::uint64_t num_requests = 0;
  std::uint64_t num_sessions = 0;
  std::uint64_t num_agents = 0;
  std::uint64_t num_ips = 0;
  std::uint64_t num_resources = 0;
  double avg_session_length = 0.0;
};

double average_session_length(std::uint64_t num_requests, std::uint64_t num_sessions);

SummaryStats summarize(std::span<const Session> sessions);

std::string to_json(const SummaryStats& stats);

}  // namespace webbot
