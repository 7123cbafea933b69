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

#include "webbot/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>
#include <unordered_map>
#include <utility>

#include "json.hpp"

#include "webbot/error.hpp"

namespace webbot {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Cursor over one log record.
class LineReader {
 public:
  explicit LineReader(std::string_view line) : line_(line) {}

  bool at_end() const { return pos_ >= line_.size(); }

  void skip_spaces() {
    while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
  }

  std::string_view token() {
    skip_spaces();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
    if (start == pos_) malformed("missing field");
    return line_.substr(start, pos_ - start);
  }

  std::string_view bracketed() {
    skip_spaces();
    if (pos_ >= line_.size() || line_[pos_] != '[') malformed("expected '['");
    const std::size_t close = line_.find(']', pos_);
    if (close == std::string_view::npos) malformed("unterminated '['");
    std::string_view inner = line_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    return inner;
  }

  /// Quoted field with backslash escapes.
  std::string quoted() {
    skip_spaces();
    if (pos_ >= line_.size() || line_[pos_] != '"') malformed("expected '\"'");
    ++pos_;
    std::string out;
    while (pos_ < line_.size()) {
      const char c = line_[pos_++];
      if (c == '\\' && pos_ < line_.size()) {
        out.push_back(line_[pos_++]);
      } else if (c == '"') {
        return out;
      } else {
        out.push_back(c);
      }
    }
    malformed("unterminated quoted field");
  }

  [[noreturn]] void malformed(const std::string& why) const {
    fail(ErrorKind::MalformedLine, "malformed log line (" + why + "): " + std::string(line_));
  }

 private:
  std::string_view line_;
  std::size_t pos_ = 0;
};

template <typename T>
bool parse_int(std::string_view text, T& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

int month_index(std::string_view name) {
  static constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
  const std::string key = lower(name);
  for (int i = 0; i < 12; ++i) {
    if (kMonths[i] == key) return i + 1;
  }
  return 0;
}

/// "10/Oct/2000:13:55:36 -0700" -> UTC epoch seconds.
double parse_log_timestamp(std::string_view text) {
  auto bad = [&]() -> double {
    fail(ErrorKind::BadTimestamp, "undecodable timestamp: " + std::string(text));
  };
  if (text.size() < 20 || text[2] != '/' || text[6] != '/' || text[11] != ':' ||
      text[14] != ':' || text[17] != ':') {
    return bad();
  }
  int day = 0, year = 0, hour = 0, minute = 0, second = 0;
  if (!parse_int(text.substr(0, 2), day) || !parse_int(text.substr(7, 4), year) ||
      !parse_int(text.substr(12, 2), hour) || !parse_int(text.substr(15, 2), minute) ||
      !parse_int(text.substr(18, 2), second)) {
    return bad();
  }
  const int month = month_index(text.substr(3, 3));
  if (month == 0 || hour > 23 || minute > 59 || second > 60) return bad();

  int offset_seconds = 0;
  std::string_view rest = text.substr(20);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!rest.empty()) {
    if (rest.size() != 5 || (rest[0] != '+' && rest[0] != '-')) return bad();
    int hh = 0, mm = 0;
    if (!parse_int(rest.substr(1, 2), hh) || !parse_int(rest.substr(3, 2), mm) || mm > 59) {
      return bad();
    }
    offset_seconds = (hh * 3600 + mm * 60) * (rest[0] == '-' ? -1 : 1);
  }

  using namespace std::chrono;
  const year_month_day date{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                            std::chrono::day{static_cast<unsigned>(day)}};
  if (!date.ok()) return bad();
  const auto days = sys_days(date).time_since_epoch().count();
  const double epoch = static_cast<double>(days) * 86400.0 + hour * 3600.0 + minute * 60.0 +
                       second - offset_seconds;
  if (epoch < 0.0) return bad();
  return epoch;
}

std::optional<std::string> dash_to_absent(std::string value) {
  if (value == "-") return std::nullopt;
  return value;
}

}  // namespace

LogFormat parse_log_format(const std::string& text) {
  const std::string key = lower(text);
  if (key == "common" || key == "clf") return LogFormat::Common;
  if (key == "combined") return LogFormat::Combined;
  fail(ErrorKind::InvalidParams, "unknown log format '" + text + "' (expected common or combined)");
}

std::string normalize_path(std::string_view path) {
  if (const auto scheme = path.find("://"); scheme != std::string_view::npos &&
                                            path.find_first_of("/?#") > scheme) {
    const auto slash = path.find('/', scheme + 3);
    path = slash == std::string_view::npos ? std::string_view("/") : path.substr(slash);
  }
  if (const auto cut = path.find_first_of("?#"); cut != std::string_view::npos) {
    path = path.substr(0, cut);
  }
  if (path.empty()) return "/";
  return std::string(path);
}

RawLogEntry parse_log_line(std::string_view line, LogFormat format) {
  LineReader reader(line);
  RawLogEntry entry;
  entry.ip = std::string(reader.token());
  reader.token();  // identd
  reader.token();  // authuser
  entry.timestamp = parse_log_timestamp(reader.bracketed());

  const std::string request = reader.quoted();
  {
    std::vector<std::string_view> parts;
    std::string_view rest = request;
    while (!rest.empty()) {
      const auto space = rest.find(' ');
      const auto part = rest.substr(0, space);
      if (!part.empty()) parts.push_back(part);
      if (space == std::string_view::npos) break;
      rest.remove_prefix(space + 1);
    }
    if (parts.size() < 2 || parts.size() > 3) reader.malformed("bad request line");
    entry.method = std::string(parts[0]);
    entry.path = std::string(parts[1]);
    if (entry.path.find("://") != std::string::npos) entry.path = normalize_path(entry.path);
    if (entry.path.empty() || entry.path.front() != '/') reader.malformed("path must start with '/'");
    if (parts.size() == 3) entry.http_version = std::string(parts[2]);
  }

  const std::string_view status = reader.token();
  if (!parse_int(status, entry.status) || entry.status < 100 || entry.status > 599) {
    fail(ErrorKind::BadStatus, "bad status '" + std::string(status) + "'");
  }

  const std::string_view size = reader.token();
  if (size != "-") {
    std::uint64_t bytes = 0;
    if (!parse_int(size, bytes)) reader.malformed("bad response size");
    entry.response_size = bytes;
  }

  if (format == LogFormat::Combined) {
    entry.referrer = dash_to_absent(reader.quoted());
    entry.user_agent = dash_to_absent(reader.quoted());
  }
  return entry;
}

UserAgentDatabase::UserAgentDatabase(std::vector<std::string> patterns) {
  if (patterns.empty()) fail(ErrorKind::InvalidParams, "user-agent database is empty");
  for (auto& pattern : patterns) {
    if (pattern.empty()) fail(ErrorKind::InvalidParams, "user-agent database has an empty pattern");
    patterns_.push_back(lower(pattern));
  }
}

UserAgentDatabase UserAgentDatabase::parse(std::string_view text) {
  std::vector<std::string> patterns;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    patterns.emplace_back(line);
  }
  return UserAgentDatabase(std::move(patterns));
}

bool UserAgentDatabase::matches(std::string_view user_agent) const {
  const std::string agent = lower(user_agent);
  return std::any_of(patterns_.begin(), patterns_.end(), [&](const std::string& pattern) {
    return agent.find(pattern) != std::string::npos;
  });
}

std::vector<RawLogEntry> filter_robots(std::span<const RawLogEntry> entries,
                                       const UserAgentDatabase& db) {
  std::vector<RawLogEntry> kept;
  for (const auto& entry : entries) {
    if (entry.user_agent && db.matches(*entry.user_agent)) kept.push_back(entry);
  }
  return kept;
}

std::vector<Request> to_requests(std::span<const RawLogEntry> entries, AgentMode mode) {
  std::vector<Request> requests;
  requests.reserve(entries.size());
  for (const auto& entry : entries) {
    std::optional<std::string> ip;
    if (!entry.ip.empty() && entry.ip != "-") ip = entry.ip;
    if (mode == AgentMode::UserAgent && !entry.user_agent) continue;
    if (mode == AgentMode::Ip && !ip) continue;
    if (!entry.user_agent && !ip) continue;
    requests.push_back(Request{AgentId(entry.user_agent, ip, mode), entry.timestamp,
                               normalize_path(entry.path)});
  }
  return requests;
}

std::vector<Session> sessionize(std::span<const Request> requests, double timeout) {
  if (!(timeout > 0.0)) {
    fail(ErrorKind::NonPositiveTimeout, "session timeout must be positive");
  }
  std::unordered_map<std::string, std::size_t> agent_slot;
  std::vector<std::vector<const Request*>> per_agent;
  for (const auto& request : requests) {
    auto [it, inserted] = agent_slot.try_emplace(request.agent.key(), per_agent.size());
    if (inserted) per_agent.emplace_back();
    per_agent[it->second].push_back(&request);
  }

  std::vector<Session> sessions;
  for (auto& list : per_agent) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Request* a, const Request* b) { return a->time < b->time; });
    Session* current = nullptr;
    for (const Request* request : list) {
      if (current == nullptr || request->time - current->requests.back().time > timeout) {
        sessions.emplace_back();
        current = &sessions.back();
        current->agent = request->agent;
        current->start_time = request->time;
      }
      current->requests.push_back(*request);
      current->length = current->requests.size();
    }
  }
  std::stable_sort(sessions.begin(), sessions.end(), [](const Session& a, const Session& b) {
    if (a.start_time != b.start_time) return a.start_time < b.start_time;
    return a.agent.key() < b.agent.key();
  });
  return sessions;
}

double average_session_length(std::uint64_t num_requests, std::uint64_t num_sessions) {
  if (num_sessions == 0) return 0.0;
  return static_cast<double>(num_requests) / static_cast<double>(num_sessions);
}

SummaryStats summarize(std::span<const Session> sessions) {
  SummaryStats stats;
  std::set<std::string> agents, ips, paths;
  for (const auto& session : sessions) {
    ++stats.num_sessions;
    agents.insert(session.agent.key());
    for (const auto& request : session.requests) {
      ++stats.num_requests;
      if (request.agent.ip()) ips.insert(*request.agent.ip());
      paths.insert(request.path);
    }
  }
  stats.num_agents = agents.size();
  stats.num_ips = ips.size();
  stats.num_resources = paths.size();
  stats.avg_session_length = average_session_length(stats.num_requests, stats.num_sessions);
  return stats;
}

std::string to_json(const SummaryStats& stats) {
  nlohmann::ordered_json j;
  j["num_requests"] = stats.num_requests;
  j["num_sessions"] = stats.num_sessions;
  j["num_agents"] = stats.num_agents;
  j["num_ips"] = stats.num_ips;
  j["num_resources"] = stats.num_resources;
  j["avg_session_length"] = stats.avg_session_length;
  return j.dump(2);
}

}  // namespace webbot
