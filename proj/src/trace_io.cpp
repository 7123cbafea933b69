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

#include "webbot/trace_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "webbot/error.hpp"

namespace webbot {

namespace {

bool has_gzip_suffix(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::string gunzip_file(const std::filesystem::path& path) {
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) fail(ErrorKind::Io, "cannot open " + path.string());
  std::string contents;
  char buffer[1 << 16];
  int read = 0;
  while ((read = gzread(file, buffer, sizeof buffer)) > 0) contents.append(buffer, read);
  int code = Z_OK;
  const char* message = gzerror(file, &code);
  const std::string error = read < 0 ? message : "";
  gzclose(file);
  if (read < 0) fail(ErrorKind::Io, "cannot decompress " + path.string() + ": " + error);
  return contents;
}

std::string robot_label(const AgentId& agent) {
  switch (agent.mode()) {
    case AgentMode::UserAgent: return agent.user_agent().value_or("-");
    case AgentMode::Ip: return agent.ip().value_or("-");
    case AgentMode::UserAgentAndIp:
      return agent.user_agent().value_or("-") + " | " + agent.ip().value_or("-");
  }
  return agent.key();
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  if (has_gzip_suffix(path)) return gunzip_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorKind::Io, "cannot read " + path.string());
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << contents;
  if (!out) fail(ErrorKind::Io, "failed writing " + path.string());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string::npos) end = contents.size();
    std::size_t stop = end;
    if (stop > start && contents[stop - 1] == '\r') --stop;
    lines.emplace_back(contents, start, stop - start);
    start = end + 1;
  }
  return lines;
}

LogReadResult read_log_file(const std::filesystem::path& path, LogFormat format) {
  LogReadResult result;
  for (const auto& line : read_lines(path)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      result.entries.push_back(parse_log_line(line, format));
    } catch (const Error&) {
      ++result.malformed_lines;
    }
  }
  return result;
}

UserAgentDatabase read_user_agent_database(const std::filesystem::path& path) {
  return UserAgentDatabase::parse(read_file(path));
}

void write_trace_csv(std::ostream& out, const GeneratedTrace& trace) {
  std::vector<std::string> labels;
  labels.reserve(trace.robots.size());
  for (const auto& robot : trace.robots) labels.push_back(csv_field(robot_label(robot)));
  out << "time,robot,session_id,path\n";
  for (const auto& request : trace.requests) {
    out << format_fixed(request.time, 3) << ',' << labels.at(request.robot) << ','
        << request.session_id << ',' << csv_field(request.path) << '\n';
  }
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  trace.origin = TraceOrigin::Generated;
  std::string line;
  if (!std::getline(in, line)) return trace;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "time,robot,session_id,path") {
    fail(ErrorKind::MalformedLine, "trace CSV must start with the header time,robot,session_id,path");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = parse_csv_row(line);
    if (fields.size() != 4) fail(ErrorKind::MalformedLine, "trace CSV row needs 4 fields: " + line);
    char* end = nullptr;
    const double time = std::strtod(fields[0].c_str(), &end);
    if (end == fields[0].c_str() || *end != '\0' || !(time >= 0.0)) {
      fail(ErrorKind::MalformedLine, "bad time in trace CSV row: " + line);
    }
    trace.requests.push_back(Request{AgentId::from_label(fields[1]), time, fields[3]});
  }
  sort_by_time(trace.requests);
  return trace;
}

Trace read_trace_csv_file(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_trace_csv(in);
}

std::string format_log_timestamp(double epoch_seconds) {
  using namespace std::chrono;
  static constexpr const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                            "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  const auto seconds_total = static_cast<long long>(std::floor(epoch_seconds));
  const auto day_point = floor<days>(sys_seconds{seconds{seconds_total}});
  const year_month_day date{day_point};
  const long long of_day = seconds_total - day_point.time_since_epoch().count() * 86400LL;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%02u/%s/%04d:%02lld:%02lld:%02lld +0000",
                static_cast<unsigned>(date.day()), kMonths[static_cast<unsigned>(date.month()) - 1],
                static_cast<int>(date.year()), of_day / 3600, (of_day / 60) % 60, of_day % 60);
  return buffer;
}

void write_combined_log(std::ostream& out, const GeneratedTrace& trace) {
  auto escape = [](const std::string& text) {
    std::string escaped;
    for (char c : text) {
      if (c == '"' || c == '\\') escaped.push_back('\\');
      escaped.push_back(c);
    }
    return escaped;
  };
  std::vector<std::string> agents;
  for (const auto& robot : trace.robots) agents.push_back(escape(robot.user_agent().value_or(robot_label(robot))));
  for (const auto& request : trace.requests) {
    const std::size_t i = request.robot + 1;
    out << "10." << ((i >> 16) & 0xff) << '.' << ((i >> 8) & 0xff) << '.' << (i & 0xff)
        << " - - [" << format_log_timestamp(request.time) << "] \"GET " << request.path
        << " HTTP/1.1\" 200 - \"-\" \"" << agents.at(request.robot) << "\"\n";
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace webbot
