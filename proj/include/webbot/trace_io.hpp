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
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "webbot/csv.hpp"
#include "webbot/generator.hpp"
#include "webbot/ingest.hpp"
#include "webbot/log_model.hpp"

namespace webbot {

/// Reads a text file line by line; gzip input is recognised by a .gz suffix.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

struct LogReadResult {
  std::vector<RawLogEntry> entries;
  std::uint64_t malformed_lines = 0;
};

/// Parses every nonblank line; malformed records are counted and skipped.
LogReadResult read_log_file(const std::filesystem::path& path, LogFormat format);

UserAgentDatabase read_user_agent_database(const std::filesystem::path& path);

/// time,robot,session_id,path with time at millisecond precision.
void write_trace_csv(std::ostream& out, const GeneratedTrace& trace);

/// Reads a generated-trace CSV back as requests, robots labelled opaquely.
Trace read_trace_csv(std::istream& in);
Trace read_trace_csv_file(const std::filesystem::path& path);

/// Combined Log Format export: synthetic IP per robot, GET, status 200.
void write_combined_log(std::ostream& out, const GeneratedTrace& trace);

std::string format_log_timestamp(double epoch_seconds);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace webbot
