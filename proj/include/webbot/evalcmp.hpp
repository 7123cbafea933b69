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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "webbot/cache_sim.hpp"
#include "webbot/distfit.hpp"
#include "webbot/log_model.hpp"

namespace webbot {

/// Gaps between consecutive session starts, pooled over all agents.
std::vector<double> extract_inter_session_times(std::span<const Session> sessions);

/// Gaps between consecutive requests within each session.
std::vector<double> extract_intra_session_iats(std::span<const Session> sessions);

struct PmfPoint {
  std::uint64_t k = 0;
  double probability = 0.0;
};

/// Mass at each observed length, ascending in k.
std::vector<PmfPoint> session_length_pmf(std::span<const Session> sessions);

using FittedParams = std::variant<std::monostate, ExponentialParams, LognormalParams, ZetaParams>;

struct ComparisonReport {
  std::string metric_name;
  std::vector<double> original;   // raw samples
  std::vector<double> generated;
  FittedParams fitted_original;
  FittedParams fitted_generated;
  double ks_original_vs_fit = 0.0;
  double ks_generated_vs_fit = 0.0;
  double ks_original_vs_generated = 0.0;
};

struct CurvePair {
  HitRateCurve original;
  HitRateCurve generated;
  double max_abs_gap() const;
};

struct ComparisonResult {
  std::vector<ComparisonReport> reports;  // inter_session_times, intra_session_iats, session_lengths
  std::vector<CurvePair> curves;          // one per policy
  std::vector<std::uint64_t> capacities;

  const ComparisonReport& report(const std::string& metric) const;
};

struct CompareOptions {
  double session_timeout = 1800.0;
  std::vector<CachePolicy> policies{CachePolicy::LFU, CachePolicy::LRU};
  std::vector<std::uint64_t> capacities;  // empty: default grid over the larger trace
  unsigned threads = 1;
};

ComparisonResult compare(const Trace& original, const Trace& generated,
                         const CompareOptions& options);

/// Writes the CSV files and summary.json into directory.
void write_comparison(const ComparisonResult& result, const std::filesystem::path& directory,
                      const std::string& config_json);

std::string summary_json(const ComparisonResult& result);

}  // namespace webbot
