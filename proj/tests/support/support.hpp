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
#include <string>
#include <vector>

#include "webbot/cache_sim.hpp"
#include "webbot/error.hpp"
#include "webbot/model.hpp"

#define EXPECT_ERROR_KIND(statement, expected)                     \
  do {                                                           \
    try {                                                        \
      statement;                                                 \
      ADD_FAILURE() << "no error thrown by " #statement;         \
    } catch (const ::webbot::Error& e) {                         \
      EXPECT_EQ(e.kind(), expected) << e.what();                 \
    }                                                            \
  } while (0)

namespace webbot::testing {

struct TruthSpec {
  std::size_t robots = 300;
  std::uint64_t pool_size = 1;
  double lambda = 1.0 / 600.0;
  double zeta_s = 2.5;
  double mu = 0.0;
  double sigma = 1.0;
  std::size_t subdirectories = 40;
  PriorConfig prior;
};

/// Hand-built model with Zipf-like robot weights and resource popularity. No
/// robot has any history, so every robot follows the global proportions.
FittedModel truth_model(const TruthSpec& spec);

/// A tiny catalog: "/a/x.html"(3), "/a/y.gif"(1), "/b/z.html"(2).
ResourceCatalog small_catalog();

Request request(const std::string& agent, double time, const std::string& path = "/x.html");

std::string data_path(const std::string& name);

/// Zeta(s) from 64 direct terms plus an integral tail and three correction
/// terms; deliberately shares nothing with the library implementation.
double oracle_zeta(double s);

/// Grid maximiser of -n ln zeta(s) - s sum_log over [lo, hi].
double zeta_grid_argmax(std::size_t n, double sum_log, double lo = 1.001, double hi = 50.0,
                        double step = 1e-4);

/// Maximises sum_j c_j ln(theta_j) over the probability simplex by nested
/// golden-section searches. Terms with c_j == 0 contribute nothing.
std::vector<double> simplex_argmax(const std::vector<double>& coefficients);

/// Brute-force cache reference: a recency-ordered vector for LRU and a linear
/// scan over (count, last use) for LFU.
std::vector<bool> reference_hits(const std::vector<std::uint32_t>& objects, std::size_t capacity,
                                 CachePolicy policy);

struct CacheCheck {
  std::size_t traces = 0;
  std::size_t sequence_mismatches = 0;
  std::size_t lru_monotonicity_violations = 0;
  std::size_t compulsory_only_mismatches = 0;
};

/// Random traces (n <= 1000, capacity <= 50) checked against reference_hits,
/// LRU inclusion and the compulsory-miss hit rate.
CacheCheck cache_reference_sweep(std::uint64_t seed, std::size_t traces);

struct OracleResult {
  std::size_t checked = 0;
  double max_error = 0.0;
};

/// fit_zeta against zeta_grid_argmax on randomized small Zeta samples.
OracleResult zeta_oracle_sweep(std::uint64_t seed, std::size_t samples);

/// fit_map against simplex_argmax of the log-posterior on random instances
/// with K <= 3 types and R_j <= 4 resources; instances where any numerator
/// would clamp are skipped.
OracleResult map_oracle_sweep(std::uint64_t seed, std::size_t trials);

}  // namespace webbot::testing
