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
#include <functional>
#include <span>
#include <vector>

#include "webbot/rng.hpp"

namespace webbot {

struct ExponentialParams {
  double lambda = 1.0;
  void validate() const;
  double cdf(double x) const;
};

struct ZetaParams {
  double s = 2.0;
  void validate() const;
};

struct LognormalParams {
  double mu = 0.0;
  double sigma = 1.0;
  void validate() const;
  double cdf(double x) const;
};

struct CategoricalParams {
  std::vector<double> probs;
  void validate() const;
  static CategoricalParams from_weights(std::span<const double> weights);
};

/// Right-continuous step function over a nonempty sorted sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sorted_values);

  /// Fraction of samples <= x.
  double operator()(double x) const;
  /// Fraction of samples < x.
  double left_limit(double x) const;

  const std::vector<double>& sorted_values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

ExponentialParams fit_poisson_rate(std::uint64_t num_sessions, double duration);

/// Riemann zeta for real s > 1, summed directly with an Euler-Maclaurin tail.
double riemann_zeta(double s);

/// Log-likelihood of a Zeta(s) sample with x_min = 1, given n and sum(ln x).
double zeta_log_likelihood(double s, std::size_t n, double sum_log);

inline constexpr double kZetaMinExponent = 1.0 + 1e-6;
inline constexpr double kZetaMaxExponent = 50.0;

/// Maximum-likelihood exponent by golden-section search over (1, 50].
ZetaParams fit_zeta(std::span<const std::uint64_t> samples);

/// Mean and (n-1)-normalised standard deviation of ln x.
LognormalParams fit_lognormal(std::span<const double> samples);

/// -ln(U)/lambda with U uniform on (0, 1].
double sample_exponential(Rng& rng, const ExponentialParams& params);

/// Exact draw over the unbounded support by rejection from a Pareto envelope.
std::uint64_t sample_zeta(Rng& rng, const ZetaParams& params);

double sample_lognormal(Rng& rng, const LognormalParams& params);

std::size_t sample_categorical(Rng& rng, const CategoricalParams& params);

/// P(K <= k) for K ~ Zeta(s); 0 for k < 1.
double zeta_cdf(double k, const ZetaParams& params);

EmpiricalCdf empirical_cdf(std::span<const double> samples);

/// sup |F_n - F| against a continuous reference, checking both sides of each
/// jump of the empirical CDF.
double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& reference_cdf);

/// sup |F_n - F| for integer-valued samples against an integer-supported
/// reference, evaluated over every integer up to the sample maximum.
double ks_statistic_discrete(std::span<const std::uint64_t> samples,
                             const std::function<double(std::uint64_t)>& reference_cdf);

/// Two-sample statistic sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace webbot
