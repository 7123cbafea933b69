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

#include "webbot/distfit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "webbot/error.hpp"

namespace webbot {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// B_{2j} / (2j)! for j = 1..10.
constexpr std::array<double, 10> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
};

constexpr int kDirectTerms = 16;

/// Hurwitz zeta sum_{i>=0} (q + i)^-s for s > 1, q >= 1.
double hurwitz_zeta(double s, double q) {
  const double a = q + kDirectTerms;
  // Tail first: its terms are the smallest.
  double tail = std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  double rising = s;                  // s (s+1) ... (s+2j-2)
  double power = std::pow(a, -s - 1.0);  // a^{-s-2j+1}
  const double inv_a2 = 1.0 / (a * a);
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * power;
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(tail)) break;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power *= inv_a2;
  }
  double sum = tail;
  for (int i = kDirectTerms - 1; i >= 0; --i) sum += std::pow(q + i, -s);
  return sum;
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) fail(ErrorKind::EmptySample, std::string(what) + ": empty sample");
}

}  // namespace

void ExponentialParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidParams, "exponential rate must be positive and finite");
  }
}

double ExponentialParams::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); }

void ZetaParams::validate() const {
  if (!(s > 1.0) || !std::isfinite(s)) fail(ErrorKind::InvalidParams, "zeta exponent must exceed 1");
}

void LognormalParams::validate() const {
  if (!std::isfinite(mu) || !(sigma >= 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::InvalidParams, "lognormal parameters must be finite with sigma >= 0");
  }
}

double LognormalParams::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double z = std::log(x) - mu;
  if (sigma == 0.0) return z >= 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / (sigma * kSqrt2));
}

void CategoricalParams::validate() const {
  if (probs.empty()) fail(ErrorKind::InvalidParams, "categorical distribution has no outcomes");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      fail(ErrorKind::InvalidParams, "categorical probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorKind::InvalidParams, "categorical probabilities sum to " + std::to_string(total));
  }
}

CategoricalParams CategoricalParams::from_weights(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorKind::InvalidParams, "categorical weights must have a positive finite total");
  }
  CategoricalParams params;
  params.probs.reserve(weights.size());
  for (double w : weights) params.probs.push_back(w / total);
  return params;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sorted_values) : values_(std::move(sorted_values)) {
  require_nonempty(values_.size(), "empirical cdf");
  if (!std::is_sorted(values_.begin(), values_.end())) {
    fail(ErrorKind::InvalidParams, "empirical cdf values must be sorted");
  }
}

double EmpiricalCdf::operator()(double x) const {
  const auto count = std::upper_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(count) / static_cast<double>(values_.size());
}

double EmpiricalCdf::left_limit(double x) const {
  const auto count = std::lower_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(count) / static_cast<double>(values_.size());
}

ExponentialParams fit_poisson_rate(std::uint64_t num_sessions, double duration) {
  if (num_sessions == 0) fail(ErrorKind::EmptySample, "poisson rate: no sessions");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    fail(ErrorKind::NonPositiveDuration, "poisson rate: observation window must be positive");
  }
  return ExponentialParams{static_cast<double>(num_sessions) / duration};
}

double riemann_zeta(double s) {
  if (!(s > 1.0)) fail(ErrorKind::DomainError, "riemann zeta requires s > 1");
  if (std::isinf(s)) return 1.0;
  return hurwitz_zeta(s, 1.0);
}

double zeta_log_likelihood(double s, std::size_t n, double sum_log) {
  return -static_cast<double>(n) * std::log(riemann_zeta(s)) - s * sum_log;
}

ZetaParams fit_zeta(std::span<const std::uint64_t> samples) {
  require_nonempty(samples.size(), "fit_zeta");
  double sum_log = 0.0;
  bool any_above_one = false;
  for (std::uint64_t x : samples) {
    if (x == 0) fail(ErrorKind::DomainError, "fit_zeta: samples must be >= 1");
    sum_log += std::log(static_cast<double>(x));
    any_above_one |= x > 1;
  }
  if (!any_above_one) {
    fail(ErrorKind::AllOnes, "fit_zeta: all samples equal 1, the likelihood has no maximum");
  }

  const std::size_t n = samples.size();
  auto objective = [&](double s) { return zeta_log_likelihood(s, n, sum_log); };

  // Golden-section search; the log-likelihood is concave in s.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = kZetaMinExponent;
  double hi = kZetaMaxExponent;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  return ZetaParams{0.5 * (lo + hi)};
}

LognormalParams fit_lognormal(std::span<const double> samples) {
  require_nonempty(samples.size(), "fit_lognormal");
  if (samples.size() < 2) fail(ErrorKind::TooFewSamples, "fit_lognormal: need at least 2 samples");
  double sum = 0.0;
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      fail(ErrorKind::NonPositiveSample, "fit_lognormal: samples must be positive and finite");
    }
    sum += std::log(x);
  }
  const double n = static_cast<double>(samples.size());
  const double mu = sum / n;
  double squares = 0.0;
  for (double x : samples) {
    const double d = std::log(x) - mu;
    squares += d * d;
  }
  return LognormalParams{mu, std::sqrt(squares / (n - 1.0))};
}

double sample_exponential(Rng& rng, const ExponentialParams& params) {
  return -std::log(rng.uniform_open_closed()) / params.lambda;
}

std::uint64_t sample_zeta(Rng& rng, const ZetaParams& params) {
  // Devroye, Non-Uniform Random Variate Generation, X.6.
  const double am1 = params.s - 1.0;
  const double b = std::exp2(am1);
  constexpr double kLimit = 9.2e18;
  for (;;) {
    const double u = rng.uniform_open_closed();
    const double v = rng.uniform();
    const double x = std::floor(std::pow(u, -1.0 / am1));
    if (!(x < kLimit)) {
      // Beyond the integer range; only reachable for s very close to 1.
      return std::numeric_limits<std::uint64_t>::max();
    }
    const double log_t = am1 * std::log1p(1.0 / x);
    const double t = std::exp(log_t);
    if (v * x * std::expm1(log_t) / (b - 1.0) <= t / b) return static_cast<std::uint64_t>(x);
  }
}

double sample_lognormal(Rng& rng, const LognormalParams& params) {
  if (params.sigma == 0.0) return std::exp(params.mu);
  return std::exp(params.mu + params.sigma * rng.standard_normal());
}

std::size_t sample_categorical(Rng& rng, const CategoricalParams& params) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < params.probs.size(); ++i) {
    if (params.probs[i] <= 0.0) continue;
    cumulative += params.probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

double zeta_cdf(double k, const ZetaParams& params) {
  if (k < 1.0) return 0.0;
  if (std::isinf(k)) return 1.0;
  const double whole = std::floor(k);
  const double norm = riemann_zeta(params.s);
  if (whole <= kDirectTerms) {
    double mass = 0.0;
    for (int i = static_cast<int>(whole); i >= 1; --i) mass += std::pow(i, -params.s);
    return std::min(1.0, mass / norm);
  }
  return std::max(0.0, 1.0 - hurwitz_zeta(params.s, whole + 1.0) / norm);
}

EmpiricalCdf empirical_cdf(std::span<const double> samples) {
  require_nonempty(samples.size(), "empirical_cdf");
  std::vector<double> values(samples.begin(), samples.end());
  std::sort(values.begin(), values.end());
  return EmpiricalCdf(std::move(values));
}

double ks_statistic(std::span<const double> samples,
                    const std::function<double(double)>& reference_cdf) {
  require_nonempty(samples.size(), "ks_statistic");
  std::vector<double> values(samples.begin(), samples.end());
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double x = values[i];
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    const double f_at = reference_cdf(x);
    const double f_below = reference_cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(at - f_at), std::abs(below - f_below)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_statistic_discrete(std::span<const std::uint64_t> samples,
                             const std::function<double(std::uint64_t)>& reference_cdf) {
  require_nonempty(samples.size(), "ks_statistic_discrete");
  std::vector<std::uint64_t> values(samples.begin(), samples.end());
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const std::uint64_t k = values[i];
    const double below = static_cast<double>(i) / n;
    const double at = static_cast<double>(j) / n;
    const double f_below = k == 0 ? 0.0 : reference_cdf(k - 1);
    d = std::max({d, std::abs(at - reference_cdf(k)), std::abs(below - f_below)});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size(), "ks_two_sample");
  require_nonempty(b.size(), "ks_two_sample");
  std::vector<double> xs(a.begin(), a.end());
  std::vector<double> ys(b.begin(), b.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() || j < ys.size()) {
    double x;
    if (j == ys.size() || (i < xs.size() && xs[i] <= ys[j])) {
      x = xs[i];
    } else {
      x = ys[j];
    }
    while (i < xs.size() && xs[i] == x) ++i;
    while (j < ys.size() && ys[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace webbot
