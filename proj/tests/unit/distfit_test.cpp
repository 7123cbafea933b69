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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "support.hpp"
#include "webbot/distfit.hpp"

using namespace webbot;

namespace {

// Partial sum to n terms (added smallest first) with the tail bracketed by
// the integrals from n + 1 and from n.
std::pair<double, double> zeta_bracket(double s, int n) {
  double sum = 0.0;
  for (int i = n; i >= 1; --i) sum += std::pow(static_cast<double>(i), -s);
  return {sum + std::pow(n + 1.0, 1.0 - s) / (s - 1.0), sum + std::pow(n, 1.0 - s) / (s - 1.0)};
}

double sum_logs(const std::vector<std::uint64_t>& xs) {
  double total = 0.0;
  for (auto x : xs) total += std::log(static_cast<double>(x));
  return total;
}

}  // namespace

TEST(PoissonRate, Examples) {
  EXPECT_DOUBLE_EQ(fit_poisson_rate(120, 60).lambda, 2.0);
  EXPECT_DOUBLE_EQ(fit_poisson_rate(1, 1).lambda, 1.0);
  EXPECT_DOUBLE_EQ(fit_poisson_rate(28583, 1234567.0).lambda, 28583 / 1234567.0);
  EXPECT_ERROR_KIND(fit_poisson_rate(0, 10), ErrorKind::EmptySample);
  EXPECT_ERROR_KIND(fit_poisson_rate(3, 0), ErrorKind::NonPositiveDuration);
}

TEST(RiemannZeta, KnownValues) {
  const auto [lo2, hi2] = zeta_bracket(2.0, 1'000'000);
  const double z2 = riemann_zeta(2.0);
  EXPECT_NEAR(z2, std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
  EXPECT_GE(z2, lo2 - 1e-13);
  EXPECT_LE(z2, hi2 + 1e-13);

  const auto [lo4, hi4] = zeta_bracket(4.0, 20'000);
  const double z4 = riemann_zeta(4.0);
  EXPECT_NEAR(z4, std::pow(std::numbers::pi, 4) / 90.0, 1e-12);
  EXPECT_GE(z4, lo4 - 1e-13);
  EXPECT_LE(z4, hi4 + 1e-13);

  EXPECT_DOUBLE_EQ(riemann_zeta(50.0), 1.0 + std::pow(2.0, -50.0));
}

TEST(RiemannZeta, DomainAndShape) {
  EXPECT_ERROR_KIND(riemann_zeta(1.0), ErrorKind::DomainError);
  EXPECT_ERROR_KIND(riemann_zeta(0.5), ErrorKind::DomainError);
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 1.01; s < 40; s *= 1.07) {  // beyond ~50, zeta rounds to 1
    const double z = riemann_zeta(s);
    EXPECT_GE(z, 1.0);
    EXPECT_LT(z, prev);
    EXPECT_NEAR(z, webbot::testing::oracle_zeta(s), 1e-10 * z) << s;
    prev = z;
  }
}

TEST(FitZeta, SmallSampleMatchesGridOracle) {
  std::vector<std::uint64_t> xs{1, 1, 1, 2};
  const double s = fit_zeta(xs).s;
  EXPECT_NEAR(s, webbot::testing::zeta_grid_argmax(xs.size(), sum_logs(xs)), 1e-3);
  // Stationarity: zeta'(s)/zeta(s) = -ln 2 / 4, checked by central difference.
  const double h = 1e-5;
  const double dlog = (std::log(riemann_zeta(s + h)) - std::log(riemann_zeta(s - h))) / (2 * h);
  EXPECT_NEAR(dlog, -std::log(2.0) / 4.0, 1e-5);
}

TEST(FitZeta, Errors) {
  EXPECT_ERROR_KIND(fit_zeta(std::vector<std::uint64_t>{}), ErrorKind::EmptySample);
  EXPECT_ERROR_KIND(fit_zeta(std::vector<std::uint64_t>{1, 1, 1}), ErrorKind::AllOnes);
  EXPECT_ERROR_KIND(fit_zeta(std::vector<std::uint64_t>{0, 2}), ErrorKind::DomainError);
}

TEST(FitZeta, RoundTrip) {
  Rng rng(2501);
  std::vector<std::uint64_t> xs(50'000);
  for (auto& x : xs) x = sample_zeta(rng, {2.5});
  EXPECT_NEAR(fit_zeta(xs).s, 2.5, 0.05);
}

TEST(FitLognormal, Examples) {
  auto two = fit_lognormal(std::vector<double>{1.0, std::exp(2.0)});
  EXPECT_NEAR(two.mu, 1.0, 1e-12);
  EXPECT_NEAR(two.sigma, std::sqrt(2.0), 1e-12);
  auto same = fit_lognormal(std::vector<double>{std::exp(1.0), std::exp(1.0)});
  EXPECT_NEAR(same.mu, 1.0, 1e-12);
  EXPECT_EQ(same.sigma, 0.0);
  Rng rng(3);
  EXPECT_DOUBLE_EQ(sample_lognormal(rng, same), std::exp(same.mu));

  EXPECT_ERROR_KIND(fit_lognormal(std::vector<double>{1.0}), ErrorKind::TooFewSamples);
  EXPECT_ERROR_KIND(fit_lognormal(std::vector<double>{1.0, 0.0}), ErrorKind::NonPositiveSample);
}

TEST(FitLognormal, RoundTrip) {
  Rng rng(512);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = sample_lognormal(rng, {0.5, 1.2});
  auto fit = fit_lognormal(xs);
  EXPECT_NEAR(fit.mu, 0.5, 0.005);
  EXPECT_NEAR(fit.sigma, 1.2, 0.012);
}

TEST(SampleExponential, MeanAndRefit) {
  Rng rng(11);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_exponential(rng, {2.0});
    ASSERT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);

  Rng small(12);
  double total = 0.0;
  for (int i = 0; i < 10'000; ++i) total += sample_exponential(small, {3.0});
  EXPECT_NEAR(fit_poisson_rate(10'000, total).lambda, 3.0, 0.15);
}

TEST(SampleExponential, Deterministic) {
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_exponential(a, {1.0}), sample_exponential(b, {1.0}));
    EXPECT_EQ(sample_zeta(a, {2.0}), sample_zeta(b, {2.0}));
    EXPECT_EQ(sample_lognormal(a, {0, 1}), sample_lognormal(b, {0, 1}));
  }
}

TEST(SampleZeta, MassAndMean) {
  Rng rng(3003);
  const int n = 1'000'000;
  std::uint64_t ones = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto k = sample_zeta(rng, {3.0});
    ASSERT_GE(k, 1u);
    ones += k == 1;
    sum += static_cast<double>(k);
  }
  EXPECT_NEAR(static_cast<double>(ones) / n, 1.0 / webbot::testing::oracle_zeta(3.0), 0.005);
  const double mean = webbot::testing::oracle_zeta(2.0) / webbot::testing::oracle_zeta(3.0);
  EXPECT_NEAR(sum / n, mean, 0.02 * mean);

  Rng steep(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_zeta(steep, {50.0}), 1u);
}

TEST(SampleZeta, MassFunctionWithinThreeStandardErrors) {
  Rng rng(777);
  const int n = 1'000'000;
  const double s = 2.5;
  std::vector<std::uint64_t> counts(11, 0);
  for (int i = 0; i < n; ++i) {
    const auto k = sample_zeta(rng, {s});
    if (k <= 10) counts[k]++;
  }
  const double z = webbot::testing::oracle_zeta(s);
  for (int k = 1; k <= 10; ++k) {
    const double p = std::pow(k, -s) / z;
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(counts[k]) / n, p, 3 * se) << "k = " << k;
  }
}

TEST(SampleLognormal, MedianAndMean) {
  Rng rng(21);
  std::vector<double> xs(1'000'000);
  for (auto& x : xs) x = sample_lognormal(rng, {0.0, 1.0});
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
  EXPECT_NEAR(xs[xs.size() / 2], 1.0, 0.01);
  EXPECT_NEAR(mean, std::exp(0.5), 0.02 * std::exp(0.5));
}

TEST(SampleCategorical, Examples) {
  Rng rng(8);
  CategoricalParams one{{1.0}};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_categorical(rng, one), 0u);

  CategoricalParams two{{0.6, 0.4}};
  const int n = 1'000'000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += sample_categorical(rng, two) == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.6, 0.005);

  CategoricalParams gap{{0.5, 0.0, 0.5}};
  for (int i = 0; i < 100'000; ++i) EXPECT_NE(sample_categorical(rng, gap), 1u);
}

TEST(Categorical, Validation) {
  EXPECT_ERROR_KIND((CategoricalParams{{0.5, 0.4}}.validate()), ErrorKind::InvalidParams);
  EXPECT_ERROR_KIND((CategoricalParams{{1.5, -0.5}}.validate()), ErrorKind::InvalidParams);
  auto p = CategoricalParams::from_weights(std::vector<double>{3, 1});
  EXPECT_DOUBLE_EQ(p.probs[0], 0.75);
}

TEST(EmpiricalCdf, Examples) {
  auto a = empirical_cdf(std::vector<double>{3, 1, 2});
  EXPECT_DOUBLE_EQ(a(2.0), 2.0 / 3.0);
  auto b = empirical_cdf(std::vector<double>{5, 5, 5});
  EXPECT_EQ(b(4.999), 0.0);
  EXPECT_EQ(b(5.0), 1.0);
  EXPECT_EQ(b.left_limit(5.0), 0.0);
  auto c = empirical_cdf(std::vector<double>{1});
  EXPECT_EQ(c(0.999), 0.0);
  EXPECT_EQ(c(1.0), 1.0);
  EXPECT_ERROR_KIND(empirical_cdf(std::vector<double>{}), ErrorKind::EmptySample);
}

TEST(KsStatistic, Examples) {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_DOUBLE_EQ(ks_statistic(std::vector<double>{0.5}, uniform), 0.5);

  const int n = 1000;
  std::vector<double> quantiles;
  for (int i = 1; i <= n; ++i) quantiles.push_back((i - 0.5) / n);
  EXPECT_NEAR(ks_statistic(quantiles, uniform), 0.5 / n, 1e-12);

  Rng rng(4);
  LognormalParams params{0.3, 0.8};
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = sample_lognormal(rng, params);
  EXPECT_LT(ks_statistic(xs, [&](double x) { return params.cdf(x); }), 0.01);
  EXPECT_ERROR_KIND(ks_statistic(std::vector<double>{}, uniform), ErrorKind::EmptySample);
}

TEST(KsStatistic, DiscreteAgainstZeta) {
  Rng rng(6);
  ZetaParams params{2.5};
  std::vector<std::uint64_t> xs(100'000);
  for (auto& x : xs) x = sample_zeta(rng, params);
  const double d = ks_statistic_discrete(
      xs, [&](std::uint64_t k) { return zeta_cdf(static_cast<double>(k), params); });
  EXPECT_LT(d, 0.01);
  // Point mass at 1 against Zeta(2.5): the gap is 1 - P(K = 1).
  std::vector<std::uint64_t> ones(10, 1);
  EXPECT_NEAR(ks_statistic_discrete(
                  ones, [&](std::uint64_t k) { return zeta_cdf(static_cast<double>(k), params); }),
              1.0 - 1.0 / webbot::testing::oracle_zeta(2.5), 1e-12);
}

TEST(ZetaCdf, MatchesPartialSums) {
  ZetaParams params{1.8};
  const double z = webbot::testing::oracle_zeta(1.8);
  double partial = 0.0;
  for (int k = 1; k <= 200; ++k) {
    partial += std::pow(k, -1.8) / z;
    EXPECT_NEAR(zeta_cdf(k, params), partial, 1e-10) << k;
  }
  EXPECT_EQ(zeta_cdf(0.5, params), 0.0);
}

TEST(KsTwoSample, Basics) {
  std::vector<double> a{1, 2, 3, 4};
  EXPECT_EQ(ks_two_sample(a, a), 0.0);
  EXPECT_EQ(ks_two_sample(a, std::vector<double>{10, 11}), 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, std::vector<double>{1, 2}), 0.5);
  std::vector<double> b{2.5, 0.5};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b), ks_two_sample(b, a));
}

TEST(Rng, DerivedStreamsDiffer) {
  Rng base(42);
  Rng s1 = base.derive(1);
  Rng s2 = base.derive(2);
  EXPECT_NE(s1.next_u64(), s2.next_u64());
  Rng again = Rng(42).derive(1);
  Rng s1b = base.derive(1);
  EXPECT_EQ(again.next_u64(), s1b.next_u64());
}
