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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <limits>
#include <mutex>
#include <tuple>

namespace webbot::testing {

FittedModel truth_model(const TruthSpec& spec) {
  FittedModel m;
  m.arrival.lambda = spec.lambda;
  m.session_length.s = spec.zeta_s;
  m.request_gap = {spec.mu, spec.sigma};
  std::vector<double> weights;
  for (std::size_t i = 0; i < spec.robots; ++i) {
    m.robots.emplace_back("bot-" + std::to_string(i), "10.0." + std::to_string(i / 250) + "." +
                                                          std::to_string(i % 250),
                          AgentMode::UserAgentAndIp);
    weights.push_back(1.0 / std::pow(i + 1.0, 0.8));
  }
  m.rho = CategoricalParams::from_weights(weights);

  const char* types[] = {"gif", "html", "pdf"};
  std::vector<CatalogSubdirectory> subdirs;
  for (std::size_t d = 0; d < spec.subdirectories; ++d) {
    char name[32];
    std::snprintf(name, sizeof name, "/d%03zu", d);
    CatalogSubdirectory sub{name, {}};
    const std::size_t per_type = 2 + (d * 7) % 20;
    for (const char* type : types) {
      ResourceTypeGroup group{type, {}};
      for (std::size_t r = 0; r < per_type; ++r) {
        char path[64];
        std::snprintf(path, sizeof path, "%s/r%03zu.%s", name, r, type);
        auto count = static_cast<std::uint64_t>(1000.0 / std::pow(r + 1.0, 1.1)) + 1;
        group.resources.push_back({path, count});
      }
      sub.types.push_back(std::move(group));
    }
    subdirs.push_back(std::move(sub));
  }
  m.paths = PathModel(ResourceCatalog(std::move(subdirs)), spec.prior,
                      std::vector<RobotUsage>(spec.robots));
  m.pool_size = spec.pool_size;
  m.config.prior = spec.prior;
  m.validate();
  return m;
}

ResourceCatalog small_catalog() {
  return ResourceCatalog({
      {"/a", {{"gif", {{"/a/y.gif", 1}}}, {"html", {{"/a/x.html", 3}}}}},
      {"/b", {{"html", {{"/b/z.html", 2}}}}},
  });
}

Request request(const std::string& agent, double time, const std::string& path) {
  return Request{AgentId(agent, std::nullopt, AgentMode::UserAgent), time, path};
}

std::string data_path(const std::string& name) { return std::string(WEBBOT_TEST_DATA) + "/" + name; }

double oracle_zeta(double s) {
  constexpr int kTerms = 64;
  double sum = 0.0;
  for (int i = kTerms - 1; i >= 1; --i) sum += std::pow(static_cast<double>(i), -s);
  const double n = kTerms;
  const double ns = std::pow(n, -s);
  // f(x) = x^-s from n to infinity: integral + f(n)/2 - sum B2k/(2k)! f^(2k-1)(n)
  double tail = n * ns / (s - 1.0) + 0.5 * ns;
  tail += s / 12.0 * ns / n;
  tail -= s * (s + 1) * (s + 2) / 720.0 * ns / (n * n * n);
  tail += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 30240.0 * ns / (n * n * n * n * n);
  return sum + tail;
}

double zeta_grid_argmax(std::size_t n, double sum_log, double lo, double hi, double step) {
  // ln zeta over the grid does not depend on the sample; keep the last grid.
  static std::mutex mutex;
  static std::tuple<double, double, double> cached_key;
  static std::vector<double> log_zeta;
  std::lock_guard lock(mutex);
  if (log_zeta.empty() || cached_key != std::make_tuple(lo, hi, step)) {
    const auto steps = static_cast<std::size_t>(std::llround((hi - lo) / step));
    log_zeta.resize(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
      log_zeta[i] = std::log(oracle_zeta(lo + static_cast<double>(i) * step));
    }
    cached_key = {lo, hi, step};
  }
  double best_s = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_zeta.size(); ++i) {
    const double s = lo + static_cast<double>(i) * step;
    const double value = -static_cast<double>(n) * log_zeta[i] - s * sum_log;
    if (value > best) {
      best = value;
      best_s = s;
    }
  }
  return best_s;
}

namespace {

double term(double c, double theta) {
  if (c == 0.0) return 0.0;
  if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
  return c * std::log(theta);
}

// Best objective over theta[k..] given that they share mass; fills theta.
double nested_max(const std::vector<double>& c, std::size_t k, double mass,
                  std::vector<double>& theta) {
  if (k + 1 == c.size()) {
    theta[k] = mass;
    return term(c[k], mass);
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    std::vector<double> scratch = theta;
    scratch[k] = x;
    return term(c[k], x) + nested_max(c, k + 1, mass - x, scratch);
  };
  double a = 0.0;
  double b = mass;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    }
  }
  const double x = 0.5 * (a + b);
  theta[k] = x;
  return term(c[k], x) + nested_max(c, k + 1, mass - x, theta);
}

}  // namespace

std::vector<double> simplex_argmax(const std::vector<double>& coefficients) {
  std::vector<double> theta(coefficients.size(), 0.0);
  nested_max(coefficients, 0, 1.0, theta);
  return theta;
}

std::vector<bool> reference_hits(const std::vector<std::uint32_t>& objects, std::size_t capacity,
                                 CachePolicy policy) {
  struct Slot {
    std::uint32_t object;
    std::uint64_t count;
    std::size_t last_use;
  };
  std::vector<Slot> cache;
  std::vector<bool> hits;
  for (std::size_t step = 0; step < objects.size(); ++step) {
    const auto object = objects[step];
    auto it = std::find_if(cache.begin(), cache.end(), [&](const Slot& s) { return s.object == object; });
    if (it != cache.end()) {
      hits.push_back(true);
      it->count++;
      it->last_use = step;
      continue;
    }
    hits.push_back(false);
    if (cache.size() == capacity) {
      std::size_t victim = 0;
      for (std::size_t i = 1; i < cache.size(); ++i) {
        const bool older = cache[i].last_use < cache[victim].last_use;
        if (policy == CachePolicy::LRU) {
          if (older) victim = i;
        } else if (cache[i].count < cache[victim].count ||
                   (cache[i].count == cache[victim].count && older)) {
          victim = i;
        }
      }
      cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    cache.push_back({object, 1, step});
  }
  return hits;
}

CacheCheck cache_reference_sweep(std::uint64_t seed, std::size_t traces) {
  Rng rng(seed);
  CacheCheck check;
  for (std::size_t t = 0; t < traces; ++t) {
    const std::size_t n = 1 + rng.next_u64() % 1000;
    const std::size_t universe = 1 + rng.next_u64() % 120;
    // skewed popularity so both hits and evictions are common
    std::vector<double> weights;
    for (std::size_t i = 0; i < universe; ++i) weights.push_back(1.0 / std::pow(i + 1.0, 0.9));
    const auto popularity = CategoricalParams::from_weights(weights);
    std::vector<std::string> paths;
    for (std::size_t i = 0; i < n; ++i) {
      paths.push_back("/o" + std::to_string(sample_categorical(rng, popularity)));
    }
    const auto objects = intern_paths(paths);
    const std::size_t distinct = *std::max_element(objects.begin(), objects.end()) + 1;
    for (auto policy : {CachePolicy::LFU, CachePolicy::LRU}) {
      double previous = -1.0;
      for (std::size_t capacity = 1; capacity <= 50; ++capacity) {
        const auto hits = simulate_hits(objects, capacity, policy);
        if (hits != reference_hits(objects, capacity, policy)) ++check.sequence_mismatches;
        const double rate = simulate(objects, capacity, policy).hit_rate();
        if (policy == CachePolicy::LRU && rate < previous) ++check.lru_monotonicity_violations;
        previous = rate;
        if (capacity >= distinct) {
          const double expected = 1.0 - static_cast<double>(distinct) / static_cast<double>(n);
          if (std::abs(rate - expected) > 1e-12) ++check.compulsory_only_mismatches;
        }
      }
    }
    ++check.traces;
  }
  return check;
}

OracleResult zeta_oracle_sweep(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  OracleResult result;
  while (result.checked < samples) {
    const std::size_t n = 3 + rng.next_u64() % 28;
    const double s = 1.5 + 2.5 * rng.uniform();
    std::vector<std::uint64_t> xs(n);
    for (auto& x : xs) x = sample_zeta(rng, {s});
    if (std::all_of(xs.begin(), xs.end(), [](auto x) { return x == 1; })) continue;
    double sum_log = 0.0;
    for (auto x : xs) sum_log += std::log(static_cast<double>(x));
    const double error = std::abs(fit_zeta(xs).s - zeta_grid_argmax(n, sum_log));
    result.max_error = std::max(result.max_error, error);
    ++result.checked;
  }
  return result;
}

namespace {

double max_component_error(const CategoricalParams& fitted, const std::vector<double>& prior,
                           const std::vector<std::uint64_t>& counts) {
  // log posterior up to a constant: sum (prior_i + counts_i - 1) ln theta_i
  std::vector<double> coefficients;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    coefficients.push_back(prior[i] + static_cast<double>(counts[i]) - 1.0);
  }
  const auto best = simplex_argmax(coefficients);
  double error = 0.0;
  for (std::size_t i = 0; i < best.size(); ++i) {
    error = std::max(error, std::abs(best[i] - fitted.probs[i]));
  }
  return error;
}

bool clamps(const std::vector<double>& prior, const std::vector<std::uint64_t>& counts) {
  double total = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double numerator = prior[i] + static_cast<double>(counts[i]) - 1.0;
    if (numerator < 0.0) return true;
    total += numerator;
  }
  return total <= 0.0;
}

}  // namespace

OracleResult map_oracle_sweep(std::uint64_t seed, std::size_t trials) {
  Rng rng(seed);
  OracleResult result;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t k = 1 + rng.next_u64() % 3;
    DirichletHyperparams hyper;
    std::vector<std::uint64_t> type_counts(k, 0);
    std::vector<std::vector<std::uint64_t>> resource_counts(k);
    std::vector<double> type_weights(k);
    for (auto& w : type_weights) w = 0.1 + rng.uniform();
    const double alpha = 0.5 + 20.0 * rng.uniform();
    const double weight_total = std::accumulate(type_weights.begin(), type_weights.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      hyper.alpha.push_back(alpha * type_weights[j] / weight_total);
      const std::size_t r = 1 + rng.next_u64() % 4;
      const double gamma = 0.5 + 20.0 * rng.uniform();
      std::vector<double> weights(r);
      for (auto& w : weights) w = 0.1 + rng.uniform();
      const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      std::vector<double> g;
      for (double w : weights) g.push_back(gamma * w / total);
      hyper.gamma.push_back(g);
      for (std::size_t l = 0; l < r; ++l) {
        resource_counts[j].push_back(rng.next_u64() % 8);
        type_counts[j] += resource_counts[j].back();
      }
    }
    const auto fitted = fit_map(type_counts, resource_counts, hyper);
    if (!clamps(hyper.alpha, type_counts)) {
      result.max_error = std::max(result.max_error,
                                  max_component_error(fitted.theta, hyper.alpha, type_counts));
      ++result.checked;
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (clamps(hyper.gamma[j], resource_counts[j])) continue;
      result.max_error =
          std::max(result.max_error, max_component_error(fitted.resource_probs[j], hyper.gamma[j],
                                                         resource_counts[j]));
      ++result.checked;
    }
  }
  return result;
}

}  // namespace webbot::testing
