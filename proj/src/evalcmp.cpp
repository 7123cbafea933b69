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

#include "webbot/evalcmp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"

#include "webbot/csv.hpp"
#include "webbot/error.hpp"
#include "webbot/ingest.hpp"
#include "webbot/model.hpp"

namespace webbot {

using Json = nlohmann::ordered_json;

std::vector<double> extract_inter_session_times(std::span<const Session> sessions) {
  if (sessions.size() < 2) {
    fail(ErrorKind::TooFewSessions, "inter-session times need at least two sessions");
  }
  std::vector<double> starts;
  starts.reserve(sessions.size());
  for (const auto& session : sessions) starts.push_back(session.start_time);
  std::sort(starts.begin(), starts.end());
  std::vector<double> gaps;
  gaps.reserve(starts.size() - 1);
  for (std::size_t i = 1; i < starts.size(); ++i) gaps.push_back(starts[i] - starts[i - 1]);
  return gaps;
}

std::vector<double> extract_intra_session_iats(std::span<const Session> sessions) {
  std::vector<double> gaps;
  for (const auto& session : sessions) {
    for (std::size_t i = 1; i < session.requests.size(); ++i) {
      gaps.push_back(session.requests[i].time - session.requests[i - 1].time);
    }
  }
  return gaps;
}

std::vector<PmfPoint> session_length_pmf(std::span<const Session> sessions) {
  if (sessions.empty()) fail(ErrorKind::EmptyInput, "session length pmf needs sessions");
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto& session : sessions) ++counts[session.length];
  std::vector<PmfPoint> pmf;
  const double n = static_cast<double>(sessions.size());
  for (const auto& [k, count] : counts) pmf.push_back({k, static_cast<double>(count) / n});
  return pmf;
}

double CurvePair::max_abs_gap() const {
  double gap = 0.0;
  for (std::size_t i = 0; i < original.points.size() && i < generated.points.size(); ++i) {
    gap = std::max(gap, std::abs(original.points[i].hit_rate - generated.points[i].hit_rate));
  }
  return gap;
}

const ComparisonReport& ComparisonResult::report(const std::string& metric) const {
  for (const auto& r : reports) {
    if (r.metric_name == metric) return r;
  }
  fail(ErrorKind::InvalidParams, "no comparison report named '" + metric + "'");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FittedParams fit_exponential_gaps(const std::vector<double>& gaps) {
  double total = 0.0;
  for (double g : gaps) total += g;
  if (gaps.empty() || !(total > 0.0)) return std::monostate{};
  return fit_poisson_rate(gaps.size(), total);
}

FittedParams fit_positive_lognormal(const std::vector<double>& gaps) {
  std::vector<double> positive;
  for (double g : gaps) {
    if (g > 0.0) positive.push_back(g);
  }
  if (positive.size() < 2) return std::monostate{};
  return fit_lognormal(positive);
}

FittedParams fit_lengths(const std::vector<double>& lengths) {
  std::vector<std::uint64_t> ks(lengths.begin(), lengths.end());
  if (ks.empty() || std::all_of(ks.begin(), ks.end(), [](std::uint64_t k) { return k == 1; })) {
    return std::monostate{};
  }
  return fit_zeta(ks);
}

/// CDF of a fitted family at x, NaN when nothing was fitted.
double fitted_cdf(const FittedParams& params, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return kNaN;
        } else if constexpr (std::is_same_v<T, ZetaParams>) {
          return zeta_cdf(x, p);
        } else {
          return p.cdf(x);
        }
      },
      params);
}

double ks_against_fit(const std::vector<double>& samples, const FittedParams& params) {
  if (samples.empty() || std::holds_alternative<std::monostate>(params)) return kNaN;
  if (const auto* zeta = std::get_if<ZetaParams>(&params)) {
    std::vector<std::uint64_t> ks(samples.begin(), samples.end());
    return ks_statistic_discrete(ks, [&](std::uint64_t k) { return zeta_cdf(static_cast<double>(k), *zeta); });
  }
  return ks_statistic(samples, [&](double x) { return fitted_cdf(params, x); });
}

double ks_between(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return 1.0;
  return ks_two_sample(a, b);
}

ComparisonReport make_report(std::string name, std::vector<double> original,
                             std::vector<double> generated,
                             FittedParams (*fit)(const std::vector<double>&)) {
  ComparisonReport report;
  report.metric_name = std::move(name);
  report.fitted_original = fit(original);
  report.fitted_generated = fit(generated);
  report.ks_original_vs_fit = ks_against_fit(original, report.fitted_original);
  report.ks_generated_vs_fit = ks_against_fit(generated, report.fitted_generated);
  report.ks_original_vs_generated = ks_between(original, generated);
  report.original = std::move(original);
  report.generated = std::move(generated);
  return report;
}

std::vector<double> lengths_of(const std::vector<Session>& sessions) {
  std::vector<double> lengths;
  lengths.reserve(sessions.size());
  for (const auto& s : sessions) lengths.push_back(static_cast<double>(s.length));
  return lengths;
}

std::vector<double> inter_session_or_empty(const std::vector<Session>& sessions) {
  if (sessions.size() < 2) return {};
  return extract_inter_session_times(sessions);
}

std::size_t distinct_paths(const Trace& trace) {
  std::set<std::string_view> paths;
  for (const auto& r : trace.requests) paths.insert(r.path);
  return paths.size();
}

std::vector<std::string> paths_of(const Trace& trace) {
  std::vector<std::string> paths;
  paths.reserve(trace.requests.size());
  for (const auto& r : trace.requests) paths.push_back(r.path);
  return paths;
}

Json params_json(const FittedParams& params) {
  return std::visit(
      [](const auto& p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, ExponentialParams>) {
          return {{"family", "exponential"}, {"lambda", p.lambda}};
        } else if constexpr (std::is_same_v<T, LognormalParams>) {
          return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
        } else {
          return {{"family", "zeta"}, {"s", p.s}};
        }
      },
      params);
}

Json number_or_null(double value) { return std::isnan(value) ? Json(nullptr) : Json(value); }

std::string cell(double value) { return std::isnan(value) ? std::string() : format_fixed(value, 9); }

void write_cdf_csv(const ComparisonReport& report, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail(ErrorKind::Io, "cannot write " + file.string());
  out << "x,cdf_original,cdf_generated,cdf_fit_original,cdf_fit_generated\n";
  std::vector<double> grid = report.original;
  grid.insert(grid.end(), report.generated.begin(), report.generated.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> a = report.original, b = report.generated;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  auto ecdf = [](const std::vector<double>& sorted, double x) {
    if (sorted.empty()) return kNaN;
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
           static_cast<double>(sorted.size());
  };
  for (double x : grid) {
    out << format_fixed(x, 6) << ',' << cell(ecdf(a, x)) << ',' << cell(ecdf(b, x)) << ','
        << cell(fitted_cdf(report.fitted_original, x)) << ','
        << cell(fitted_cdf(report.fitted_generated, x)) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + file.string());
}

void write_pmf_csv(const ComparisonReport& report, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail(ErrorKind::Io, "cannot write " + file.string());
  out << "k,pmf_original,pmf_generated,pmf_fit_original,pmf_fit_generated\n";
  auto masses = [](const std::vector<double>& lengths) {
    std::map<std::uint64_t, std::uint64_t> counts;
    for (double k : lengths) ++counts[static_cast<std::uint64_t>(k)];
    std::map<std::uint64_t, double> mass;
    for (const auto& [k, count] : counts) {
      mass[k] = static_cast<double>(count) / static_cast<double>(lengths.size());
    }
    return mass;
  };
  const auto a = masses(report.original);
  const auto b = masses(report.generated);
  std::set<std::uint64_t> ks;
  for (const auto& [k, p] : a) ks.insert(k);
  for (const auto& [k, p] : b) ks.insert(k);
  auto fit_mass = [](const FittedParams& params, std::uint64_t k) {
    const auto* zeta = std::get_if<ZetaParams>(&params);
    if (zeta == nullptr) return kNaN;
    return std::pow(static_cast<double>(k), -zeta->s) / riemann_zeta(zeta->s);
  };
  auto lookup = [](const std::map<std::uint64_t, double>& mass, std::uint64_t k) {
    const auto it = mass.find(k);
    return it == mass.end() ? 0.0 : it->second;
  };
  for (std::uint64_t k : ks) {
    out << k << ',' << cell(lookup(a, k)) << ',' << cell(lookup(b, k)) << ','
        << cell(fit_mass(report.fitted_original, k)) << ','
        << cell(fit_mass(report.fitted_generated, k)) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + file.string());
}

}  // namespace

ComparisonResult compare(const Trace& original, const Trace& generated,
                         const CompareOptions& options) {
  if (original.requests.empty() || generated.requests.empty()) {
    fail(ErrorKind::EmptyTrace, "both traces must contain requests");
  }
  const auto original_sessions = sessionize(original.requests, options.session_timeout);
  const auto generated_sessions = sessionize(generated.requests, options.session_timeout);

  ComparisonResult result;
  result.reports.push_back(make_report("inter_session_times",
                                       inter_session_or_empty(original_sessions),
                                       inter_session_or_empty(generated_sessions),
                                       fit_exponential_gaps));
  result.reports.push_back(make_report("intra_session_iats",
                                       extract_intra_session_iats(original_sessions),
                                       extract_intra_session_iats(generated_sessions),
                                       fit_positive_lognormal));
  result.reports.push_back(make_report("session_lengths", lengths_of(original_sessions),
                                       lengths_of(generated_sessions), fit_lengths));

  result.capacities = options.capacities;
  if (result.capacities.empty()) {
    result.capacities =
        default_capacity_grid(std::max(distinct_paths(original), distinct_paths(generated)));
  }
  validate_capacity_grid(result.capacities);
  const auto original_paths = paths_of(original);
  const auto generated_paths = paths_of(generated);
  for (CachePolicy policy : options.policies) {
    result.curves.push_back(CurvePair{
        sweep(original_paths, result.capacities, policy, options.threads),
        sweep(generated_paths, result.capacities, policy, options.threads)});
  }
  return result;
}

std::string summary_json(const ComparisonResult& result) {
  Json metrics = Json::object();
  for (const auto& report : result.reports) {
    metrics[report.metric_name] = {
        {"n_original", report.original.size()},
        {"n_generated", report.generated.size()},
        {"fitted_original", params_json(report.fitted_original)},
        {"fitted_generated", params_json(report.fitted_generated)},
        {"ks_original_vs_fit", number_or_null(report.ks_original_vs_fit)},
        {"ks_generated_vs_fit", number_or_null(report.ks_generated_vs_fit)},
        {"ks_original_vs_generated", number_or_null(report.ks_original_vs_generated)},
    };
  }
  Json cache = Json::object();
  for (const auto& pair : result.curves) {
    Json original = Json::array(), generated = Json::array();
    for (const auto& p : pair.original.points) original.push_back(p.hit_rate);
    for (const auto& p : pair.generated.points) generated.push_back(p.hit_rate);
    cache[to_string(pair.original.policy)] = {{"max_abs_gap", pair.max_abs_gap()},
                                              {"hit_rate_original", std::move(original)},
                                              {"hit_rate_generated", std::move(generated)}};
  }
  Json j;
  j["metrics"] = std::move(metrics);
  j["capacities"] = result.capacities;
  j["cache"] = std::move(cache);
  return j.dump(2);
}

void write_comparison(const ComparisonResult& result, const std::filesystem::path& directory,
                      const std::string& config_json) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + directory.string() + ": " + ec.message());

  write_cdf_csv(result.report("inter_session_times"), directory / "inter_session_times.csv");
  write_cdf_csv(result.report("intra_session_iats"), directory / "intra_session_iats.csv");
  write_pmf_csv(result.report("session_lengths"), directory / "session_lengths.csv");

  std::ofstream curves(directory / "cache_curves.csv");
  if (!curves) fail(ErrorKind::Io, "cannot write " + (directory / "cache_curves.csv").string());
  curves << "capacity,hit_rate,policy,trace_label\n";
  for (const auto& pair : result.curves) {
    const HitRateCurve both[] = {pair.original, pair.generated};
    const std::string labels[] = {"original", "generated"};
    write_curve_csv(curves, both, labels, false);
  }

  Json summary = Json::parse(summary_json(result));
  Json out;
  out["tool_version"] = kToolVersion;
  out["config"] = Json::parse(config_json);
  for (auto it = summary.begin(); it != summary.end(); ++it) out[it.key()] = it.value();
  std::ofstream file(directory / "summary.json");
  if (!file) fail(ErrorKind::Io, "cannot write " + (directory / "summary.json").string());
  file << out.dump(2) << '\n';
}

}  // namespace webbot
