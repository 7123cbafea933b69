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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "webbot/cache_sim.hpp"
#include "webbot/error.hpp"
#include "webbot/evalcmp.hpp"
#include "webbot/generator.hpp"
#include "webbot/ingest.hpp"
#include "webbot/model.hpp"
#include "webbot/trace_io.hpp"

namespace webbot::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Reads CLI11 configuration from JSON. Nested objects name subcommands:
/// {"fit": {"timeout": 600}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json root;
    try {
      root = Json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(root, {}, items);
    return items;
  }

 private:
  static std::string scalar(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
  }

  static void collect(const Json& object, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = object.begin(); it != object.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& element : *it) item.inputs.push_back(scalar(element));
      } else {
        item.inputs.push_back(scalar(*it));
      }
      items.push_back(std::move(item));
    }
  }
};

/// Failure at a named pipeline stage, carrying the exit code to return.
struct StageError {
  int code;
  std::string stage;
  std::string message;
};

[[noreturn]] void stage_fail(int code, std::string stage, std::string message) {
  throw StageError{code, std::move(stage), std::move(message)};
}

std::string hex64(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << value;
  return out.str();
}

struct CommonOptions {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

struct LogInputOptions {
  std::string format = "combined";
  std::string ua_db;
  double timeout = kDefaultSessionTimeout;
  std::string agent_mode = "ua+ip";
};

Json log_input_json(const LogInputOptions& o) {
  return {{"format", o.format},
          {"ua_db", o.ua_db.empty() ? Json(nullptr) : Json(o.ua_db)},
          {"timeout", o.timeout},
          {"agent_mode", to_string(parse_agent_mode(o.agent_mode))}};
}

void add_log_input_options(CLI::App& cmd, LogInputOptions& o, bool ua_db_required) {
  cmd.add_option("--format", o.format, "Access log format: common or combined")
      ->check(CLI::IsMember({"common", "combined"}))
      ->capture_default_str();
  auto* db = cmd.add_option("--ua-db", o.ua_db,
                            "Robot User-Agent substrings, one per line ('#' comments)");
  if (ua_db_required) db->required();
  cmd.add_option("--timeout", o.timeout, "Session timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--agent-mode", o.agent_mode, "Agent identity: ua, ip or ua+ip")
      ->check(CLI::IsMember({"ua", "ip", "ua+ip"}))
      ->capture_default_str();
}

/// Log files -> robot requests. Filters by the UA database when one is given.
std::vector<Request> load_log_requests(const std::vector<std::string>& inputs,
                                       const LogInputOptions& o, std::ostream& err,
                                       bool require_robots, int empty_code) {
  std::vector<RawLogEntry> entries;
  std::uint64_t malformed = 0;
  try {
    for (const auto& input : inputs) {
      auto result = read_log_file(input, parse_log_format(o.format));
      malformed += result.malformed_lines;
      entries.insert(entries.end(), std::make_move_iterator(result.entries.begin()),
                     std::make_move_iterator(result.entries.end()));
    }
  } catch (const Error& e) {
    stage_fail(kExitIo, "read-log", e.what());
  }
  if (malformed > 0) err << "webbot: skipped " << malformed << " malformed log line(s)\n";
  if (!o.ua_db.empty()) {
    std::optional<UserAgentDatabase> db;
    try {
      db.emplace(read_user_agent_database(o.ua_db));
    } catch (const Error& e) {
      stage_fail(kExitIo, "ua-db", e.what());
    }
    entries = filter_robots(entries, *db);
  }
  auto requests = to_requests(entries, parse_agent_mode(o.agent_mode));
  if (requests.empty() && require_robots) {
    stage_fail(empty_code, "filter",
               o.ua_db.empty() ? "no requests in input" : "no robot traffic after filtering");
  }
  return requests;
}

bool is_trace_csv(const std::string& path, const std::string& format) {
  if (format == "csv") return true;
  if (format != "auto") return false;
  const fs::path p(path);
  if (p.extension() == ".csv") return true;
  return p.extension() == ".gz" && p.stem().extension() == ".csv";
}

Trace load_trace(const std::string& path, const std::string& format, const LogInputOptions& o,
                 std::ostream& err) {
  if (!fs::exists(path)) stage_fail(kExitIo, "read-trace", "no such file: " + path);
  if (is_trace_csv(path, format)) {
    try {
      return read_trace_csv_file(path);
    } catch (const Error& e) {
      stage_fail(kExitIo, "read-trace", path + ": " + e.what());
    }
  }
  LogInputOptions log = o;
  if (format == "common" || format == "combined") log.format = format;
  Trace trace{load_log_requests({path}, log, err, false, kExitInput), TraceOrigin::Observed};
  sort_by_time(trace.requests);
  return trace;
}

void write_output(const std::string& path, const std::string& contents, const std::string& stage) {
  try {
    write_file(path, contents);
  } catch (const Error& e) {
    stage_fail(kExitIo, stage, e.what());
  }
}

std::vector<std::uint64_t> capacity_grid(const std::vector<std::uint64_t>& requested,
                                         std::size_t points, std::uint64_t distinct) {
  std::vector<std::uint64_t> grid = requested.empty() ? default_capacity_grid(distinct, points) : requested;
  try {
    validate_capacity_grid(grid);
  } catch (const Error& e) {
    stage_fail(kExitInput, "capacity-grid", e.what());
  }
  return grid;
}

// fit ------------------------------------------------------------------------

struct FitOptions {
  std::vector<std::string> inputs;
  LogInputOptions log;
  double alpha = 1.0;
  double gamma = 1.0;
  std::string prior_mode = "constant";
  std::optional<std::uint64_t> pool_size;
  std::string output;
};

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  auto requests = load_log_requests(o.inputs, o.log, err, true, kExitFit);

  FitConfig config;
  config.session_timeout = o.log.timeout;
  config.agent_mode = parse_agent_mode(o.log.agent_mode);
  config.prior = PriorConfig{parse_prior_strength_mode(o.prior_mode), o.alpha, o.gamma};
  config.pool_size_override = o.pool_size;

  sort_by_time(requests);
  const SummaryStats stats = summarize(sessionize(requests, config.session_timeout));

  FittedModel model;
  try {
    model = fit_model(std::move(requests), config);
  } catch (const Error& e) {
    stage_fail(kExitFit, "fit", std::string(to_string(e.kind())) + ": " + e.what());
  }
  const std::string text = to_json(model);
  write_output(o.output, text, "write-model");

  Json meta;
  meta["tool_version"] = kToolVersion;
  meta["command"] = "fit";
  meta["seed"] = nullptr;
  meta["config"] = {{"inputs", o.inputs},
                    {"log", log_input_json(o.log)},
                    {"alpha", o.alpha},
                    {"gamma", o.gamma},
                    {"prior_mode", o.prior_mode},
                    {"pool_size", o.pool_size ? Json(*o.pool_size) : Json(nullptr)},
                    {"output", o.output}};
  meta["model_hash_fnv1a64"] = hex64(fnv1a64(text));
  write_output(o.output + ".meta.json", meta.dump(2) + "\n", "write-model");

  out << to_json(stats) << '\n';
  return kExitOk;
}

// generate -------------------------------------------------------------------

struct GenerateOptions {
  std::string model;
  std::optional<std::uint64_t> requests;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string clf_output;
  std::uint64_t max_session_length = kDefaultMaxSessionLength;
};

int cmd_generate(const GenerateOptions& o, std::ostream&, std::ostream& err) {
  std::string text;
  try {
    text = read_file(o.model);
  } catch (const Error& e) {
    stage_fail(kExitIo, "read-model", e.what());
  }
  FittedModel model;
  try {
    model = model_from_json(text);
  } catch (const Error& e) {
    stage_fail(kExitModel, "load-model", e.what());
  }
  std::optional<StopCondition> stop;
  try {
    stop = o.requests ? StopCondition::request_count(*o.requests)
                      : StopCondition::time_horizon(*o.horizon);
  } catch (const Error& e) {
    stage_fail(kExitUsage, "stop-condition", e.what());
  }

  GeneratedTrace trace;
  try {
    trace = generate(model, *stop, *o.seed, GeneratorOptions{o.max_session_length});
  } catch (const Error& e) {
    stage_fail(e.kind() == ErrorKind::InvalidModel ? kExitModel : kExitFit, "generate", e.what());
  }
  if (trace.capped_sessions > 0) {
    err << "webbot: " << trace.capped_sessions << " session length(s) capped at "
        << o.max_session_length << '\n';
  }

  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_output(o.output, csv.str(), "write-trace");
  if (!o.clf_output.empty()) {
    std::ostringstream clf;
    write_combined_log(clf, trace);
    write_output(o.clf_output, clf.str(), "write-log");
  }

  Json meta;
  meta["tool_version"] = kToolVersion;
  meta["command"] = "generate";
  meta["seed"] = *o.seed;
  meta["model_hash_fnv1a64"] = hex64(fnv1a64(text));
  meta["config"] = {{"model", o.model},
                    {"requests", o.requests ? Json(*o.requests) : Json(nullptr)},
                    {"horizon", o.horizon ? Json(*o.horizon) : Json(nullptr)},
                    {"max_session_length", o.max_session_length},
                    {"output", o.output},
                    {"clf_output", o.clf_output.empty() ? Json(nullptr) : Json(o.clf_output)}};
  meta["num_requests"] = trace.requests.size();
  meta["sessions_started"] = trace.sessions_started;
  meta["capped_sessions"] = trace.capped_sessions;
  meta["truncated_sessions"] = trace.truncated_sessions;
  write_output(o.output + ".meta.json", meta.dump(2) + "\n", "write-trace");
  return kExitOk;
}

// summarize ------------------------------------------------------------------

struct SummarizeOptions {
  std::vector<std::string> inputs;
  LogInputOptions log;
  std::string output;
};

int cmd_summarize(const SummarizeOptions& o, std::ostream& out, std::ostream& err) {
  auto requests = load_log_requests(o.inputs, o.log, err, false, kExitInput);
  sort_by_time(requests);
  const auto stats = summarize(sessionize(requests, o.log.timeout));
  const std::string text = to_json(stats) + "\n";
  if (o.output.empty()) {
    out << text;
  } else {
    write_output(o.output, text, "write-summary");
  }
  return kExitOk;
}

// cache-sim ------------------------------------------------------------------

struct CacheSimOptions {
  std::string input;
  std::string input_format = "auto";
  LogInputOptions log;
  std::string policy = "both";
  std::vector<std::uint64_t> capacities;
  std::size_t points = 16;
  std::string label;
  std::string output;
};

int cmd_cache_sim(const CacheSimOptions& o, const CommonOptions& common, std::ostream& out,
                  std::ostream& err) {
  const Trace trace = load_trace(o.input, o.input_format, o.log, err);
  if (trace.requests.empty()) stage_fail(kExitInput, "cache-sim", "trace is empty");

  std::vector<std::string> paths;
  paths.reserve(trace.requests.size());
  for (const auto& r : trace.requests) paths.push_back(r.path);
  std::vector<std::string> distinct = paths;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto grid = capacity_grid(o.capacities, o.points, distinct.size());

  std::vector<CachePolicy> policies;
  if (o.policy == "both") policies = {CachePolicy::LFU, CachePolicy::LRU};
  else policies = {parse_cache_policy(o.policy)};

  std::vector<HitRateCurve> curves;
  for (CachePolicy policy : policies) curves.push_back(sweep(paths, grid, policy, common.threads));
  const std::string label = o.label.empty() ? fs::path(o.input).filename().string() : o.label;
  const std::vector<std::string> labels(curves.size(), label);

  std::ostringstream csv;
  write_curve_csv(csv, curves, labels);
  if (o.output.empty()) {
    out << csv.str();
    return kExitOk;
  }
  write_output(o.output, csv.str(), "write-curve");
  Json meta;
  meta["tool_version"] = kToolVersion;
  meta["command"] = "cache-sim";
  meta["seed"] = nullptr;
  meta["config"] = {{"input", o.input},     {"input_format", o.input_format},
                    {"log", log_input_json(o.log)}, {"policy", o.policy},
                    {"capacities", grid},   {"label", label}};
  write_output(o.output + ".meta.json", meta.dump(2) + "\n", "write-curve");
  return kExitOk;
}

// compare --------------------------------------------------------------------

struct CompareCliOptions {
  std::string original;
  std::string generated;
  std::string original_format = "auto";
  std::string generated_format = "auto";
  LogInputOptions log;
  std::vector<std::uint64_t> capacities;
  std::string output_dir;
};

int cmd_compare(const CompareCliOptions& o, const CommonOptions& common, std::ostream& out,
                std::ostream& err) {
  const Trace original = load_trace(o.original, o.original_format, o.log, err);
  const Trace generated = load_trace(o.generated, o.generated_format, o.log, err);

  CompareOptions options;
  options.session_timeout = o.log.timeout;
  options.capacities = o.capacities;
  options.threads = common.threads;

  ComparisonResult result;
  try {
    result = compare(original, generated, options);
  } catch (const Error& e) {
    stage_fail(kExitInput, "compare", e.what());
  }

  const Json config = {{"original", o.original},
                       {"generated", o.generated},
                       {"original_format", o.original_format},
                       {"generated_format", o.generated_format},
                       {"log", log_input_json(o.log)},
                       {"capacities", result.capacities},
                       {"seed", nullptr}};
  try {
    write_comparison(result, o.output_dir, config.dump());
  } catch (const Error& e) {
    stage_fail(kExitIo, "write-report", e.what());
  }
  for (const auto& report : result.reports) {
    out << report.metric_name << " ks_original_vs_generated="
        << format_fixed(report.ks_original_vs_generated, 6) << '\n';
  }
  for (const auto& pair : result.curves) {
    out << "cache_" << to_string(pair.original.policy)
        << " max_abs_gap=" << format_fixed(pair.max_abs_gap(), 6) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit, generate and evaluate synthetic web-robot traffic", "webbot"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");
  app.set_version_flag("--version", kToolVersion);

  CommonOptions common;
  app.add_option("--threads", common.threads, "Worker threads for parallel sections")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a traffic model from access logs");
  fit_cmd->add_option("--input,-i", fit.inputs, "Access log file(s); .gz accepted")->required();
  add_log_input_options(*fit_cmd, fit.log, true);
  fit_cmd->add_option("--alpha", fit.alpha, "Type prior strength")->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--gamma", fit.gamma, "Resource prior strength")->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--prior-mode", fit.prior_mode, "constant or data-scaled prior strengths")
      ->check(CLI::IsMember({"constant", "data-scaled"}))
      ->capture_default_str();
  fit_cmd->add_option("--pool-size", fit.pool_size, "Override the estimated active pool size")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--output,-o", fit.output, "Model JSON to write")->required();

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a synthetic robot trace");
  gen_cmd->add_option("--model,-m", gen.model, "Fitted model JSON")->required();
  auto* requests_opt = gen_cmd->add_option("--requests", gen.requests, "Stop after this many requests")
                           ->check(CLI::PositiveNumber);
  auto* horizon_opt = gen_cmd->add_option("--horizon", gen.horizon, "Stop at this time (seconds)")
                          ->check(CLI::PositiveNumber);
  requests_opt->excludes(horizon_opt);
  horizon_opt->excludes(requests_opt);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--output,-o", gen.output, "Trace CSV to write")->required();
  gen_cmd->add_option("--clf-output", gen.clf_output, "Also write Combined Log Format lines");
  gen_cmd->add_option("--max-session-length", gen.max_session_length, "Cap on drawn session lengths")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SummarizeOptions sum;
  auto* sum_cmd = app.add_subcommand("summarize", "Summary statistics of robot traffic in logs");
  sum_cmd->add_option("--input,-i", sum.inputs, "Access log file(s)")->required();
  add_log_input_options(*sum_cmd, sum.log, false);
  sum_cmd->add_option("--output,-o", sum.output, "JSON file to write (default stdout)");

  CacheSimOptions cache;
  auto* cache_cmd = app.add_subcommand("cache-sim", "Hit-rate curves under LFU/LRU eviction");
  cache_cmd->add_option("--input,-i", cache.input, "Trace CSV or access log")->required();
  cache_cmd->add_option("--input-format", cache.input_format, "auto, csv, common or combined")
      ->check(CLI::IsMember({"auto", "csv", "common", "combined"}))
      ->capture_default_str();
  add_log_input_options(*cache_cmd, cache.log, false);
  cache_cmd->add_option("--policy", cache.policy, "lfu, lru or both")
      ->check(CLI::IsMember({"lfu", "lru", "both"}))
      ->capture_default_str();
  cache_cmd->add_option("--capacities", cache.capacities, "Strictly increasing capacities")->delimiter(',');
  cache_cmd->add_option("--points", cache.points, "Default grid size")->check(CLI::PositiveNumber)->capture_default_str();
  cache_cmd->add_option("--label", cache.label, "trace_label column value");
  cache_cmd->add_option("--output,-o", cache.output, "Curve CSV to write (default stdout)");

  CompareCliOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare an original and a generated trace");
  cmp_cmd->add_option("--original", cmp.original, "Original trace (CSV or access log)")->required();
  cmp_cmd->add_option("--generated", cmp.generated, "Generated trace (CSV or access log)")->required();
  cmp_cmd->add_option("--original-format", cmp.original_format, "auto, csv, common or combined")
      ->check(CLI::IsMember({"auto", "csv", "common", "combined"}))
      ->capture_default_str();
  cmp_cmd->add_option("--generated-format", cmp.generated_format, "auto, csv, common or combined")
      ->check(CLI::IsMember({"auto", "csv", "common", "combined"}))
      ->capture_default_str();
  add_log_input_options(*cmp_cmd, cmp.log, false);
  cmp_cmd->add_option("--capacities", cmp.capacities, "Shared capacity grid")->delimiter(',');
  cmp_cmd->add_option("--output-dir,-o", cmp.output_dir, "Directory for CSV and JSON reports")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "webbot: [config] " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "webbot: [usage] " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit, out, err);
    if (gen_cmd->parsed()) {
      if (!gen.requests && !gen.horizon) {
        err << "webbot: [usage] generate needs --requests or --horizon\n";
        return kExitUsage;
      }
      return cmd_generate(gen, out, err);
    }
    if (sum_cmd->parsed()) return cmd_summarize(sum, out, err);
    if (cache_cmd->parsed()) return cmd_cache_sim(cache, common, out, err);
    if (cmp_cmd->parsed()) return cmd_compare(cmp, common, out, err);
  } catch (const StageError& e) {
    err << "webbot: [" << e.stage << "] " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "webbot: [" << to_string(e.kind()) << "] " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? kExitIo : kExitUsage;
  }
  return kExitUsage;
}

}  // namespace webbot::cli
