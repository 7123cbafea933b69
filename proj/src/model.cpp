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

#include "webbot/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "json.hpp"

#include "webbot/error.hpp"
#include "webbot/evalcmp.hpp"
#include "webbot/generator.hpp"

namespace webbot {

using Json = nlohmann::ordered_json;

void FittedModel::validate() const {
  try {
    arrival.validate();
    session_length.validate();
    request_gap.validate();
    rho.validate();
  } catch (const Error& e) {
    fail(ErrorKind::InvalidModel, std::string("invalid model: ") + e.what());
  }
  if (robots.empty()) fail(ErrorKind::InvalidModel, "invalid model: no robots");
  if (rho.probs.size() != robots.size()) {
    fail(ErrorKind::InvalidModel, "invalid model: robot weights do not match the robot list");
  }
  if (pool_size < 1 || pool_size > robots.size()) {
    fail(ErrorKind::InvalidModel, "invalid model: pool size " + std::to_string(pool_size) +
                                      " outside [1, " + std::to_string(robots.size()) + "]");
  }
  if (paths.catalog().empty()) fail(ErrorKind::InvalidModel, "invalid model: empty catalog");
  if (paths.robot_count() != robots.size()) {
    fail(ErrorKind::InvalidModel, "invalid model: robot usage tables do not match the robot list");
  }
}

FittedModel fit_model(std::vector<Request> requests, const FitConfig& config) {
  if (requests.empty()) fail(ErrorKind::EmptyInput, "no robot requests to fit");
  sort_by_time(requests);
  const std::vector<Session> sessions = sessionize(requests, config.session_timeout);

  FittedModel model;
  model.config = config;
  auto& diag = model.diagnostics;
  diag.num_requests = requests.size();
  diag.num_sessions = sessions.size();
  diag.observation_window = requests.back().time - requests.front().time;

  model.arrival = fit_poisson_rate(sessions.size(), diag.observation_window);

  std::vector<std::uint64_t> lengths;
  lengths.reserve(sessions.size());
  for (const auto& session : sessions) lengths.push_back(session.length);
  model.session_length = fit_zeta(lengths);

  // Logs carry whole seconds, so zero gaps are common; the lognormal only
  // sees the positive ones.
  std::vector<double> gaps;
  for (double gap : extract_intra_session_iats(sessions)) {
    ++diag.num_gaps;
    if (gap > 0.0) gaps.push_back(gap);
    else ++diag.zero_gaps_excluded;
  }
  model.request_gap = fit_lognormal(gaps);

  std::map<std::string, std::pair<AgentId, std::uint64_t>> by_key;
  for (const auto& request : requests) {
    auto [it, inserted] = by_key.try_emplace(request.agent.key(), request.agent, 0);
    ++it->second.second;
  }
  std::unordered_map<std::string, std::size_t> robot_index;
  std::vector<double> weights;
  for (const auto& [key, entry] : by_key) {
    robot_index.emplace(key, model.robots.size());
    model.robots.push_back(entry.first);
    weights.push_back(static_cast<double>(entry.second));
  }
  model.rho = CategoricalParams::from_weights(weights);

  Trace trace{requests, TraceOrigin::Observed};
  ResourceCatalog catalog = build_catalog(trace);
  auto usage = tally_robot_usage(catalog, requests, model.robots.size(),
                                 [&](const Request& r) -> std::optional<std::size_t> {
                                   return robot_index.at(r.agent.key());
                                 });
  model.paths = PathModel(std::move(catalog), config.prior, std::move(usage));

  model.pool_size = config.pool_size_override.value_or(estimate_pool_size(sessions));
  model.validate();
  return model;
}

namespace {

Json optional_string(const std::optional<std::string>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::optional<std::string> read_optional_string(const Json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<std::string>();
}

}  // namespace

std::string to_json(const FittedModel& model) {
  Json j;
  j["schema"] = kModelSchema;
  j["tool_version"] = kToolVersion;
  j["arrival"] = {{"lambda", model.arrival.lambda}};
  j["session_length"] = {{"s", model.session_length.s}};
  j["request_gap"] = {{"mu", model.request_gap.mu}, {"sigma", model.request_gap.sigma}};
  j["pool_size"] = model.pool_size;

  Json robots = Json::array();
  for (std::size_t i = 0; i < model.robots.size(); ++i) {
    robots.push_back({{"user_agent", optional_string(model.robots[i].user_agent())},
                      {"ip", optional_string(model.robots[i].ip())},
                      {"rho", model.rho.probs[i]}});
  }
  j["robots"] = std::move(robots);

  const auto& catalog = model.paths.catalog();
  j["subdirectory_dist"] = model.paths.subdirectory_dist().probs.probs;
  Json subdirs = Json::array();
  for (const auto& subdir : catalog.subdirectories()) {
    Json types = Json::array();
    for (const auto& group : subdir.types) {
      Json resources = Json::array();
      for (const auto& resource : group.resources) {
        resources.push_back({{"path", resource.path}, {"count", resource.global_count}});
      }
      types.push_back({{"type", group.type}, {"resources", std::move(resources)}});
    }
    subdirs.push_back({{"subdirectory", subdir.name}, {"types", std::move(types)}});
  }
  j["catalog"] = std::move(subdirs);

  Json usage = Json::array();
  for (const auto& robot : model.paths.usage()) {
    Json entries = Json::array();
    for (const auto& [resource, count] : robot) entries.push_back(Json::array({resource, count}));
    usage.push_back(std::move(entries));
  }
  j["robot_usage"] = std::move(usage);

  const auto& prior = model.paths.prior();
  j["prior"] = {{"mode", to_string(prior.mode)}, {"alpha", prior.alpha}, {"gamma", prior.gamma}};
  j["fit_config"] = {
      {"session_timeout", model.config.session_timeout},
      {"agent_mode", to_string(model.config.agent_mode)},
      {"pool_size_override", model.config.pool_size_override
                                 ? Json(*model.config.pool_size_override)
                                 : Json(nullptr)},
  };
  const auto& d = model.diagnostics;
  j["diagnostics"] = {{"num_requests", d.num_requests},
                      {"num_sessions", d.num_sessions},
                      {"observation_window", d.observation_window},
                      {"num_gaps", d.num_gaps},
                      {"zero_gaps_excluded", d.zero_gaps_excluded}};
  return j.dump(1) + "\n";
}

FittedModel model_from_json(const std::string& text) {
  FittedModel model;
  try {
    const Json j = Json::parse(text);
    if (j.at("schema").get<std::string>() != kModelSchema) {
      fail(ErrorKind::InvalidModel, "unsupported model schema '" + j.at("schema").get<std::string>() + "'");
    }
    model.arrival.lambda = j.at("arrival").at("lambda").get<double>();
    model.session_length.s = j.at("session_length").at("s").get<double>();
    model.request_gap.mu = j.at("request_gap").at("mu").get<double>();
    model.request_gap.sigma = j.at("request_gap").at("sigma").get<double>();
    model.pool_size = j.at("pool_size").get<std::uint64_t>();

    const auto& cfg = j.at("fit_config");
    model.config.session_timeout = cfg.at("session_timeout").get<double>();
    model.config.agent_mode = parse_agent_mode(cfg.at("agent_mode").get<std::string>());
    if (!cfg.at("pool_size_override").is_null()) {
      model.config.pool_size_override = cfg.at("pool_size_override").get<std::uint64_t>();
    }

    for (const auto& robot : j.at("robots")) {
      model.robots.emplace_back(read_optional_string(robot.at("user_agent")),
                                read_optional_string(robot.at("ip")), model.config.agent_mode);
      model.rho.probs.push_back(robot.at("rho").get<double>());
    }

    std::vector<CatalogSubdirectory> subdirs;
    for (const auto& subdir : j.at("catalog")) {
      CatalogSubdirectory entry{subdir.at("subdirectory").get<std::string>(), {}};
      for (const auto& group : subdir.at("types")) {
        ResourceTypeGroup type{group.at("type").get<std::string>(), {}};
        for (const auto& resource : group.at("resources")) {
          type.resources.push_back(
              {resource.at("path").get<std::string>(), resource.at("count").get<std::uint64_t>()});
        }
        entry.types.push_back(std::move(type));
      }
      subdirs.push_back(std::move(entry));
    }

    std::vector<RobotUsage> usage;
    for (const auto& robot : j.at("robot_usage")) {
      RobotUsage entries;
      for (const auto& item : robot) {
        entries.emplace_back(item.at(0).get<std::size_t>(), item.at(1).get<std::uint64_t>());
      }
      usage.push_back(std::move(entries));
    }

    const auto& prior_json = j.at("prior");
    PriorConfig prior{parse_prior_strength_mode(prior_json.at("mode").get<std::string>()),
                      prior_json.at("alpha").get<double>(), prior_json.at("gamma").get<double>()};
    model.config.prior = prior;
    model.paths = PathModel(ResourceCatalog(std::move(subdirs)), prior, std::move(usage));

    const auto stored = j.at("subdirectory_dist").get<std::vector<double>>();
    const auto& fitted = model.paths.subdirectory_dist().probs.probs;
    if (stored.size() != fitted.size()) {
      fail(ErrorKind::InvalidModel, "subdirectory distribution does not match the catalog");
    }
    for (std::size_t i = 0; i < stored.size(); ++i) {
      if (std::abs(stored[i] - fitted[i]) > 1e-12) {
        fail(ErrorKind::InvalidModel, "subdirectory distribution does not match the catalog");
      }
    }

    if (const auto it = j.find("diagnostics"); it != j.end()) {
      model.diagnostics.num_requests = it->value("num_requests", std::uint64_t{0});
      model.diagnostics.num_sessions = it->value("num_sessions", std::uint64_t{0});
      model.diagnostics.observation_window = it->value("observation_window", 0.0);
      model.diagnostics.num_gaps = it->value("num_gaps", std::uint64_t{0});
      model.diagnostics.zero_gaps_excluded = it->value("zero_gaps_excluded", std::uint64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidModel, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidModel) throw;
    fail(ErrorKind::InvalidModel, std::string("invalid model: ") + e.what());
  }
  model.validate();
  return model;
}

}  // namespace webbot
