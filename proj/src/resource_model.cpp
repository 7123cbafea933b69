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

#include "webbot/resource_model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <numeric>

#include "webbot/error.hpp"
#include "webbot/ingest.hpp"

namespace webbot {

std::string subdirectory_of(std::string_view path) {
  if (path.empty() || path == "/") return "/";
  if (path.back() == '/') path.remove_suffix(1);
  else path = path.substr(0, path.rfind('/') + 1);
  while (path.size() > 1 && path.back() == '/') path.remove_suffix(1);
  if (path.empty()) return "/";
  return std::string(path);
}

std::string resource_type_of(std::string_view path) {
  if (path.empty() || path.back() == '/') return "none";
  const std::string_view segment = path.substr(path.rfind('/') + 1);
  const auto dot = segment.rfind('.');
  if (dot == std::string_view::npos || dot + 1 == segment.size()) return "none";
  std::string type(segment.substr(dot + 1));
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return type;
}

std::uint64_t ResourceTypeGroup::global_count() const {
  std::uint64_t total = 0;
  for (const auto& r : resources) total += r.global_count;
  return total;
}

std::size_t CatalogSubdirectory::resource_count() const {
  std::size_t total = 0;
  for (const auto& t : types) total += t.resources.size();
  return total;
}

std::uint64_t CatalogSubdirectory::global_count() const {
  std::uint64_t total = 0;
  for (const auto& t : types) total += t.global_count();
  return total;
}

ResourceCatalog::ResourceCatalog(std::vector<CatalogSubdirectory> subdirectories)
    : subdirs_(std::move(subdirectories)) {
  for (std::size_t d = 0; d < subdirs_.size(); ++d) {
    const auto& subdir = subdirs_[d];
    if (subdir.resource_count() == 0) {
      fail(ErrorKind::InvalidParams, "catalog subdirectory '" + subdir.name + "' has no resources");
    }
    if (!by_subdir_.emplace(subdir.name, d).second) {
      fail(ErrorKind::InvalidParams, "duplicate catalog subdirectory '" + subdir.name + "'");
    }
    for (std::size_t t = 0; t < subdir.types.size(); ++t) {
      if (subdir.types[t].resources.empty()) {
        fail(ErrorKind::InvalidParams, "catalog type group '" + subdir.types[t].type + "' in '" +
                                           subdir.name + "' is empty");
      }
      for (std::size_t r = 0; r < subdir.types[t].resources.size(); ++r) {
        const auto& path = subdir.types[t].resources[r].path;
        if (!by_path_.emplace(path, locations_.size()).second) {
          fail(ErrorKind::InvalidParams, "duplicate catalog resource '" + path + "'");
        }
        locations_.push_back(ResourceLocation{d, t, r});
      }
    }
  }
}

std::optional<std::size_t> ResourceCatalog::find_subdirectory(std::string_view name) const {
  const auto it = by_subdir_.find(std::string(name));
  if (it == by_subdir_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ResourceCatalog::resource_index(std::string_view path) const {
  const auto it = by_path_.find(std::string(path));
  if (it == by_path_.end()) return std::nullopt;
  return it->second;
}

ResourceCatalog build_catalog(const Trace& trace) {
  if (trace.requests.empty()) fail(ErrorKind::EmptyTrace, "cannot build a catalog from an empty trace");
  std::map<std::string, std::map<std::string, std::map<std::string, std::uint64_t>>> tree;
  for (const auto& request : trace.requests) {
    const std::string path = normalize_path(request.path);
    ++tree[subdirectory_of(path)][resource_type_of(path)][path];
  }
  std::vector<CatalogSubdirectory> subdirs;
  subdirs.reserve(tree.size());
  for (auto& [name, types] : tree) {
    CatalogSubdirectory subdir{name, {}};
    for (auto& [type, resources] : types) {
      ResourceTypeGroup group{type, {}};
      for (auto& [path, count] : resources) group.resources.push_back({path, count});
      subdir.types.push_back(std::move(group));
    }
    subdirs.push_back(std::move(subdir));
  }
  return ResourceCatalog(std::move(subdirs));
}

SubdirectoryDist fit_subdirectory_dist(const ResourceCatalog& catalog) {
  if (catalog.empty()) fail(ErrorKind::EmptyCatalog, "catalog has no subdirectories");
  std::vector<double> weights;
  weights.reserve(catalog.subdirectories().size());
  for (const auto& subdir : catalog.subdirectories()) {
    weights.push_back(static_cast<double>(subdir.resource_count()));
  }
  return SubdirectoryDist{CategoricalParams::from_weights(weights)};
}

DirichletHyperparams fit_hyperparameters(const ResourceCatalog& catalog, std::size_t subdir,
                                         double alpha_strength,
                                         std::span<const double> gamma_strengths) {
  if (subdir >= catalog.subdirectories().size()) {
    fail(ErrorKind::UnknownSubdirectory, "subdirectory index out of range");
  }
  const auto& entry = catalog.subdirectories()[subdir];
  if (!(alpha_strength > 0.0) || gamma_strengths.size() != entry.types.size()) {
    fail(ErrorKind::InvalidParams, "prior strengths must be positive, one gamma per type");
  }
  const std::uint64_t total = entry.global_count();
  if (total == 0) {
    fail(ErrorKind::ZeroGlobalCounts, "no requests observed in subdirectory '" + entry.name + "'");
  }

  DirichletHyperparams hyper;
  for (std::size_t j = 0; j < entry.types.size(); ++j) {
    const auto& group = entry.types[j];
    const std::uint64_t type_total = group.global_count();
    hyper.alpha.push_back(alpha_strength * static_cast<double>(type_total) /
                          static_cast<double>(total));
    if (!(gamma_strengths[j] > 0.0)) {
      fail(ErrorKind::InvalidParams, "prior strengths must be positive");
    }
    std::vector<double> gamma;
    gamma.reserve(group.resources.size());
    for (const auto& resource : group.resources) {
      gamma.push_back(type_total == 0 ? 0.0
                                      : gamma_strengths[j] *
                                            static_cast<double>(resource.global_count) /
                                            static_cast<double>(type_total));
    }
    hyper.gamma.push_back(std::move(gamma));
  }
  return hyper;
}

DirichletHyperparams fit_hyperparameters(const ResourceCatalog& catalog, std::string_view subdir,
                                         double alpha_strength, double gamma_strength) {
  const auto index = catalog.find_subdirectory(subdir);
  if (!index) fail(ErrorKind::UnknownSubdirectory, "unknown subdirectory '" + std::string(subdir) + "'");
  const std::vector<double> gammas(catalog.subdirectories()[*index].types.size(), gamma_strength);
  return fit_hyperparameters(catalog, *index, alpha_strength, gammas);
}

namespace {

/// Clamped MAP numerators, renormalised; falls back to the prior proportions
/// (or uniform when the prior carries no mass) if every numerator clamps.
CategoricalParams clamp_and_normalize(std::span<const double> prior,
                                      std::span<const std::uint64_t> counts) {
  std::vector<double> numerators(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    numerators[i] = std::max(0.0, prior[i] + static_cast<double>(counts[i]) - 1.0);
    total += numerators[i];
  }
  if (total > 0.0) return CategoricalParams::from_weights(numerators);
  const double prior_total = std::accumulate(prior.begin(), prior.end(), 0.0);
  if (prior_total > 0.0) return CategoricalParams::from_weights(prior);
  const std::vector<double> uniform(prior.size(), 1.0);
  return CategoricalParams::from_weights(uniform);
}

}  // namespace

RobotSubdirModel fit_map(std::span<const std::uint64_t> type_counts,
                         const std::vector<std::vector<std::uint64_t>>& resource_counts,
                         const DirichletHyperparams& hyper) {
  const std::size_t k = hyper.alpha.size();
  if (k == 0 || type_counts.size() != k || resource_counts.size() != k || hyper.gamma.size() != k) {
    fail(ErrorKind::InconsistentCounts, "count and hyperparameter shapes disagree");
  }
  RobotSubdirModel model;
  model.theta = clamp_and_normalize(hyper.alpha, type_counts);
  model.resource_probs.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (resource_counts[j].size() != hyper.gamma[j].size() || hyper.gamma[j].empty()) {
      fail(ErrorKind::InconsistentCounts, "resource counts do not match the type's resources");
    }
    const std::uint64_t sum =
        std::accumulate(resource_counts[j].begin(), resource_counts[j].end(), std::uint64_t{0});
    if (sum != type_counts[j]) {
      fail(ErrorKind::InconsistentCounts, "type count " + std::to_string(type_counts[j]) +
                                              " differs from its resource total " +
                                              std::to_string(sum));
    }
    model.resource_probs.push_back(clamp_and_normalize(hyper.gamma[j], resource_counts[j]));
  }
  return model;
}

std::string sample_request_path(
    Rng& rng, const ResourceCatalog& catalog, const SubdirectoryDist& subdir_dist,
    const std::function<const RobotSubdirModel&(std::size_t subdir)>& robot_models) {
  const std::size_t d = sample_categorical(rng, subdir_dist.probs);
  const RobotSubdirModel& model = robot_models(d);
  const std::size_t t = sample_categorical(rng, model.theta);
  const std::size_t r = sample_categorical(rng, model.resource_probs[t]);
  return catalog.subdirectories()[d].types[t].resources[r].path;
}

std::string to_string(PriorStrengthMode mode) {
  return mode == PriorStrengthMode::Constant ? "constant" : "data-scaled";
}

PriorStrengthMode parse_prior_strength_mode(const std::string& text) {
  if (text == "constant") return PriorStrengthMode::Constant;
  if (text == "data-scaled") return PriorStrengthMode::DataScaled;
  fail(ErrorKind::InvalidParams, "unknown prior strength mode '" + text + "'");
}

std::vector<RobotUsage> tally_robot_usage(
    const ResourceCatalog& catalog, std::span<const Request> requests, std::size_t robot_count,
    const std::function<std::optional<std::size_t>(const Request&)>& robot_of) {
  std::vector<std::map<std::size_t, std::uint64_t>> counts(robot_count);
  for (const auto& request : requests) {
    const auto robot = robot_of(request);
    if (!robot || *robot >= robot_count) continue;
    const auto resource = catalog.resource_index(normalize_path(request.path));
    if (!resource) continue;
    ++counts[*robot][*resource];
  }
  std::vector<RobotUsage> usage(robot_count);
  for (std::size_t i = 0; i < robot_count; ++i) {
    usage[i].assign(counts[i].begin(), counts[i].end());
  }
  return usage;
}

struct PathModel::Memo {
  std::mutex mutex;
  std::vector<std::unique_ptr<DirichletHyperparams>> hyper;
  std::unordered_map<std::uint64_t, std::unique_ptr<RobotSubdirModel>> models;
  std::vector<std::size_t> subdir_offsets;  // first resource index of each subdirectory
};

PathModel::PathModel() : memo_(std::make_unique<Memo>()) {}

PathModel::PathModel(ResourceCatalog catalog, PriorConfig prior, std::vector<RobotUsage> usage)
    : catalog_(std::move(catalog)),
      subdir_dist_(fit_subdirectory_dist(catalog_)),
      prior_(prior),
      usage_(std::move(usage)),
      memo_(std::make_unique<Memo>()) {
  if (prior_.mode == PriorStrengthMode::Constant && (!(prior_.alpha > 0.0) || !(prior_.gamma > 0.0))) {
    fail(ErrorKind::InvalidParams, "prior strengths must be positive");
  }
  for (const auto& robot : usage_) {
    for (std::size_t i = 0; i < robot.size(); ++i) {
      if (robot[i].first >= catalog_.resource_count() || (i > 0 && robot[i - 1].first >= robot[i].first)) {
        fail(ErrorKind::InvalidParams, "robot usage must reference catalog resources in order");
      }
    }
  }
  memo_->hyper.resize(catalog_.subdirectories().size());
  std::size_t offset = 0;
  for (const auto& subdir : catalog_.subdirectories()) {
    memo_->subdir_offsets.push_back(offset);
    offset += subdir.resource_count();
  }
  memo_->subdir_offsets.push_back(offset);
}

PathModel::PathModel(const PathModel& other)
    : PathModel(other.catalog_, other.prior_, other.usage_) {}

PathModel& PathModel::operator=(const PathModel& other) {
  if (this != &other) *this = PathModel(other);
  return *this;
}

PathModel::PathModel(PathModel&&) noexcept = default;
PathModel& PathModel::operator=(PathModel&&) noexcept = default;
PathModel::~PathModel() = default;

const DirichletHyperparams& PathModel::hyperparameters(std::size_t subdir) const {
  if (subdir >= catalog_.subdirectories().size()) {
    fail(ErrorKind::UnknownSubdirectory, "subdirectory index out of range");
  }
  std::lock_guard lock(memo_->mutex);
  auto& slot = memo_->hyper[subdir];
  if (!slot) {
    const auto& entry = catalog_.subdirectories()[subdir];
    double alpha = prior_.alpha;
    std::vector<double> gammas(entry.types.size(), prior_.gamma);
    if (prior_.mode == PriorStrengthMode::DataScaled) {
      alpha = static_cast<double>(entry.global_count());
      for (std::size_t j = 0; j < entry.types.size(); ++j) {
        // A type nobody requested keeps zero mass whatever its strength.
        gammas[j] = std::max<double>(1.0, static_cast<double>(entry.types[j].global_count()));
      }
    }
    slot = std::make_unique<DirichletHyperparams>(fit_hyperparameters(catalog_, subdir, alpha, gammas));
  }
  return *slot;
}

const RobotSubdirModel& PathModel::model(std::size_t robot, std::size_t subdir) const {
  if (robot >= usage_.size()) fail(ErrorKind::InvalidParams, "robot index out of range");
  const DirichletHyperparams& hyper = hyperparameters(subdir);
  const std::uint64_t key = static_cast<std::uint64_t>(robot) * catalog_.subdirectories().size() + subdir;
  {
    std::lock_guard lock(memo_->mutex);
    if (const auto it = memo_->models.find(key); it != memo_->models.end()) return *it->second;
  }

  const auto& entry = catalog_.subdirectories()[subdir];
  std::vector<std::uint64_t> type_counts(entry.types.size(), 0);
  std::vector<std::vector<std::uint64_t>> resource_counts;
  for (const auto& group : entry.types) resource_counts.emplace_back(group.resources.size(), 0);

  const auto& usage = usage_[robot];
  const std::size_t first = memo_->subdir_offsets[subdir];
  const std::size_t last = memo_->subdir_offsets[subdir + 1];
  auto it = std::lower_bound(usage.begin(), usage.end(), first,
                             [](const auto& item, std::size_t index) { return item.first < index; });
  for (; it != usage.end() && it->first < last; ++it) {
    const ResourceLocation& loc = catalog_.location(it->first);
    type_counts[loc.type] += it->second;
    resource_counts[loc.type][loc.resource] += it->second;
  }
  auto fitted = std::make_unique<RobotSubdirModel>(fit_map(type_counts, resource_counts, hyper));

  std::lock_guard lock(memo_->mutex);
  // Another thread may have filled the slot meanwhile; the values are identical.
  auto [slot, inserted] = memo_->models.try_emplace(key, std::move(fitted));
  return *slot->second;
}

std::string PathModel::sample_request_path(Rng& rng, std::size_t robot) const {
  return webbot::sample_request_path(rng, catalog_, subdir_dist_, [&](std::size_t subdir) -> const RobotSubdirModel& {
    return model(robot, subdir);
  });
}

}  // namespace webbot
