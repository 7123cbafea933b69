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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "webbot/distfit.hpp"
#include "webbot/log_model.hpp"
#include "webbot/rng.hpp"

namespace webbot {

/// Parent directory of a normalised path: "/a/b/c.html" -> "/a/b", "/x.gif" -> "/",
/// "/a/b/" -> "/a/b".
std::string subdirectory_of(std::string_view path);

/// Lower-cased extension of the final segment, or "none".
std::string resource_type_of(std::string_view path);

struct CatalogResource {
  std::string path;
  std::uint64_t global_count = 0;  // (n_G)_{j,l}
};

struct ResourceTypeGroup {
  std::string type;
  std::vector<CatalogResource> resources;

  std::uint64_t global_count() const;  // (m_G)_j
};

struct CatalogSubdirectory {
  std::string name;
  std::vector<ResourceTypeGroup> types;

  std::size_t resource_count() const;  // R_i
  std::uint64_t global_count() const;
};

struct ResourceLocation {
  std::size_t subdir = 0;
  std::size_t type = 0;
  std::size_t resource = 0;
};

/// Subdirectories, their resources grouped by type, and global request counts.
/// Subdirectories, types and resources are kept in lexicographic order.
class ResourceCatalog {
 public:
  ResourceCatalog() = default;
  explicit ResourceCatalog(std::vector<CatalogSubdirectory> subdirectories);

  const std::vector<CatalogSubdirectory>& subdirectories() const { return subdirs_; }
  std::size_t resource_count() const { return locations_.size(); }
  bool empty() const { return subdirs_.empty(); }

  std::optional<std::size_t> find_subdirectory(std::string_view name) const;

  /// Dense resource index in [0, resource_count()).
  std::optional<std::size_t> resource_index(std::string_view path) const;
  const ResourceLocation& location(std::size_t resource_index) const {
    return locations_[resource_index];
  }
  const std::string& path(const ResourceLocation& loc) const {
    return subdirs_[loc.subdir].types[loc.type].resources[loc.resource].path;
  }

 private:
  std::vector<CatalogSubdirectory> subdirs_;
  std::vector<ResourceLocation> locations_;
  std::unordered_map<std::string, std::size_t> by_path_;
  std::unordered_map<std::string, std::size_t> by_subdir_;
};

ResourceCatalog build_catalog(const Trace& trace);

/// sigma_i = R_i / sum_k R_k.
struct SubdirectoryDist {
  CategoricalParams probs;
};

SubdirectoryDist fit_subdirectory_dist(const ResourceCatalog& catalog);

struct DirichletHyperparams {
  std::vector<double> alpha;               // per type
  std::vector<std::vector<double>> gamma;  // per type, per resource
};

DirichletHyperparams fit_hyperparameters(const ResourceCatalog& catalog, std::string_view subdir,
                                         double alpha_strength, double gamma_strength);

/// Same as above with an independent gamma strength for every type.
DirichletHyperparams fit_hyperparameters(const ResourceCatalog& catalog, std::size_t subdir,
                                         double alpha_strength,
                                         std::span<const double> gamma_strengths);

struct RobotSubdirModel {
  CategoricalParams theta;                        // over types
  std::vector<CategoricalParams> resource_probs;  // per type, over its resources
};

/// MAP estimate under the Dirichlet priors. Numerators (alpha_j + m_j - 1) and
/// (gamma_jl + n_jl - 1) are clamped at zero and renormalised; an all-zero
/// vector falls back to the hyperparameter proportions.
RobotSubdirModel fit_map(std::span<const std::uint64_t> type_counts,
                         const std::vector<std::vector<std::uint64_t>>& resource_counts,
                         const DirichletHyperparams& hyper);

/// Draws subdirectory, then type, then resource.
std::string sample_request_path(
    Rng& rng, const ResourceCatalog& catalog, const SubdirectoryDist& subdir_dist,
    const std::function<const RobotSubdirModel&(std::size_t subdir)>& robot_models);

enum class PriorStrengthMode { Constant, DataScaled };

std::string to_string(PriorStrengthMode mode);
PriorStrengthMode parse_prior_strength_mode(const std::string& text);

struct PriorConfig {
  PriorStrengthMode mode = PriorStrengthMode::Constant;
  double alpha = 1.0;
  double gamma = 1.0;
};

/// Sparse per-robot request counts, (resource index, count) sorted by index.
using RobotUsage = std::vector<std::pair<std::size_t, std::uint64_t>>;

/// Tallies each robot's requests against the catalog. robot_of maps a request
/// to its robot index, or nullopt to skip it.
std::vector<RobotUsage> tally_robot_usage(
    const ResourceCatalog& catalog, std::span<const Request> requests, std::size_t robot_count,
    const std::function<std::optional<std::size_t>(const Request&)>& robot_of);

/// The complete request-path model: catalog, subdirectory distribution and the
/// per-(robot, subdirectory) MAP tables, which are built on first use.
class PathModel {
 public:
  PathModel();
  PathModel(ResourceCatalog catalog, PriorConfig prior, std::vector<RobotUsage> usage);
  PathModel(const PathModel& other);
  PathModel& operator=(const PathModel& other);
  PathModel(PathModel&&) noexcept;
  PathModel& operator=(PathModel&&) noexcept;
  ~PathModel();

  const ResourceCatalog& catalog() const { return catalog_; }
  const SubdirectoryDist& subdirectory_dist() const { return subdir_dist_; }
  const PriorConfig& prior() const { return prior_; }
  const std::vector<RobotUsage>& usage() const { return usage_; }
  std::size_t robot_count() const { return usage_.size(); }

  const DirichletHyperparams& hyperparameters(std::size_t subdir) const;
  const RobotSubdirModel& model(std::size_t robot, std::size_t subdir) const;

  std::string sample_request_path(Rng& rng, std::size_t robot) const;

 private:
  struct Memo;

  ResourceCatalog catalog_;
  SubdirectoryDist subdir_dist_;
  PriorConfig prior_;
  std::vector<RobotUsage> usage_;
  std::unique_ptr<Memo> memo_;
};

}  // namespace webbot
