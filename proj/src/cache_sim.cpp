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

#include "webbot/cache_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "webbot/csv.hpp"
#include "webbot/error.hpp"

namespace webbot {

std::string to_string(CachePolicy policy) { return policy == CachePolicy::LFU ? "lfu" : "lru"; }

CachePolicy parse_cache_policy(const std::string& text) {
  if (text == "lfu" || text == "LFU") return CachePolicy::LFU;
  if (text == "lru" || text == "LRU") return CachePolicy::LRU;
  fail(ErrorKind::InvalidParams, "unknown cache policy '" + text + "' (expected lfu or lru)");
}

double CacheStats::hit_rate() const {
  const std::uint64_t total = hits + misses;
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<std::uint32_t> intern_paths(std::span<const std::string> paths) {
  std::unordered_map<std::string_view, std::uint32_t> ids;
  std::vector<std::uint32_t> objects;
  objects.reserve(paths.size());
  for (const auto& path : paths) {
    auto [it, inserted] = ids.try_emplace(path, static_cast<std::uint32_t>(ids.size()));
    objects.push_back(it->second);
  }
  return objects;
}

namespace {

void require_capacity(std::size_t capacity) {
  if (capacity < 1) fail(ErrorKind::NonPositiveCapacity, "cache capacity must be at least 1");
}

}  // namespace

LruCache::LruCache(std::size_t capacity) : capacity_(capacity) { require_capacity(capacity); }

bool LruCache::access(std::uint32_t object) {
  if (const auto it = index_.find(object); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return true;
  }
  if (index_.size() == capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(object);
  index_.emplace(object, order_.begin());
  return false;
}

LfuCache::LfuCache(std::size_t capacity) : capacity_(capacity) { require_capacity(capacity); }

std::uint64_t LfuCache::frequency(std::uint32_t object) const {
  const auto it = index_.find(object);
  return it == index_.end() ? 0 : it->second.frequency;
}

void LfuCache::touch(std::uint32_t object, Entry& entry) {
  auto bucket = buckets_.find(entry.frequency);
  bucket->second.erase(entry.position);
  if (bucket->second.empty()) buckets_.erase(bucket);
  ++entry.frequency;
  auto& next = buckets_[entry.frequency];
  next.push_front(object);
  entry.position = next.begin();
}

bool LfuCache::access(std::uint32_t object) {
  if (const auto it = index_.find(object); it != index_.end()) {
    touch(object, it->second);
    return true;
  }
  if (index_.size() == capacity_) {
    auto lowest = buckets_.begin();
    index_.erase(lowest->second.back());
    lowest->second.pop_back();
    if (lowest->second.empty()) buckets_.erase(lowest);
  }
  auto& bucket = buckets_[1];
  bucket.push_front(object);
  index_.emplace(object, Entry{1, bucket.begin()});
  return false;
}

std::vector<bool> simulate_hits(std::span<const std::uint32_t> objects, std::size_t capacity,
                                CachePolicy policy) {
  std::vector<bool> hits;
  hits.reserve(objects.size());
  if (policy == CachePolicy::LRU) {
    LruCache cache(capacity);
    for (auto object : objects) hits.push_back(cache.access(object));
  } else {
    LfuCache cache(capacity);
    for (auto object : objects) hits.push_back(cache.access(object));
  }
  return hits;
}

CacheStats simulate(std::span<const std::uint32_t> objects, std::size_t capacity,
                    CachePolicy policy) {
  CacheStats stats;
  auto run = [&](auto& cache) {
    for (auto object : objects) {
      if (cache.access(object)) ++stats.hits;
      else ++stats.misses;
    }
  };
  if (policy == CachePolicy::LRU) {
    LruCache cache(capacity);
    run(cache);
  } else {
    LfuCache cache(capacity);
    run(cache);
  }
  return stats;
}

CacheStats simulate(std::span<const std::string> paths, std::size_t capacity, CachePolicy policy) {
  require_capacity(capacity);
  const auto objects = intern_paths(paths);
  return simulate(std::span<const std::uint32_t>(objects), capacity, policy);
}

void validate_capacity_grid(std::span<const std::uint64_t> capacities) {
  if (capacities.empty()) fail(ErrorKind::BadCapacityGrid, "capacity grid is empty");
  for (std::size_t i = 0; i < capacities.size(); ++i) {
    if (capacities[i] < 1) fail(ErrorKind::NonPositiveCapacity, "cache capacity must be at least 1");
    if (i > 0 && capacities[i] <= capacities[i - 1]) {
      fail(ErrorKind::BadCapacityGrid, "capacity grid must be strictly increasing");
    }
  }
}

HitRateCurve sweep(std::span<const std::string> paths, std::span<const std::uint64_t> capacities,
                   CachePolicy policy, unsigned threads) {
  validate_capacity_grid(capacities);
  const auto objects = intern_paths(paths);
  HitRateCurve curve{policy, std::vector<HitRatePoint>(capacities.size())};

  auto point = [&](std::size_t i) {
    const auto stats = simulate(std::span<const std::uint32_t>(objects),
                                static_cast<std::size_t>(capacities[i]), policy);
    curve.points[i] = HitRatePoint{capacities[i], stats.hit_rate()};
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, capacities.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < capacities.size(); ++i) point(i);
    return curve;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < capacities.size(); i += workers) point(i);
    }));
  }
  for (auto& job : jobs) job.get();
  return curve;
}

std::vector<std::uint64_t> default_capacity_grid(std::uint64_t max_capacity, std::size_t points) {
  max_capacity = std::max<std::uint64_t>(1, max_capacity);
  std::vector<std::uint64_t> grid;
  if (points <= 1 || max_capacity == 1) return {max_capacity};
  const double top = std::log(static_cast<double>(max_capacity));
  for (std::size_t i = 0; i < points; ++i) {
    const double value = std::exp(top * static_cast<double>(i) / static_cast<double>(points - 1));
    auto capacity = static_cast<std::uint64_t>(std::llround(value));
    if (i + 1 == points) capacity = max_capacity;
    if (grid.empty() || capacity > grid.back()) grid.push_back(capacity);
  }
  return grid;
}

void write_curve_csv(std::ostream& out, std::span<const HitRateCurve> curves,
                     std::span<const std::string> labels, bool header) {
  if (header) out << "capacity,hit_rate,policy,trace_label\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const std::string label = c < labels.size() ? csv_field(labels[c]) : std::string();
    for (const auto& point : curves[c].points) {
      out << point.capacity << ',' << format_fixed(point.hit_rate, 6) << ','
          << to_string(curves[c].policy) << ',' << label << '\n';
    }
  }
}

}  // namespace webbot
