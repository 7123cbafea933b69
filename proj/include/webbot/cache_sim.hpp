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
#include <list>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace webbot {

enum class CachePolicy { LFU, LRU };

std::string to_string(CachePolicy policy);
CachePolicy parse_cache_policy(const std::string& text);

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  double hit_rate() const;
};

struct HitRatePoint {
  std::uint64_t capacity = 0;
  double hit_rate = 0.0;
};

struct HitRateCurve {
  CachePolicy policy = CachePolicy::LRU;
  std::vector<HitRatePoint> points;
};

/// Maps each distinct path to a dense id in order of first appearance.
std::vector<std::uint32_t> intern_paths(std::span<const std::string> paths);

/// Unit-size LRU cache over interned object ids.
class LruCache {
 public:
  explicit LruCache(std::size_t capacity);

  /// Returns true on a hit. A miss inserts the object, evicting if full.
  bool access(std::uint32_t object);
  bool contains(std::uint32_t object) const { return index_.count(object) != 0; }
  std::size_t size() const { return index_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::list<std::uint32_t> order_;  // front = most recent
  std::unordered_map<std::uint32_t, std::list<std::uint32_t>::iterator> index_;
};

/// Unit-size LFU cache. Evicts the lowest access count, least recently used
/// among ties; counts start at 1 on insertion and are forgotten on eviction.
class LfuCache {
 public:
  explicit LfuCache(std::size_t capacity);

  bool access(std::uint32_t object);
  bool contains(std::uint32_t object) const { return index_.count(object) != 0; }
  std::size_t size() const { return index_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t frequency(std::uint32_t object) const;

 private:
  struct Entry {
    std::uint64_t frequency;
    std::list<std::uint32_t>::iterator position;
  };

  void touch(std::uint32_t object, Entry& entry);

  std::size_t capacity_;
  // frequency -> objects with that count, front = most recent
  std::map<std::uint64_t, std::list<std::uint32_t>> buckets_;
  std::unordered_map<std::uint32_t, Entry> index_;
};

/// Per-access hit flags for an interned trace.
std::vector<bool> simulate_hits(std::span<const std::uint32_t> objects, std::size_t capacity,
                                CachePolicy policy);

CacheStats simulate(std::span<const std::string> paths, std::size_t capacity,
                    CachePolicy policy);
CacheStats simulate(std::span<const std::uint32_t> objects, std::size_t capacity,
                    CachePolicy policy);

/// One cold-start simulation per capacity; capacities must be strictly
/// increasing. Up to threads simulations run concurrently.
HitRateCurve sweep(std::span<const std::string> paths, std::span<const std::uint64_t> capacities,
                   CachePolicy policy, unsigned threads = 1);

/// points log-spaced capacities from 1 to max_capacity, deduplicated.
std::vector<std::uint64_t> default_capacity_grid(std::uint64_t max_capacity,
                                                 std::size_t points = 16);

void validate_capacity_grid(std::span<const std::uint64_t> capacities);

void write_curve_csv(std::ostream& out, std::span<const HitRateCurve> curves,
                     std::span<const std::string> labels, bool header = true);

}  // namespace webbot
