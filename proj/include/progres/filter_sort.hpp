// Copyright 2026 The progres Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sorted-neighborhood workflow: entities laid out by alphabetically sorted
// tokens, pairs weighted by how often and how closely they co-occur inside a
// sliding window.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "progres/candidates.hpp"
#include "progres/datamodel.hpp"
#include "progres/sparse_vectorizer.hpp"

namespace progres {

inline constexpr int kMinWindow = 2;
inline constexpr int kMaxWindow = 10;

enum class SortWeighting : std::uint8_t { ACF, NCF, DNCF, CNCF, ID };
enum class SortScope : std::uint8_t { Local, Global };

inline constexpr std::array<std::string_view, 5> kSortWeightingNames = {"ACF", "NCF", "DNCF",
                                                                       "CNCF", "ID"};

inline std::string_view to_string(SortWeighting w) {
  return kSortWeightingNames[static_cast<std::size_t>(w)];
}
inline std::string_view to_string(SortScope s) {
  return s == SortScope::Local ? "local" : "global";
}

struct SortCfg {
  int window = 2;
  SortWeighting scheme = SortWeighting::ACF;
  SortScope scope = SortScope::Local;
  std::uint64_t seed = 42;

  void validate() const {
    if (window < kMinWindow || window > kMaxWindow)
      throw ConfigError("window size must be in [" + std::to_string(kMinWindow) + ", " +
                        std::to_string(kMaxWindow) + "], got " + std::to_string(window));
  }
};

// Slot layout of one run. Nodes number SourceA (or the single source) first,
// then SourceB: node = id, or entities_left + id.
struct SortedPositionList {
  std::size_t entities_left = 0;
  std::size_t entities_right = 0;
  std::vector<std::uint32_t> slots;                   // P: node per slot
  std::vector<std::vector<std::uint32_t>> positions;  // node -> ascending slot indices

  bool is_right(std::uint32_t node) const { return node >= entities_left; }
  EntityId entity(std::uint32_t node) const {
    return is_right(node) ? static_cast<EntityId>(node - entities_left) : node;
  }
};

// Uniform integer in [0, bound) from raw generator output. Rejection sampling
// keeps the stream identical on every standard library.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// Tokens in ascending byte order; entities within a token shuffled by one
// generator seeded once and consumed token by token.
inline SortedPositionList build_positions(const std::vector<EntityProfile>& source_a,
                                          const std::vector<EntityProfile>& source_b,
                                          Task task, std::uint64_t seed) {
  SortedPositionList list;
  list.entities_left = source_a.size();
  list.entities_right = task == Task::RecordLinkage ? source_b.size() : 0;
  std::map<std::string_view, std::vector<std::uint32_t>> by_token;
  auto add = [&](const std::vector<EntityProfile>& profiles, std::uint32_t offset) {
    for (const auto& p : profiles) {
      const auto node = offset + p.id;
      for (auto tok : whitespace_tokens(p.agnostic_text)) {
        auto& nodes = by_token[tok];
        if (nodes.empty() || nodes.back() != node) nodes.push_back(node);
      }
    }
  };
  add(source_a, 0);
  if (task == Task::RecordLinkage) add(source_b, static_cast<std::uint32_t>(source_a.size()));

  std::mt19937_64 rng(seed);
  list.positions.resize(list.entities_left + list.entities_right);
  for (auto& [tok, nodes] : by_token) {
    seeded_shuffle(nodes, rng);
    for (auto node : nodes) {
      list.positions[node].push_back(static_cast<std::uint32_t>(list.slots.size()));
      list.slots.push_back(node);
    }
  }
  return list;
}

inline SortedPositionList build_positions(const Dataset& ds, std::uint64_t seed) {
  return build_positions(ds.source_a, ds.source_b, ds.task, seed);
}

// Per-pair count of co-occurring slot pairs at each distance 1..kMaxWindow-1.
using DistanceHistogram = std::array<std::uint32_t, kMaxWindow - 1>;

// Scheme value for a single window size `w` given the distance histogram.
// NCF/DNCF/CNCF saturate at 1: a pair can co-occur more often than the
// set-style normalizers assume (e.g. slots i,j,i,j), and a non-positive NCF
// denominator means full co-occurrence.
inline double local_sort_weight(SortWeighting scheme, const DistanceHistogram& hist, int w,
                                double positions_i, double positions_j) {
  double acf = 0.0, inv = 0.0;
  for (int d = 1; d < w; ++d) {
    acf += hist[d - 1];
    inv += static_cast<double>(hist[d - 1]) / d;
  }
  if (acf == 0.0) return 0.0;
  auto saturate = [](double x) { return x > 1.0 ? 1.0 : x; };
  switch (scheme) {
    case SortWeighting::ACF: return acf;
    case SortWeighting::NCF: {
      const double den = positions_i + positions_j - acf;
      return den <= 0.0 ? 1.0 : saturate(acf / den);
    }
    case SortWeighting::DNCF: return saturate(2.0 * acf / (positions_i + positions_j));
    case SortWeighting::CNCF: return saturate(acf / std::sqrt(positions_i * positions_j));
    case SortWeighting::ID: return inv;
  }
  return 0.0;
}

inline double sort_weight(const SortCfg& cfg, const DistanceHistogram& hist, double positions_i,
                          double positions_j) {
  if (cfg.scope == SortScope::Local)
    return local_sort_weight(cfg.scheme, hist, cfg.window, positions_i, positions_j);
  double sum = 0.0;
  for (int u = kMinWindow; u <= cfg.window; ++u)
    sum += local_sort_weight(cfg.scheme, hist, u, positions_i, positions_j);
  return sum;
}

// Candidate pairs sorted by (left, right). Record linkage pairs cross sources;
// deduplication pairs are distinct entities.
inline std::vector<WeightedPair> window_pairs(const SortedPositionList& list, const SortCfg& cfg,
                                              Task task) {
  cfg.validate();
  const bool rl = task == Task::RecordLinkage;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  std::vector<PairKey> keys;
  std::vector<DistanceHistogram> hists;
  const std::size_t n = list.slots.size();
  for (std::size_t p = 0; p < n; ++p) {
    const std::uint32_t a = list.slots[p];
    const std::size_t last = std::min(n - 1, p + static_cast<std::size_t>(cfg.window) - 1);
    for (std::size_t q = p + 1; q <= last; ++q) {
      const std::uint32_t b = list.slots[q];
      PairKey key;
      if (rl) {
        if (list.is_right(a) == list.is_right(b)) continue;
        key = list.is_right(a) ? PairKey{list.entity(b), list.entity(a)}
                               : PairKey{list.entity(a), list.entity(b)};
      } else {
        if (a == b) continue;
        key = a < b ? PairKey{a, b} : PairKey{b, a};
      }
      auto [it, inserted] = index.try_emplace(key.packed(), static_cast<std::uint32_t>(keys.size()));
      if (inserted) {
        keys.push_back(key);
        hists.push_back({});
      }
      ++hists[it->second][q - p - 1];
    }
  }

  std::vector<WeightedPair> out;
  out.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto node_i = keys[i].left;
    const auto node_j = rl ? static_cast<std::uint32_t>(list.entities_left + keys[i].right)
                           : keys[i].right;
    const double w = sort_weight(cfg, hists[i], static_cast<double>(list.positions[node_i].size()),
                                 static_cast<double>(list.positions[node_j].size()));
    if (w > 0.0) out.push_back({keys[i].left, keys[i].right, w});
  }
  std::sort(out.begin(), out.end(),
            [](const WeightedPair& x, const WeightedPair& y) { return x.key() < y.key(); });
  return out;
}

inline std::vector<WeightedPair> sorting_workflow(const Dataset& ds, const SortCfg& cfg) {
  cfg.validate();
  return window_pairs(build_positions(ds, cfg.seed), cfg, ds.task);
}

}  // namespace progres
