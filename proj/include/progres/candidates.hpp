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

// Shared plumbing for the filtering workflows: per-query top-k selection,
// canonical candidate accumulation, index/query direction, thread fan-out.

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "progres/datamodel.hpp"

namespace progres {

enum class Indexing : std::uint8_t { Smallest, Largest, Both };

inline std::string_view to_string(Indexing i) {
  switch (i) {
    case Indexing::Smallest: return "smallest";
    case Indexing::Largest: return "largest";
    case Indexing::Both: return "both";
  }
  return "?";
}

// Which side of a candidate pair is the node-centric scheduling partition.
// `Both` means the undirected deduplication graph: every node schedules.
enum class Partition : std::uint8_t { Left, Right, Both };

// One index/query pass. For record linkage `indexed` is the source whose
// entities become candidates of each query entity.
struct Direction {
  Source indexed = Source::Single;
  Source query = Source::Single;
};

// Smallest/Largest compare entity counts; equal sizes index SourceA.
inline std::vector<Direction> directions(Task task, Indexing indexing, std::size_t size_a,
                                         std::size_t size_b) {
  if (task == Task::Dedup) return {{Source::Single, Source::Single}};
  const Direction a_indexed{Source::SourceA, Source::SourceB};
  const Direction b_indexed{Source::SourceB, Source::SourceA};
  switch (indexing) {
    case Indexing::Smallest: return {size_b < size_a ? b_indexed : a_indexed};
    case Indexing::Largest: return {size_b > size_a ? b_indexed : a_indexed};
    case Indexing::Both: return {a_indexed, b_indexed};
  }
  return {};
}

// The query side schedules; under Both indexing SourceB does.
inline Partition query_partition(Task task, Indexing indexing, std::size_t size_a,
                                 std::size_t size_b) {
  if (task == Task::Dedup) return Partition::Both;
  if (indexing == Indexing::Both) return Partition::Right;
  return directions(task, indexing, size_a, size_b).front().query == Source::SourceB
             ? Partition::Right
             : Partition::Left;
}

struct Neighbor {
  EntityId id = 0;
  double rank = 0.0;    // raw similarity used for ordering
  double weight = 0.0;  // stored (non-negative) weight
};

// Keeps the k best by (rank desc, id asc), sorted.
inline void keep_top_k(std::vector<Neighbor>& items, std::size_t k) {
  auto better = [](const Neighbor& x, const Neighbor& y) {
    if (x.rank != y.rank) return x.rank > y.rank;
    return x.id < y.id;
  };
  if (items.size() > k) {
    std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k),
                      items.end(), better);
    items.resize(k);
  } else {
    std::sort(items.begin(), items.end(), better);
  }
}

// Canonical pair -> weight; repeated pairs keep the maximum weight.
class CandidateMap {
 public:
  void add(PairKey key, double weight) {
    auto [it, inserted] = weights_.try_emplace(key.packed(), weight);
    if (!inserted && weight > it->second) it->second = weight;
  }

  void merge(const CandidateMap& other) {
    for (const auto& [k, w] : other.weights_) add(PairKey::unpack(k), w);
  }

  std::size_t size() const { return weights_.size(); }

  // Sorted by (left, right).
  std::vector<WeightedPair> to_pairs() const {
    std::vector<WeightedPair> out;
    out.reserve(weights_.size());
    for (const auto& [k, w] : weights_) {
      const auto key = PairKey::unpack(k);
      out.push_back({key.left, key.right, w});
    }
    std::sort(out.begin(), out.end(), [](const WeightedPair& a, const WeightedPair& b) {
      return a.key() < b.key();
    });
    return out;
  }

 private:
  std::unordered_map<std::uint64_t, double> weights_;
};

// Query-side pair key for a neighbor returned by an index over `dir.indexed`.
inline PairKey pair_for(Task task, const Direction& dir, EntityId query, EntityId neighbor) {
  if (task == Task::Dedup) return canonicalize_dedup(query, neighbor);
  return dir.query == Source::SourceA ? PairKey{query, neighbor} : PairKey{neighbor, query};
}

// PROGRES_THREADS caps the worker count (default: hardware concurrency).
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PROGRES_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

// Runs fn(begin, end) over contiguous chunks of [0, n); returns
// chunk results in chunk order so merges are independent of scheduling.
template <typename Result, typename Fn>
std::vector<Result> parallel_chunks(std::size_t n, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<Result> results(workers);
  if (workers <= 1) {
    results[0] = fn(std::size_t{0}, n);
    return results;
  }
  const std::size_t step = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * step);
      const std::size_t end = std::min(n, begin + step);
      pool.emplace_back([&results, &errors, &fn, w, begin, end] {
        try {
          results[w] = fn(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace progres
