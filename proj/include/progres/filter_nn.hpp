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

// Nearest-neighbor filtering over dense embeddings: index one source, query
// it with the other, keep each query's exact top-k.

#pragma once

#include <vector>

#include "progres/candidates.hpp"
#include "progres/dense_vectors.hpp"

namespace progres {

struct NNConfig {
  std::size_t k = 5;
  SimFn sim = SimFn::Euclidean;
  Indexing indexing = Indexing::Smallest;
  const DenseMatrix* vectors_a = nullptr;  // the single source for Dedup
  const DenseMatrix* vectors_b = nullptr;
};

namespace detail {

inline CandidateMap nn_pass(const DenseMatrix& indexed, const DenseMatrix& queries,
                            const Direction& dir, Task task, std::size_t k, SimFn sim) {
  if (indexed.rows() > 0 && queries.rows() > 0 && indexed.dim() != queries.dim())
    throw ConfigError("vector dimensions differ: " + std::to_string(indexed.dim()) + " vs " +
                      std::to_string(queries.dim()));
  auto chunks = parallel_chunks<CandidateMap>(queries.rows(), [&](std::size_t begin,
                                                                  std::size_t end) {
    CandidateMap local;
    std::vector<Neighbor> scratch;
    for (std::size_t q = begin; q < end; ++q) {
      scratch.clear();
      const auto qv = queries.row(q);
      for (std::size_t e = 0; e < indexed.rows(); ++e) {
        if (task == Task::Dedup && e == q) continue;
        const double s = similarity(indexed.row(e), qv, sim);
        scratch.push_back({static_cast<EntityId>(e), s, stored_weight(s)});
      }
      keep_top_k(scratch, k);
      for (const auto& n : scratch)
        local.add(pair_for(task, dir, static_cast<EntityId>(q), n.id), n.weight);
    }
    return local;
  });
  CandidateMap out;
  for (const auto& c : chunks) out.merge(c);
  return out;
}

}  // namespace detail

// Candidate pairs sorted by (left, right). Under Both indexing, a pair found
// from both sides keeps its maximum weight.
inline std::vector<WeightedPair> nn_candidates(const NNConfig& cfg, Task task) {
  if (cfg.k < 1) throw ConfigError("k must be >= 1");
  if (cfg.vectors_a == nullptr) throw ConfigError("missing vectors for the first source");
  if (task == Task::RecordLinkage && cfg.vectors_b == nullptr)
    throw ConfigError("record linkage needs vectors for both sources");

  CandidateMap all;
  if (task == Task::Dedup) {
    all = detail::nn_pass(*cfg.vectors_a, *cfg.vectors_a, {}, task, cfg.k, cfg.sim);
  } else {
    for (const auto& dir :
         directions(task, cfg.indexing, cfg.vectors_a->rows(), cfg.vectors_b->rows())) {
      const bool a_indexed = dir.indexed == Source::SourceA;
      const DenseMatrix& indexed = a_indexed ? *cfg.vectors_a : *cfg.vectors_b;
      const DenseMatrix& queries = a_indexed ? *cfg.vectors_b : *cfg.vectors_a;
      all.merge(detail::nn_pass(indexed, queries, dir, task, cfg.k, cfg.sim));
    }
  }
  return all.to_pairs();
}

}  // namespace progres
