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

// Join filtering: sparse n-gram vectors, an inverted index over the indexed
// source, and per-query top-k by cosine or Euclidean similarity.

#pragma once

#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

#include "progres/candidates.hpp"
#include "progres/dense_vectors.hpp"
#include "progres/sparse_vectorizer.hpp"

namespace progres {

// Squared L2 norm, summed in ascending feature order. The query accumulator
// visits features in the same order, so an exact duplicate yields a dot
// product bit-identical to its squared norm and a Euclidean distance of 0.
inline double squared_norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [f, x] : v.entries) s += x * x;
  return s;
}

class InvertedIndex {
 public:
  struct Posting {
    EntityId entity;
    double score;
  };

  InvertedIndex() = default;

  // `feature_space` is the fitted vocabulary size; queries naming features
  // outside it were vectorized with a different model.
  InvertedIndex(const std::vector<SparseVector>& vectors, std::size_t feature_space)
      : postings_(feature_space) {
    squared_norms_.reserve(vectors.size());
    for (std::size_t e = 0; e < vectors.size(); ++e) {
      for (const auto& [f, x] : vectors[e].entries) {
        if (f >= feature_space)
          throw ConfigError("feature id " + std::to_string(f) + " outside vocabulary");
        postings_[f].push_back({static_cast<EntityId>(e), x});
      }
      squared_norms_.push_back(squared_norm(vectors[e]));
    }
  }

  std::size_t entity_count() const { return squared_norms_.size(); }
  std::size_t feature_space() const { return postings_.size(); }
  const std::vector<Posting>& postings(FeatureId f) const { return postings_.at(f); }
  double norm(EntityId e) const { return std::sqrt(squared_norms_.at(e)); }
  double squared_norm_of(EntityId e) const { return squared_norms_.at(e); }

 private:
  std::vector<std::vector<Posting>> postings_;  // entity ids ascending per list
  std::vector<double> squared_norms_;
};

inline InvertedIndex build_index(const std::vector<SparseVector>& vectors,
                                 std::size_t feature_space) {
  return InvertedIndex(vectors, feature_space);
}

inline InvertedIndex build_index(const std::vector<SparseVector>& vectors) {
  std::size_t space = 0;
  for (const auto& v : vectors)
    if (!v.empty()) space = std::max<std::size_t>(space, v.entries.back().first + 1);
  return InvertedIndex(vectors, space);
}

// Similarity from accumulated dot product and squared norms. Only entities
// sharing at least one feature with the query ever reach this point.
inline double sparse_similarity(double dot, double query_sq, double entity_sq, SimFn sim) {
  if (sim == SimFn::Cosine) return dot / (std::sqrt(query_sq) * std::sqrt(entity_sq));
  const double d2 = query_sq + entity_sq - 2.0 * dot;
  return 1.0 / (1.0 + std::sqrt(d2 > 0.0 ? d2 : 0.0));
}

// Top-k per query over the inverted index. In deduplication the index and the
// queries are the same source and a query never matches its own id.
inline CandidateMap join_candidates(const InvertedIndex& index,
                                    const std::vector<SparseVector>& queries, SimFn sim,
                                    std::size_t k, Task task, const Direction& dir = {}) {
  if (k < 1) throw ConfigError("k must be >= 1");
  for (const auto& q : queries)
    if (!q.empty() && q.entries.back().first >= index.feature_space())
      throw ConfigError("query vector uses features outside the index vocabulary");

  auto chunks = parallel_chunks<CandidateMap>(queries.size(), [&](std::size_t begin,
                                                                  std::size_t end) {
    CandidateMap local;
    std::vector<double> acc(index.entity_count(), 0.0);
    std::vector<char> seen(index.entity_count(), 0);
    std::vector<EntityId> touched;
    std::vector<Neighbor> scratch;
    for (std::size_t qi = begin; qi < end; ++qi) {
      const SparseVector& q = queries[qi];
      for (const auto& [f, x] : q.entries) {
        for (const auto& p : index.postings(f)) {
          if (task == Task::Dedup && p.entity == qi) continue;
          if (!seen[p.entity]) {
            seen[p.entity] = 1;
            touched.push_back(p.entity);
          }
          acc[p.entity] += x * p.score;
        }
      }
      const double q_sq = squared_norm(q);
      scratch.clear();
      for (EntityId e : touched) {
        const double s = sparse_similarity(acc[e], q_sq, index.squared_norm_of(e), sim);
        scratch.push_back({e, s, stored_weight(s)});
        acc[e] = 0.0;
        seen[e] = 0;
      }
      touched.clear();
      keep_top_k(scratch, k);
      for (const auto& n : scratch)
        local.add(pair_for(task, dir, static_cast<EntityId>(qi), n.id), n.weight);
    }
    return local;
  });
  CandidateMap out;
  for (const auto& c : chunks) out.merge(c);
  return out;
}

struct JoinConfig {
  std::size_t k = 5;
  SimFn sim = SimFn::Euclidean;
  Indexing indexing = Indexing::Smallest;
  TokenizerCfg tokenizer = TokenizerCfg::chars(3);
  FeatureScoring scoring = FeatureScoring::TFIDF;
};

// Full join workflow: fit scoring on each indexed source, project the query
// source onto it, query. Sorted by (left, right).
inline std::vector<WeightedPair> join_workflow(const Dataset& ds, const JoinConfig& cfg) {
  CandidateMap all;
  for (const auto& dir : directions(ds.task, cfg.indexing, ds.source_a.size(),
                                    ds.source_b.size())) {
    const bool a_indexed = ds.task == Task::Dedup || dir.indexed == Source::SourceA;
    const auto& indexed = a_indexed ? ds.source_a : ds.source_b;
    const auto& queried = ds.task == Task::Dedup ? ds.source_a
                          : a_indexed            ? ds.source_b
                                                 : ds.source_a;
    auto corpus = score_corpus(indexed, cfg.tokenizer, cfg.scoring);
    const auto index = build_index(corpus.vectors, corpus.model.vocabulary_size());
    std::vector<SparseVector> queries;
    if (ds.task == Task::Dedup) {
      queries = std::move(corpus.vectors);
    } else {
      queries.reserve(queried.size());
      for (const auto& p : queried) queries.push_back(corpus.model.transform(p.agnostic_text));
    }
    all.merge(join_candidates(index, queries, cfg.sim, cfg.k, ds.task, dir));
  }
  return all.to_pairs();
}

}  // namespace progres
