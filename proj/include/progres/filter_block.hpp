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

// Blocking workflow: Token Blocking, Block Purging, Block Filtering and the
// weighted similarity graph over the surviving blocks.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "progres/candidates.hpp"
#include "progres/datamodel.hpp"
#include "progres/sparse_vectorizer.hpp"

namespace progres {

// Entities sharing one signature. Deduplication uses `left` only.
struct Block {
  std::string signature;
  std::vector<EntityId> left;
  std::vector<EntityId> right;

  std::size_t size() const { return left.size() + right.size(); }

  // Number of candidate pairs ||b||.
  std::uint64_t cardinality(Task task) const {
    if (task == Task::RecordLinkage)
      return static_cast<std::uint64_t>(left.size()) * right.size();
    const std::uint64_t n = left.size();
    return n < 2 ? 0 : n * (n - 1) / 2;
  }
};

// Blocks sorted by signature; every block has cardinality >= 1.
struct BlockCollection {
  Task task = Task::Dedup;
  std::size_t entities_left = 0;   // |SourceA| (or |D| for Dedup)
  std::size_t entities_right = 0;  // |SourceB|, 0 for Dedup
  std::vector<Block> blocks;

  std::uint64_t total_cardinality() const {
    std::uint64_t s = 0;
    for (const auto& b : blocks) s += b.cardinality(task);
    return s;
  }
  std::uint64_t total_assignments() const {
    std::uint64_t s = 0;
    for (const auto& b : blocks) s += b.size();
    return s;
  }
};

namespace detail {

inline void drop_degenerate(BlockCollection& bc) {
  std::erase_if(bc.blocks, [&](const Block& b) { return b.cardinality(bc.task) == 0; });
}

}  // namespace detail

// One block per whitespace token; an entity is listed once per distinct token.
inline BlockCollection token_blocking(const std::vector<EntityProfile>& source_a,
                                      const std::vector<EntityProfile>& source_b, Task task) {
  std::unordered_map<std::string_view, Block> by_token;
  auto add = [&](const std::vector<EntityProfile>& profiles, bool right) {
    for (const auto& p : profiles) {
      for (auto tok : whitespace_tokens(p.agnostic_text)) {
        // profiles arrive in id order, so a repeat of this token is at the back
        auto& ids = right ? by_token[tok].right : by_token[tok].left;
        if (ids.empty() || ids.back() != p.id) ids.push_back(p.id);
      }
    }
  };
  add(source_a, false);
  if (task == Task::RecordLinkage) add(source_b, true);

  BlockCollection bc;
  bc.task = task;
  bc.entities_left = source_a.size();
  bc.entities_right = task == Task::RecordLinkage ? source_b.size() : 0;
  bc.blocks.reserve(by_token.size());
  for (auto& [tok, block] : by_token) {
    block.signature = std::string(tok);
    bc.blocks.push_back(std::move(block));
  }
  detail::drop_degenerate(bc);
  std::sort(bc.blocks.begin(), bc.blocks.end(),
            [](const Block& a, const Block& b) { return a.signature < b.signature; });
  return bc;
}

inline BlockCollection token_blocking(const Dataset& ds) {
  return token_blocking(ds.source_a, ds.source_b, ds.task);
}

// Comparison-based purging. Distinct cardinalities c_1 < ... < c_m, with
// cumulative assignments A_j and pairs P_j over blocks with ||b|| <= c_j.
// Walking down from the top, level t is purged while A_{t-1}/P_{t-1} is at
// least `smoothing` times A_t/P_t; survivors are the blocks with ||b|| <= c_t.
inline BlockCollection block_purging(BlockCollection bc, double smoothing = 1.025) {
  if (bc.blocks.empty()) return bc;
  std::map<std::uint64_t, std::pair<double, double>> levels;  // c -> (assignments, pairs)
  for (const auto& b : bc.blocks) {
    auto& [a, p] = levels[b.cardinality(bc.task)];
    a += static_cast<double>(b.size());
    p += static_cast<double>(b.cardinality(bc.task));
  }
  std::vector<std::uint64_t> card;
  std::vector<double> cum_a, cum_p;
  for (const auto& [c, ap] : levels) {
    card.push_back(c);
    cum_a.push_back((cum_a.empty() ? 0.0 : cum_a.back()) + ap.first);
    cum_p.push_back((cum_p.empty() ? 0.0 : cum_p.back()) + ap.second);
  }
  std::size_t t = card.size() - 1;
  while (t > 0 && cum_a[t - 1] * cum_p[t] >= smoothing * cum_a[t] * cum_p[t - 1]) --t;
  const std::uint64_t max_card = card[t];
  std::erase_if(bc.blocks, [&](const Block& b) { return b.cardinality(bc.task) > max_card; });
  return bc;
}

// Each entity keeps ceil(ratio * |B_i|) of its blocks, the smallest by
// cardinality (ties by signature); blocks left without a pair are dropped.
inline BlockCollection block_filtering(const BlockCollection& bc, double ratio = 0.8) {
  const bool rl = bc.task == Task::RecordLinkage;
  // per side, per entity: block indices (ascending = signature order)
  std::array<std::vector<std::vector<std::uint32_t>>, 2> member;
  member[0].resize(bc.entities_left);
  member[1].resize(bc.entities_right);
  for (std::uint32_t bi = 0; bi < bc.blocks.size(); ++bi) {
    for (EntityId e : bc.blocks[bi].left) member[0].at(e).push_back(bi);
    for (EntityId e : bc.blocks[bi].right) member[1].at(e).push_back(bi);
  }

  BlockCollection out;
  out.task = bc.task;
  out.entities_left = bc.entities_left;
  out.entities_right = bc.entities_right;
  out.blocks.resize(bc.blocks.size());
  for (std::size_t bi = 0; bi < bc.blocks.size(); ++bi)
    out.blocks[bi].signature = bc.blocks[bi].signature;

  for (int side = 0; side < (rl ? 2 : 1); ++side) {
    for (EntityId e = 0; e < member[side].size(); ++e) {
      auto& blocks = member[side][e];
      if (blocks.empty()) continue;
      const auto keep = static_cast<std::size_t>(
          std::ceil(ratio * static_cast<double>(blocks.size()) - 1e-9));
      std::stable_sort(blocks.begin(), blocks.end(), [&](std::uint32_t x, std::uint32_t y) {
        return bc.blocks[x].cardinality(bc.task) < bc.blocks[y].cardinality(bc.task);
      });
      blocks.resize(std::min(keep, blocks.size()));
      for (std::uint32_t bi : blocks)
        (side == 0 ? out.blocks[bi].left : out.blocks[bi].right).push_back(e);
    }
  }
  detail::drop_degenerate(out);
  return out;
}

enum class BlockWeighting : std::uint8_t {
  CB = 1,      // W1
  Cosine,      // W2
  Dice,        // W3
  Jaccard,     // W4
  SN_CB,       // W5
  SN_Cosine,   // W6
  SN_Dice,     // W7
  SN_Jaccard,  // W8
  CN_CB,       // W9
  CN_Cosine,   // W10
  CN_Dice,     // W11
  CN_Jaccard,  // W12
  ECB,         // W13
  EJS,         // W14
};

inline constexpr std::array<std::string_view, 14> kBlockWeightingNames = {
    "CB",    "COSINE",    "DICE",    "JACCARD",    "SN-CB", "SN-COSINE", "SN-DICE",
    "SN-JACCARD", "CN-CB", "CN-COSINE", "CN-DICE", "CN-JACCARD", "ECB",  "EJS"};

inline std::string_view to_string(BlockWeighting w) {
  return kBlockWeightingNames[static_cast<std::size_t>(w) - 1];
}

inline std::vector<BlockWeighting> all_block_weightings() {
  std::vector<BlockWeighting> out;
  for (int i = 1; i <= 14; ++i) out.push_back(static_cast<BlockWeighting>(i));
  return out;
}

// Accepts "W1".."W14" or the scheme name (case-insensitive, '_' == '-').
inline BlockWeighting parse_block_weighting(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(c == '_' ? '-' : static_cast<char>(std::toupper(
                                                       static_cast<unsigned char>(c))));
  if (s.size() >= 2 && s[0] == 'W') {
    int n = 0;
    bool digits = true;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) digits = false;
      else n = n * 10 + (s[i] - '0');
    }
    if (digits && n >= 1 && n <= 14) return static_cast<BlockWeighting>(n);
  }
  if (s == "CBS") s = "CB";  // the names used in result tables
  if (s == "CN-CBS") s = "CN-CB";
  if (s == "SN-CBS") s = "SN-CB";
  for (std::size_t i = 0; i < kBlockWeightingNames.size(); ++i)
    if (kBlockWeightingNames[i] == s) return static_cast<BlockWeighting>(i + 1);
  throw ConfigError("unknown blocking weighting scheme '" + std::string(text) + "'");
}

// B_i per entity with its size- and cardinality-normalized masses.
struct EntityBlocks {
  std::vector<std::uint32_t> blocks;  // indices into the collection, ascending
  double sn_mass = 0.0;               // sum 1/|b|
  double cn_mass = 0.0;               // sum 1/||b||
};

struct EntityBlockIndex {
  std::vector<EntityBlocks> left;
  std::vector<EntityBlocks> right;
};

inline EntityBlockIndex entity_block_index(const BlockCollection& bc) {
  EntityBlockIndex idx;
  idx.left.resize(bc.entities_left);
  idx.right.resize(bc.entities_right);
  for (std::uint32_t bi = 0; bi < bc.blocks.size(); ++bi) {
    const Block& b = bc.blocks[bi];
    const double inv_size = 1.0 / static_cast<double>(b.size());
    const double inv_card = 1.0 / static_cast<double>(b.cardinality(bc.task));
    auto put = [&](EntityBlocks& eb) {
      eb.blocks.push_back(bi);
      eb.sn_mass += inv_size;
      eb.cn_mass += inv_card;
    };
    for (EntityId e : b.left) put(idx.left.at(e));
    for (EntityId e : b.right) put(idx.right.at(e));
  }
  return idx;
}

// Shared-block statistics for one co-occurring pair.
struct CoOccurrence {
  double common = 0.0;     // |B_i ∩ B_j|
  double sn_common = 0.0;  // sum over shared blocks of 1/|b|
  double cn_common = 0.0;  // sum over shared blocks of 1/||b||
};

struct EdgeContext {
  double blocks_i = 0.0, blocks_j = 0.0;  // |B_i|, |B_j|
  double sn_i = 0.0, sn_j = 0.0;
  double cn_i = 0.0, cn_j = 0.0;
  double total_blocks = 0.0;              // |B|
  double degree_i = 0.0, degree_j = 0.0;  // |v_i|, |v_j|
  double total_edges = 0.0;               // |E|
};

namespace detail {

inline double cosine(double common, double x, double y) { return common / std::sqrt(x * y); }
inline double dice(double common, double x, double y) { return 2.0 * common / (x + y); }
inline double jaccard(double common, double x, double y) { return common / (x + y - common); }

}  // namespace detail

// Weight of one edge under `scheme`. Never negative.
inline double block_weight(BlockWeighting scheme, const CoOccurrence& co, const EdgeContext& c) {
  using detail::cosine;
  using detail::dice;
  using detail::jaccard;
  double w = 0.0;
  switch (scheme) {
    case BlockWeighting::CB: w = co.common; break;
    case BlockWeighting::Cosine: w = cosine(co.common, c.blocks_i, c.blocks_j); break;
    case BlockWeighting::Dice: w = dice(co.common, c.blocks_i, c.blocks_j); break;
    case BlockWeighting::Jaccard: w = jaccard(co.common, c.blocks_i, c.blocks_j); break;
    case BlockWeighting::SN_CB: w = co.sn_common; break;
    case BlockWeighting::SN_Cosine: w = cosine(co.sn_common, c.sn_i, c.sn_j); break;
    case BlockWeighting::SN_Dice: w = dice(co.sn_common, c.sn_i, c.sn_j); break;
    case BlockWeighting::SN_Jaccard: w = jaccard(co.sn_common, c.sn_i, c.sn_j); break;
    case BlockWeighting::CN_CB: w = co.cn_common; break;
    case BlockWeighting::CN_Cosine: w = cosine(co.cn_common, c.cn_i, c.cn_j); break;
    case BlockWeighting::CN_Dice: w = dice(co.cn_common, c.cn_i, c.cn_j); break;
    case BlockWeighting::CN_Jaccard: w = jaccard(co.cn_common, c.cn_i, c.cn_j); break;
    case BlockWeighting::ECB:
      w = co.common * std::log(c.total_blocks / c.blocks_i) *
          std::log(c.total_blocks / c.blocks_j);
      break;
    case BlockWeighting::EJS:
      w = jaccard(co.common, c.blocks_i, c.blocks_j) * std::log(c.total_edges / c.degree_i) *
          std::log(c.total_edges / c.degree_j);
      break;
    default: throw ConfigError("unknown blocking weighting scheme");
  }
  return w > 0.0 ? w : 0.0;
}

// Edges of the similarity graph, sorted by (left, right), one per canonical
// co-occurring pair.
inline std::vector<WeightedPair> build_graph(const BlockCollection& bc, BlockWeighting scheme) {
  const bool rl = bc.task == Task::RecordLinkage;
  const auto idx = entity_block_index(bc);
  const std::size_t others = rl ? bc.entities_right : bc.entities_left;

  struct RawEdge {
    EntityId i, j;
    CoOccurrence co;
  };
  std::vector<RawEdge> edges;
  std::vector<CoOccurrence> acc(others);
  std::vector<char> seen(others, 0);
  std::vector<EntityId> touched;
  for (EntityId i = 0; i < idx.left.size(); ++i) {
    for (std::uint32_t bi : idx.left[i].blocks) {
      const Block& b = bc.blocks[bi];
      const double inv_size = 1.0 / static_cast<double>(b.size());
      const double inv_card = 1.0 / static_cast<double>(b.cardinality(bc.task));
      for (EntityId j : rl ? b.right : b.left) {
        if (!rl && j <= i) continue;
        if (!seen[j]) {
          seen[j] = 1;
          touched.push_back(j);
        }
        acc[j].common += 1.0;
        acc[j].sn_common += inv_size;
        acc[j].cn_common += inv_card;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (EntityId j : touched) {
      edges.push_back({i, j, acc[j]});
      acc[j] = {};
      seen[j] = 0;
    }
    touched.clear();
  }

  std::vector<double> degree_left(idx.left.size(), 0.0), degree_right(idx.right.size(), 0.0);
  for (const auto& e : edges) {
    degree_left[e.i] += 1.0;
    (rl ? degree_right[e.j] : degree_left[e.j]) += 1.0;
  }

  const double total_blocks = static_cast<double>(bc.blocks.size());
  const double total_edges = static_cast<double>(edges.size());
  std::vector<WeightedPair> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    const EntityBlocks& bi = idx.left[e.i];
    const EntityBlocks& bj = rl ? idx.right[e.j] : idx.left[e.j];
    EdgeContext c;
    c.blocks_i = static_cast<double>(bi.blocks.size());
    c.blocks_j = static_cast<double>(bj.blocks.size());
    c.sn_i = bi.sn_mass;
    c.sn_j = bj.sn_mass;
    c.cn_i = bi.cn_mass;
    c.cn_j = bj.cn_mass;
    c.total_blocks = total_blocks;
    c.degree_i = degree_left[e.i];
    c.degree_j = rl ? degree_right[e.j] : degree_left[e.j];
    c.total_edges = total_edges;
    out.push_back({e.i, e.j, block_weight(scheme, e.co, c)});
  }
  return out;
}

// Token Blocking -> Block Purging -> Block Filtering -> weighted graph.
inline std::vector<WeightedPair> blocking_workflow(const Dataset& ds, BlockWeighting scheme) {
  return build_graph(block_filtering(block_purging(token_blocking(ds))), scheme);
}

}  // namespace progres
