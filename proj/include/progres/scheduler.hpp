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

// Budgeted ordering of weighted candidate pairs.
//
// Edge-centric (EC) sorts every pair globally. The node-centric schedulers
// score each node of the scheduling partition by the mean weight of its
// neighborhood and then either drain one neighborhood at a time (DFS), take
// one edge per node per round (BFS), or emit every node's best edge first
// and fall back to DFS for the rest (Hybrid).
//
// Ties everywhere: weight desc, then left id asc, then right id asc; nodes
// with equal scores by id asc.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "progres/candidates.hpp"
#include "progres/datamodel.hpp"

namespace progres {

using Schedule = std::vector<WeightedPair>;

enum class SchedulerKind : std::uint8_t { EC, DFS, BFS, Hybrid };

inline constexpr std::array<SchedulerKind, 4> kAllSchedulers = {
    SchedulerKind::EC, SchedulerKind::DFS, SchedulerKind::BFS, SchedulerKind::Hybrid};

inline std::string_view to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::EC: return "ec";
    case SchedulerKind::DFS: return "dfs";
    case SchedulerKind::BFS: return "bfs";
    case SchedulerKind::Hybrid: return "hybrid";
  }
  return "?";
}

inline SchedulerKind parse_scheduler(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "ec" || s == "top") return SchedulerKind::EC;
  if (s == "dfs") return SchedulerKind::DFS;
  if (s == "bfs") return SchedulerKind::BFS;
  if (s == "hybrid" || s == "hb") return SchedulerKind::Hybrid;
  throw ConfigError("unknown scheduler '" + std::string(text) + "'");
}

// Strict "comes first" order between edges.
inline bool edge_before(const WeightedPair& a, const WeightedPair& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.left != b.left) return a.left < b.left;
  return a.right < b.right;
}

namespace detail {

inline void check_budget(std::size_t budget) {
  if (budget < 1) throw ConfigError("budget must be >= 1");
}

}  // namespace detail

struct EdgeBefore {
  bool operator()(const WeightedPair& a, const WeightedPair& b) const { return edge_before(a, b); }
};

inline Schedule schedule_ec(std::span<const WeightedPair> pairs, std::size_t budget) {
  detail::check_budget(budget);
  // Max-heap under edge_before keeps the worst retained edge on top.
  Schedule storage;
  storage.reserve(std::min(budget, pairs.size()));
  std::priority_queue<WeightedPair, Schedule, EdgeBefore> top(EdgeBefore{}, std::move(storage));
  for (const auto& p : pairs) {
    if (top.size() < budget) {
      top.push(p);
    } else if (edge_before(p, top.top())) {
      top.pop();
      top.push(p);
    }
  }
  Schedule out;
  out.reserve(top.size());
  while (!top.empty()) {
    out.push_back(top.top());
    top.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// A node of the scheduling partition with its neighborhood.
struct NodeScore {
  EntityId node = 0;
  double score = 0.0;              // mean incident weight
  std::vector<std::uint32_t> edges;  // indices into the pair list, best first
};

// Scored nodes, best first. Left/Right take one side of the bipartite graph;
// Both treats the graph as undirected so every edge sits in two neighborhoods.
inline std::vector<NodeScore> score_nodes(std::span<const WeightedPair> pairs,
                                          Partition partition) {
  std::unordered_map<EntityId, std::uint32_t> slot;
  std::vector<NodeScore> nodes;
  auto attach = [&](EntityId node, std::uint32_t edge) {
    auto [it, inserted] = slot.try_emplace(node, static_cast<std::uint32_t>(nodes.size()));
    if (inserted) nodes.push_back({node, 0.0, {}});
    nodes[it->second].edges.push_back(edge);
  };
  for (std::uint32_t e = 0; e < pairs.size(); ++e) {
    if (pairs[e].weight < 0.0) throw ValidationError("negative pair weight");
    if (partition != Partition::Right) attach(pairs[e].left, e);
    if (partition != Partition::Left) attach(pairs[e].right, e);
  }
  for (auto& n : nodes) {
    std::sort(n.edges.begin(), n.edges.end(), [&](std::uint32_t a, std::uint32_t b) {
      return edge_before(pairs[a], pairs[b]);
    });
    double sum = 0.0;
    for (auto e : n.edges) sum += pairs[e].weight;
    n.score = sum / static_cast<double>(n.edges.size());
  }
  std::sort(nodes.begin(), nodes.end(), [](const NodeScore& a, const NodeScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node < b.node;
  });
  return nodes;
}

namespace detail {

class Emitter {
 public:
  Emitter(std::span<const WeightedPair> pairs, std::size_t budget)
      : pairs_(pairs), budget_(budget), emitted_(pairs.size(), 0) {
    out_.reserve(std::min(budget, pairs.size()));
  }

  bool full() const { return out_.size() >= budget_; }
  bool emitted(std::uint32_t e) const { return emitted_[e] != 0; }

  // Emits edge `e` unless already emitted; returns whether it was.
  bool emit(std::uint32_t e) {
    if (emitted_[e]) return false;
    emitted_[e] = 1;
    out_.push_back(pairs_[e]);
    return true;
  }

  // Drains the nodes' neighborhoods in order.
  void depth_first(const std::vector<NodeScore>& nodes) {
    for (const auto& n : nodes) {
      for (auto e : n.edges) {
        if (full()) return;
        emit(e);
      }
    }
  }

  Schedule take() { return std::move(out_); }

 private:
  std::span<const WeightedPair> pairs_;
  std::size_t budget_;
  std::vector<char> emitted_;
  Schedule out_;
};

}  // namespace detail

inline Schedule schedule_dfs(std::span<const WeightedPair> pairs, std::size_t budget,
                             Partition partition) {
  detail::check_budget(budget);
  detail::Emitter out(pairs, budget);
  out.depth_first(score_nodes(pairs, partition));
  return out.take();
}

inline Schedule schedule_bfs(std::span<const WeightedPair> pairs, std::size_t budget,
                             Partition partition) {
  detail::check_budget(budget);
  const auto nodes = score_nodes(pairs, partition);
  detail::Emitter out(pairs, budget);
  std::vector<std::size_t> cursor(nodes.size(), 0);
  std::vector<std::size_t> active(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) active[i] = i;
  while (!active.empty() && !out.full()) {
    std::size_t kept = 0;
    for (std::size_t i : active) {
      if (out.full()) break;
      const auto& edges = nodes[i].edges;
      auto& c = cursor[i];
      while (c < edges.size() && out.emitted(edges[c])) ++c;
      if (c == edges.size()) continue;
      out.emit(edges[c++]);
      active[kept++] = i;
    }
    active.resize(kept);
  }
  return out.take();
}

inline Schedule schedule_hybrid(std::span<const WeightedPair> pairs, std::size_t budget,
                                Partition partition) {
  detail::check_budget(budget);
  const auto nodes = score_nodes(pairs, partition);
  std::vector<std::uint32_t> best;
  best.reserve(nodes.size());
  for (const auto& n : nodes) best.push_back(n.edges.front());
  std::sort(best.begin(), best.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (a == b) return false;
    return edge_before(pairs[a], pairs[b]);
  });
  best.erase(std::unique(best.begin(), best.end()), best.end());

  detail::Emitter out(pairs, budget);
  for (auto e : best) {
    if (out.full()) break;
    out.emit(e);
  }
  out.depth_first(nodes);
  return out.take();
}

inline Schedule schedule(SchedulerKind kind, std::span<const WeightedPair> pairs,
                         std::size_t budget, Partition partition) {
  switch (kind) {
    case SchedulerKind::EC: return schedule_ec(pairs, budget);
    case SchedulerKind::DFS: return schedule_dfs(pairs, budget, partition);
    case SchedulerKind::BFS: return schedule_bfs(pairs, budget, partition);
    case SchedulerKind::Hybrid: return schedule_hybrid(pairs, budget, partition);
  }
  throw ConfigError("unknown scheduler");
}

}  // namespace progres
