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

// Brute-force reference implementations. Deliberately naive: string-keyed
// maps, all-pairs loops, formulas written out term by term. Shares only the
// plain data types with the library.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "progres/datamodel.hpp"
#include "progres/dense_vectors.hpp"
#include "progres/filter_sort.hpp"

namespace oracle {

using progres::EntityId;
using progres::EntityProfile;
using progres::Task;
using Key = std::pair<EntityId, EntityId>;
using Graph = std::map<Key, double>;

inline std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::set<std::string> distinct_words(const std::string& text) {
  const auto w = split_words(text);
  return {w.begin(), w.end()};
}

inline Key canonical(Task task, EntityId query, EntityId neighbor, bool query_is_a) {
  if (task == Task::Dedup) return {std::min(query, neighbor), std::max(query, neighbor)};
  return query_is_a ? Key{query, neighbor} : Key{neighbor, query};
}

inline void put_max(Graph& g, Key k, double w) {
  auto it = g.find(k);
  if (it == g.end() || w > it->second) g[k] = w;
}

// Per query: score every candidate, sort (score desc, id asc), keep k.
inline void top_k_into(Graph& g, Task task, bool query_is_a, EntityId q,
                       std::vector<std::pair<double, EntityId>> scored, std::size_t k) {
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  for (std::size_t r = 0; r < scored.size() && r < k; ++r)
    put_max(g, canonical(task, q, scored[r].second, query_is_a),
            scored[r].first < 0.0 ? 0.0 : scored[r].first);
}

// Which sources are indexed: pairs (indexed_is_a) per direction.
inline std::vector<bool> indexed_sides(const std::string& indexing, std::size_t na,
                                       std::size_t nb) {
  if (indexing == "both") return {true, false};
  if (indexing == "smallest") return {!(nb < na)};
  return {!(nb > na)};  // largest
}

// ---- nearest neighbors over dense vectors ---------------------------------

inline double dense_sim(const std::vector<double>& v, const std::vector<double>& w,
                        bool cosine) {
  if (cosine) {
    double dot = 0, nv = 0, nw = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += v[i] * w[i];
      nv += v[i] * v[i];
      nw += w[i] * w[i];
    }
    if (nv == 0 || nw == 0) return 0.0;
    return dot / (std::sqrt(nv) * std::sqrt(nw));
  }
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i) d += (v[i] - w[i]) * (v[i] - w[i]);
  return 1.0 / (1.0 + std::sqrt(d));
}

inline Graph nn(const std::vector<std::vector<double>>& a,
                const std::vector<std::vector<double>>& b, Task task, std::size_t k,
                bool cosine, const std::string& indexing) {
  Graph g;
  if (task == Task::Dedup) {
    for (EntityId q = 0; q < a.size(); ++q) {
      std::vector<std::pair<double, EntityId>> scored;
      for (EntityId e = 0; e < a.size(); ++e)
        if (e != q) scored.push_back({dense_sim(a[e], a[q], cosine), e});
      top_k_into(g, task, true, q, scored, k);
    }
    return g;
  }
  for (bool a_indexed : indexed_sides(indexing, a.size(), b.size())) {
    const auto& idx = a_indexed ? a : b;
    const auto& qry = a_indexed ? b : a;
    for (EntityId q = 0; q < qry.size(); ++q) {
      std::vector<std::pair<double, EntityId>> scored;
      for (EntityId e = 0; e < idx.size(); ++e) scored.push_back({dense_sim(idx[e], qry[q], cosine), e});
      top_k_into(g, task, !a_indexed, q, scored, k);
    }
  }
  return g;
}

// ---- sparse join ----------------------------------------------------------

using Features = std::map<std::string, double>;

inline std::vector<std::string> grams(const std::string& text, bool chars, int n) {
  std::vector<std::string> out;
  if (chars) {
    for (std::size_t i = 0; i + n <= text.size(); ++i) out.push_back(text.substr(i, n));
  } else {
    const auto w = split_words(text);
    for (std::size_t i = 0; i + n <= w.size(); ++i) {
      std::string g = w[i];
      for (int m = 1; m < n; ++m) g += " " + w[i + m];
      out.push_back(g);
    }
  }
  return out;
}

inline std::map<std::string, int> counts(const std::string& text, bool chars, int n) {
  std::map<std::string, int> c;
  for (const auto& g : grams(text, chars, n)) c[g]++;
  return c;
}

// scoring: "bs", "tf", "tfidf". df/N from the indexed corpus; features the
// corpus never saw are dropped, TF's maximum still counts them.
inline Features score(const std::map<std::string, int>& c, const std::map<std::string, int>& df,
                      double corpus, const std::string& scoring) {
  int max_count = 0;
  for (const auto& [g, n] : c) max_count = std::max(max_count, n);
  Features f;
  for (const auto& [g, n] : c) {
    auto it = df.find(g);
    if (it == df.end()) continue;
    double s = 1.0;
    if (scoring != "bs") s = static_cast<double>(n) / max_count;
    if (scoring == "tfidf") s *= std::log(corpus / it->second);
    if (s > 0) f[g] = s;
  }
  return f;
}

inline double sparse_sim(const Features& v, const Features& w, bool cosine) {
  if (cosine) {
    double dot = 0, nv = 0, nw = 0;
    for (const auto& [g, x] : v) {
      nv += x * x;
      auto it = w.find(g);
      if (it != w.end()) dot += x * it->second;
    }
    for (const auto& [g, y] : w) nw += y * y;
    return dot / (std::sqrt(nv) * std::sqrt(nw));
  }
  std::map<std::string, double> diff;
  for (const auto& [g, x] : v) diff[g] += x;
  for (const auto& [g, y] : w) diff[g] -= y;
  double d = 0;
  for (const auto& [g, x] : diff) d += x * x;
  return 1.0 / (1.0 + std::sqrt(d));
}

inline bool share_feature(const Features& v, const Features& w) {
  for (const auto& [g, x] : v)
    if (w.count(g)) return true;
  return false;
}

inline Graph join(const std::vector<EntityProfile>& a, const std::vector<EntityProfile>& b,
                  Task task, std::size_t k, bool cosine, const std::string& indexing,
                  bool chars, int n, const std::string& scoring) {
  Graph g;
  std::vector<bool> sides = task == Task::Dedup ? std::vector<bool>{true}
                                                : indexed_sides(indexing, a.size(), b.size());
  for (bool a_indexed : sides) {
    const auto& idx = a_indexed ? a : b;
    const auto& qry = task == Task::Dedup ? a : (a_indexed ? b : a);
    std::map<std::string, int> df;
    for (const auto& p : idx)
      for (const auto& [gr, c] : counts(p.agnostic_text, chars, n)) df[gr]++;
    std::vector<Features> iv, qv;
    for (const auto& p : idx)
      iv.push_back(score(counts(p.agnostic_text, chars, n), df, idx.size(), scoring));
    for (const auto& p : qry)
      qv.push_back(score(counts(p.agnostic_text, chars, n), df, idx.size(), scoring));
    for (EntityId q = 0; q < qry.size(); ++q) {
      std::vector<std::pair<double, EntityId>> scored;
      for (EntityId e = 0; e < idx.size(); ++e) {
        if (task == Task::Dedup && e == q) continue;
        if (!share_feature(qv[q], iv[e])) continue;
        scored.push_back({sparse_sim(qv[q], iv[e], cosine), e});
      }
      top_k_into(g, task, task == Task::Dedup || !a_indexed, q, scored, k);
    }
  }
  return g;
}

// ---- blocking -------------------------------------------------------------

struct OBlock {
  std::vector<EntityId> a, b;  // b unused in Dedup
};
using Blocks = std::map<std::string, OBlock>;

inline double block_size(const OBlock& x) { return static_cast<double>(x.a.size() + x.b.size()); }
inline double block_card(const OBlock& x, Task task) {
  if (task == Task::RecordLinkage) return static_cast<double>(x.a.size() * x.b.size());
  const double n = static_cast<double>(x.a.size());
  return n * (n - 1) / 2;
}

inline Blocks token_blocks(const std::vector<EntityProfile>& a,
                           const std::vector<EntityProfile>& b, Task task) {
  Blocks out;
  for (const auto& p : a)
    for (const auto& t : distinct_words(p.agnostic_text)) out[t].a.push_back(p.id);
  if (task == Task::RecordLinkage)
    for (const auto& p : b)
      for (const auto& t : distinct_words(p.agnostic_text)) out[t].b.push_back(p.id);
  for (auto it = out.begin(); it != out.end();)
    it = block_card(it->second, task) == 0 ? out.erase(it) : std::next(it);
  return out;
}

// Top-down: drop the largest remaining level while that lifts
// assignments/pairs by the smoothing factor.
inline Blocks purge(const Blocks& in, Task task, double smoothing = 1.025) {
  std::set<double> levels;
  for (const auto& [s, x] : in) levels.insert(block_card(x, task));
  std::vector<double> lv(levels.begin(), levels.end());
  auto ratio_parts = [&](double limit) {
    double assign = 0, pairs = 0;
    for (const auto& [s, x] : in)
      if (block_card(x, task) <= limit) {
        assign += block_size(x);
        pairs += block_card(x, task);
      }
    return std::pair<double, double>{assign, pairs};
  };
  std::size_t t = lv.empty() ? 0 : lv.size() - 1;
  while (t > 0) {
    const auto [a_hi, p_hi] = ratio_parts(lv[t]);
    const auto [a_lo, p_lo] = ratio_parts(lv[t - 1]);
    if (a_lo * p_hi >= smoothing * a_hi * p_lo) --t;
    else break;
  }
  Blocks out;
  for (const auto& [s, x] : in)
    if (!lv.empty() && block_card(x, task) <= lv[t]) out[s] = x;
  return out;
}

inline Blocks filter(const Blocks& in, Task task) {
  // entity -> (card, signature) of its blocks, per side
  std::map<std::pair<int, EntityId>, std::vector<std::pair<double, std::string>>> member;
  for (const auto& [s, x] : in) {
    for (auto e : x.a) member[{0, e}].push_back({block_card(x, task), s});
    for (auto e : x.b) member[{1, e}].push_back({block_card(x, task), s});
  }
  Blocks out;
  for (auto& [who, list] : member) {
    std::sort(list.begin(), list.end());
    const std::size_t keep = (4 * list.size() + 4) / 5;  // ceil(0.8 n)
    for (std::size_t i = 0; i < keep; ++i) {
      auto& blk = out[list[i].second];
      (who.first == 0 ? blk.a : blk.b).push_back(who.second);
    }
  }
  for (auto& [s, x] : out) {
    std::sort(x.a.begin(), x.a.end());
    std::sort(x.b.begin(), x.b.end());
  }
  for (auto it = out.begin(); it != out.end();)
    it = block_card(it->second, task) == 0 ? out.erase(it) : std::next(it);
  return out;
}

// scheme 1..14
inline Graph block_graph(const Blocks& blocks, Task task, std::size_t na, std::size_t nb,
                         int scheme) {
  const bool rl = task == Task::RecordLinkage;
  std::vector<std::set<std::string>> bi(na), bj(rl ? nb : na);
  for (const auto& [s, x] : blocks) {
    for (auto e : x.a) bi[e].insert(s);
    for (auto e : x.b) bj[e].insert(s);
  }
  if (!rl) bj = bi;
  auto sn = [&](const std::set<std::string>& bs) {
    double m = 0;
    for (const auto& s : bs) m += 1.0 / block_size(blocks.at(s));
    return m;
  };
  auto cn = [&](const std::set<std::string>& bs) {
    double m = 0;
    for (const auto& s : bs) m += 1.0 / block_card(blocks.at(s), task);
    return m;
  };
  std::map<Key, std::set<std::string>> shared;
  for (EntityId i = 0; i < na; ++i)
    for (EntityId j = rl ? 0 : i + 1; j < (rl ? nb : na); ++j) {
      std::set<std::string> common;
      std::set_intersection(bi[i].begin(), bi[i].end(), bj[j].begin(), bj[j].end(),
                            std::inserter(common, common.begin()));
      if (!common.empty()) shared[{i, j}] = common;
    }
  std::map<EntityId, double> deg_i, deg_j;
  for (const auto& [k, c] : shared) {
    deg_i[k.first] += 1;
    (rl ? deg_j[k.second] : deg_i[k.second]) += 1;
  }
  if (!rl) deg_j = deg_i;
  const double total_blocks = static_cast<double>(blocks.size());
  const double total_edges = static_cast<double>(shared.size());

  Graph g;
  for (const auto& [k, common] : shared) {
    const auto& Bi = bi[k.first];
    const auto& Bj = bj[k.second];
    const double cb = static_cast<double>(common.size());
    const double ni = static_cast<double>(Bi.size()), nj = static_cast<double>(Bj.size());
    double sn_cb = 0, cn_cb = 0;
    for (const auto& s : common) {
      sn_cb += 1.0 / block_size(blocks.at(s));
      cn_cb += 1.0 / block_card(blocks.at(s), task);
    }
    const double si = sn(Bi), sj = sn(Bj), ci = cn(Bi), cj = cn(Bj);
    double w = 0;
    switch (scheme) {
      case 1: w = cb; break;
      case 2: w = cb / std::sqrt(ni * nj); break;
      case 3: w = 2 * cb / (ni + nj); break;
      case 4: w = cb / (ni + nj - cb); break;
      case 5: w = sn_cb; break;
      case 6: w = sn_cb / std::sqrt(si * sj); break;
      case 7: w = 2 * sn_cb / (si + sj); break;
      case 8: w = sn_cb / (si + sj - sn_cb); break;
      case 9: w = cn_cb; break;
      case 10: w = cn_cb / std::sqrt(ci * cj); break;
      case 11: w = 2 * cn_cb / (ci + cj); break;
      case 12: w = cn_cb / (ci + cj - cn_cb); break;
      case 13: w = cb * std::log(total_blocks / ni) * std::log(total_blocks / nj); break;
      case 14:
        w = cb / (ni + nj - cb) * std::log(total_edges / deg_i[k.first]) *
            std::log(total_edges / deg_j[k.second]);
        break;
    }
    g[k] = w < 0 ? 0 : w;
  }
  return g;
}

inline Graph blocking(const std::vector<EntityProfile>& a, const std::vector<EntityProfile>& b,
                      Task task, int scheme) {
  const auto blocks = filter(purge(token_blocks(a, b, task), task), task);
  return block_graph(blocks, task, a.size(), task == Task::RecordLinkage ? b.size() : 0, scheme);
}

// ---- sorted neighborhood --------------------------------------------------

// Checks a slot layout against the profiles: every token contributes one
// contiguous group, groups in ascending token order, each holding exactly the
// entities containing that token. Returns an empty string when valid.
inline std::string check_layout(const progres::SortedPositionList& list,
                                const std::vector<EntityProfile>& a,
                                const std::vector<EntityProfile>& b, Task task) {
  std::map<std::string, std::multiset<std::uint32_t>> groups;
  for (const auto& p : a)
    for (const auto& t : distinct_words(p.agnostic_text)) groups[t].insert(p.id);
  if (task == Task::RecordLinkage)
    for (const auto& p : b)
      for (const auto& t : distinct_words(p.agnostic_text))
        groups[t].insert(static_cast<std::uint32_t>(a.size() + p.id));
  std::size_t slot = 0;
  for (const auto& [tok, members] : groups) {
    if (slot + members.size() > list.slots.size()) return "P too short at token " + tok;
    std::multiset<std::uint32_t> got(list.slots.begin() + slot,
                                     list.slots.begin() + slot + members.size());
    if (got != members) return "group mismatch at token " + tok;
    slot += members.size();
  }
  if (slot != list.slots.size()) return "P has extra slots";
  for (std::uint32_t node = 0; node < list.positions.size(); ++node)
    for (auto p : list.positions[node])
      if (list.slots.at(p) != node) return "positions inconsistent with P";
  return {};
}

// scheme: "ACF", "NCF", "DNCF", "CNCF", "ID".
inline double window_score(const std::vector<std::uint32_t>& pi,
                           const std::vector<std::uint32_t>& pj, int w,
                           const std::string& scheme) {
  double acf = 0, inv = 0;
  for (auto x : pi)
    for (auto y : pj) {
      const double d = std::fabs(static_cast<double>(x) - static_cast<double>(y));
      if (d < w) {
        acf += 1;
        inv += 1.0 / d;
      }
    }
  if (acf == 0) return 0;
  const double ni = static_cast<double>(pi.size()), nj = static_cast<double>(pj.size());
  auto cap = [](double x) { return std::min(x, 1.0); };
  if (scheme == "ACF") return acf;
  if (scheme == "ID") return inv;
  if (scheme == "NCF") return ni + nj - acf <= 0 ? 1.0 : cap(acf / (ni + nj - acf));
  if (scheme == "DNCF") return cap(2 * acf / (ni + nj));
  return cap(acf / std::sqrt(ni * nj));  // CNCF
}

inline Graph sorting(const progres::SortedPositionList& list, Task task, int w,
                     const std::string& scheme, bool global) {
  const bool rl = task == Task::RecordLinkage;
  Graph g;
  const std::size_t nl = list.entities_left;
  const std::size_t nr = rl ? list.entities_right : nl;
  for (EntityId i = 0; i < nl; ++i)
    for (EntityId j = rl ? 0 : i + 1; j < nr; ++j) {
      const auto& pi = list.positions[i];
      const auto& pj = list.positions[rl ? nl + j : j];
      double s = 0;
      if (global) {
        for (int u = 2; u <= w; ++u) s += window_score(pi, pj, u, scheme);
      } else {
        s = window_score(pi, pj, w, scheme);
      }
      if (s > 0) g[{i, j}] = s;
    }
  return g;
}

// ---- scheduling -----------------------------------------------------------

struct Edge {
  EntityId l, r;
  double w;
};

inline bool first(const Edge& x, const Edge& y) {
  if (x.w != y.w) return x.w > y.w;
  if (x.l != y.l) return x.l < y.l;
  return x.r < y.r;
}

// partition: 0 = left side, 1 = right side, 2 = both sides (dedup).
struct Node {
  EntityId id;
  double score;
  std::vector<Edge> edges;
};

inline std::vector<Node> nodes(const std::vector<Edge>& edges, int partition) {
  std::map<EntityId, std::vector<Edge>> nb;
  for (const auto& e : edges) {
    if (partition == 0 || partition == 2) nb[e.l].push_back(e);
    if (partition == 1 || partition == 2) nb[e.r].push_back(e);
  }
  std::vector<Node> out;
  for (auto& [id, list] : nb) {
    std::sort(list.begin(), list.end(), first);
    double sum = 0;
    for (const auto& e : list) sum += e.w;
    out.push_back({id, sum / static_cast<double>(list.size()), list});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Node& a, const Node& b) { return a.score > b.score; });
  return out;
}

inline std::vector<Edge> ec(std::vector<Edge> edges, std::size_t budget) {
  std::sort(edges.begin(), edges.end(), first);
  if (edges.size() > budget) edges.resize(budget);
  return edges;
}

inline std::vector<Edge> dfs_fill(const std::vector<Node>& ns, std::vector<Edge> out,
                                  std::set<Key> done, std::size_t budget) {
  for (const auto& n : ns)
    for (const auto& e : n.edges) {
      if (out.size() == budget) return out;
      if (done.insert({e.l, e.r}).second) out.push_back(e);
    }
  return out;
}

inline std::vector<Edge> dfs(const std::vector<Edge>& edges, std::size_t budget, int partition) {
  return dfs_fill(nodes(edges, partition), {}, {}, budget);
}

inline std::vector<Edge> bfs(const std::vector<Edge>& edges, std::size_t budget, int partition) {
  const auto ns = nodes(edges, partition);
  std::vector<Edge> out;
  std::set<Key> done;
  bool progress = true;
  while (progress && out.size() < budget) {
    progress = false;
    for (const auto& n : ns) {
      if (out.size() == budget) break;
      for (const auto& e : n.edges)  // the node's best edge not yet emitted
        if (!done.count({e.l, e.r})) {
          done.insert({e.l, e.r});
          out.push_back(e);
          progress = true;
          break;
        }
    }
  }
  return out;
}

inline std::vector<Edge> hybrid(const std::vector<Edge>& edges, std::size_t budget,
                                int partition) {
  const auto ns = nodes(edges, partition);
  std::map<Key, Edge> best;
  for (const auto& n : ns) best[{n.edges[0].l, n.edges[0].r}] = n.edges[0];
  std::vector<Edge> phase1;
  for (const auto& [k, e] : best) phase1.push_back(e);
  std::sort(phase1.begin(), phase1.end(), first);
  std::vector<Edge> out;
  std::set<Key> done;
  for (const auto& e : phase1) {
    if (out.size() == budget) return out;
    out.push_back(e);
    done.insert({e.l, e.r});
  }
  return dfs_fill(ns, out, done, budget);
}

// ---- progressive recall ---------------------------------------------------

// Numerator of PR over N * |Dup|: sum over i = 1..N of duplicates within the
// first min(i, |schedule|) pairs.
inline std::uint64_t pr_numerator(const std::vector<Key>& schedule, const std::set<Key>& dups,
                                  std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::set<Key> seen;
    for (std::size_t r = 0; r < std::min(i, schedule.size()); ++r)
      if (dups.count(schedule[r])) seen.insert(schedule[r]);
    total += seen.size();
  }
  return total;
}

}  // namespace oracle
