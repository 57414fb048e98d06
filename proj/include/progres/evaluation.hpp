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

// Progressive recall, recall@N, distance from the top (DFT) and budget
// expressions.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "progres/datamodel.hpp"

namespace progres {

// hits[i] = duplicates among the first i+1 verified pairs, i in [0, N).
// Flat past the schedule's end.
struct RecallCurve {
  std::vector<std::uint64_t> hits;
  std::size_t dup_count = 0;

  std::size_t size() const { return hits.size(); }
  double at(std::size_t i) const {
    return static_cast<double>(hits[i]) / static_cast<double>(dup_count);
  }
};

struct RunMetrics {
  double progressive_recall = 0.0;
  double recall_at_budget = 0.0;
  std::size_t budget = 0;
  std::size_t verified = 0;
  std::size_t duplicates_found = 0;
  std::size_t dup_count = 0;
  // Sum of hits over the N slots; progressive_recall = area / (N * |Dup|).
  std::uint64_t area = 0;
  double wall_time = 0.0;          // seconds; filled by the caller
  std::size_t peak_memory = 0;     // bytes; filled by the caller
};

namespace detail {

inline void check_metric_args(const GroundTruth& gt, std::size_t budget) {
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (gt.dup_count() == 0) throw ValidationError("ground truth is empty; recall is undefined");
}

}  // namespace detail

// A pair counts once, at its first occurrence.
inline RecallCurve recall_curve(std::span<const WeightedPair> schedule, const GroundTruth& gt,
                                std::size_t budget) {
  detail::check_metric_args(gt, budget);
  if (schedule.size() > budget)
    throw ValidationError("schedule has " + std::to_string(schedule.size()) +
                          " pairs, more than the budget " + std::to_string(budget));
  RecallCurve curve;
  curve.dup_count = gt.dup_count();
  curve.hits.reserve(budget);
  std::unordered_set<PairKey, PairKeyHash> found;
  std::uint64_t h = 0;
  for (const auto& p : schedule) {
    if (gt.contains(p.key()) && found.insert(p.key()).second) ++h;
    curve.hits.push_back(h);
  }
  curve.hits.resize(budget, h);
  return curve;
}

inline RunMetrics progressive_recall(std::span<const WeightedPair> schedule,
                                     const GroundTruth& gt, std::size_t budget) {
  const auto curve = recall_curve(schedule, gt, budget);
  RunMetrics m;
  m.budget = budget;
  m.verified = schedule.size();
  m.dup_count = gt.dup_count();
  m.duplicates_found = static_cast<std::size_t>(curve.hits.back());
  for (auto h : curve.hits) m.area += h;
  m.progressive_recall =
      static_cast<double>(m.area) / (static_cast<double>(budget) * static_cast<double>(m.dup_count));
  m.recall_at_budget = curve.at(budget - 1);
  return m;
}

// One solution's DFT averaged over the cells where some solution scored.
struct DftEntry {
  std::string solution;
  double mean_dft = 0.0;
  std::size_t cells = 0;
};

// pr[s][c] is solution s's progressive recall in cell c (dataset x budget).
// Cells whose best PR is 0 are excluded. Ascending by mean DFT, then name;
// solutions with no usable cell rank last.
inline std::vector<DftEntry> dft_ranking(const std::vector<std::string>& solutions,
                                         const std::vector<std::vector<double>>& pr) {
  if (solutions.size() != pr.size())
    throw ValidationError("dft_ranking: solution names and PR rows differ in count");
  std::size_t cells = pr.empty() ? 0 : pr.front().size();
  for (const auto& row : pr)
    if (row.size() != cells) throw ValidationError("dft_ranking: ragged PR table");
  std::vector<double> best(cells, 0.0);
  for (const auto& row : pr)
    for (std::size_t c = 0; c < cells; ++c) best[c] = std::max(best[c], row[c]);

  std::vector<DftEntry> out;
  out.reserve(solutions.size());
  for (std::size_t s = 0; s < solutions.size(); ++s) {
    DftEntry e{solutions[s], 0.0, 0};
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (best[c] <= 0.0) continue;
      sum += 1.0 - pr[s][c] / best[c];
      ++e.cells;
    }
    e.mean_dft = e.cells ? sum / static_cast<double>(e.cells) : 1.0;
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const DftEntry& a, const DftEntry& b) {
    if ((a.cells == 0) != (b.cells == 0)) return b.cells == 0;
    if (a.mean_dft != b.mean_dft) return a.mean_dft < b.mean_dft;
    return a.solution < b.solution;
  });
  return out;
}

inline constexpr int kBudgetMultiples = 10;

// n * |Dup| for n = 1..10.
inline std::vector<std::size_t> budget_list(std::size_t dup_count) {
  if (dup_count == 0) throw ValidationError("ground truth is empty; no budgets");
  std::vector<std::size_t> out;
  for (int n = 1; n <= kBudgetMultiples; ++n) out.push_back(static_cast<std::size_t>(n) * dup_count);
  return out;
}

// "250" or "3xdup" (spaces and case ignored).
inline std::size_t resolve_budget(std::string_view expr, std::size_t dup_count) {
  std::string s;
  for (char c : expr)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  std::int64_t n = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, n);
  if (ec != std::errc() || ptr == s.data())
    throw ConfigError("budget '" + std::string(expr) + "' is not an integer or '<n>xdup'");
  std::string_view rest(ptr, static_cast<std::size_t>(end - ptr));
  if (rest.empty()) return Budget(n).value();
  if (rest == "xdup" || rest == "*dup") {
    if (n < 1) throw ConfigError("budget multiple must be >= 1");
    if (dup_count == 0) throw ValidationError("ground truth is empty; '" + s + "' undefined");
    return Budget(n * static_cast<std::int64_t>(dup_count)).value();
  }
  throw ConfigError("budget '" + std::string(expr) + "' is not an integer or '<n>xdup'");
}

}  // namespace progres
