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


#include <gtest/gtest.h>

#include <random>

#include "compare.hpp"
#include "golden_fixture.hpp"
#include "oracle.hpp"
#include "progres/filter_sort.hpp"
#include "random_instances.hpp"

namespace progres {
namespace {

EntityProfile prof(EntityId id, Source s, std::string text) {
  return testing_util::profile(id, s, text);
}

double weight_of(const std::vector<WeightedPair>& g, EntityId l, EntityId r) {
  for (const auto& p : g)
    if (p.left == l && p.right == r) return p.weight;
  return -1.0;
}

TEST(SortedPositions, TokenGroupsInByteOrder) {
  const std::vector<EntityProfile> d = {prof(0, Source::Single, "b a"),
                                        prof(1, Source::Single, "a")};
  const auto list = build_positions(d, {}, Task::Dedup, 42);
  ASSERT_EQ(list.slots.size(), 3u);
  EXPECT_EQ(list.slots[2], 0u);  // group "b" holds only entity 0
  EXPECT_EQ(oracle::check_layout(list, d, {}, Task::Dedup), "");
  EXPECT_EQ(list.positions[0].size(), 2u);
  EXPECT_EQ(list.positions[1].size(), 1u);
}

TEST(SortedPositions, SingleEntitySingleToken) {
  const std::vector<EntityProfile> d = {prof(0, Source::Single, "a b")};
  const auto list = build_positions(d, {}, Task::Dedup, 7);
  EXPECT_EQ(list.slots, (std::vector<std::uint32_t>{0, 0}));
  EXPECT_EQ(list.positions[0], (std::vector<std::uint32_t>{0, 1}));
}

TEST(SortedPositions, LayoutValidAndSeeded) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const Task task = t % 2 ? Task::Dedup : Task::RecordLinkage;
    const auto ds = testing_util::random_dataset(rng, task, 150);
    const auto x = build_positions(ds, 5);
    const auto y = build_positions(ds, 5);
    EXPECT_EQ(oracle::check_layout(x, ds.source_a, ds.source_b, task), "") << t;
    EXPECT_EQ(x.slots, y.slots);
    const auto z = build_positions(ds, 6);
    EXPECT_EQ(oracle::check_layout(z, ds.source_a, ds.source_b, task), "") << t;
  }
}

TEST(SortedPositions, SeedChangesTieOrder) {
  std::vector<EntityProfile> d;
  for (EntityId i = 0; i < 20; ++i) d.push_back(prof(i, Source::Single, "same"));
  const auto a = build_positions(d, {}, Task::Dedup, 1);
  const auto b = build_positions(d, {}, Task::Dedup, 2);
  EXPECT_NE(a.slots, b.slots);
}

TEST(SortWeights, TwoPositionsEachWindowThree) {
  // positions {1,4} and {2,9}: distances 1, 8, 2, 5
  const auto list = golden::positions_from({2, 0, 1, 3, 0, 4, 5, 6, 7, 1}, 8, 0);
  auto w = [&](SortWeighting s) {
    return weight_of(window_pairs(list, {3, s, SortScope::Local, 0}, Task::Dedup), 0, 1);
  };
  EXPECT_DOUBLE_EQ(w(SortWeighting::ACF), 2.0);
  EXPECT_DOUBLE_EQ(w(SortWeighting::NCF), 1.0);
  EXPECT_DOUBLE_EQ(w(SortWeighting::ID), 1.5);
}

TEST(SortWeights, WindowOutOfRangeIsConfigError) {
  const auto list = golden::positions_from({0, 1}, 2, 0);
  EXPECT_THROW(window_pairs(list, {1, SortWeighting::ACF, SortScope::Local, 0}, Task::Dedup),
               ConfigError);
  EXPECT_THROW(window_pairs(list, {11, SortWeighting::ACF, SortScope::Local, 0}, Task::Dedup),
               ConfigError);
  EXPECT_NO_THROW(window_pairs(list, {10, SortWeighting::ACF, SortScope::Local, 0}, Task::Dedup));
}

TEST(SortWeights, GlobalIsSumOfLocalWindows) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    const Task task = t % 2 ? Task::Dedup : Task::RecordLinkage;
    const auto ds = testing_util::random_dataset(rng, task, 100);
    const auto list = build_positions(ds, 9);
    for (std::size_t s = 0; s < kSortWeightingNames.size(); ++s) {
      const auto scheme = static_cast<SortWeighting>(s);
      const int w = 2 + t % 9;
      const auto global = window_pairs(list, {w, scheme, SortScope::Global, 0}, task);
      oracle::Graph sum;
      for (int u = 2; u <= w; ++u)
        for (const auto& p : window_pairs(list, {u, scheme, SortScope::Local, 0}, task))
          sum[{p.left, p.right}] += p.weight;
      EXPECT_EQ(testing_util::diff_graph(global, sum), "") << t << " " << to_string(scheme);
    }
  }
}

TEST(SortWeights, LargerWindowKeepsEveryPair) {
  std::mt19937_64 rng(43);
  const auto ds = testing_util::random_dataset(rng, Task::RecordLinkage, 120);
  const auto list = build_positions(ds, 1);
  for (int w = 2; w < 10; ++w) {
    const auto small = window_pairs(list, {w, SortWeighting::ACF, SortScope::Local, 0}, ds.task);
    const auto large = window_pairs(list, {w + 1, SortWeighting::ACF, SortScope::Local, 0}, ds.task);
    for (const auto& p : small) EXPECT_GE(weight_of(large, p.left, p.right), p.weight);
  }
}

TEST(SortingWorkflow, MatchesBruteForce) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const Task task = t % 3 == 2 ? Task::Dedup : Task::RecordLinkage;
    const auto ds = testing_util::random_dataset(rng, task, 120);
    SortCfg cfg;
    cfg.window = 2 + t % 9;
    cfg.scheme = static_cast<SortWeighting>(t % 5);
    cfg.scope = t % 2 ? SortScope::Global : SortScope::Local;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto got = sorting_workflow(ds, cfg);
    const auto list = build_positions(ds, cfg.seed);
    const auto want = oracle::sorting(list, task, cfg.window,
                                      std::string(to_string(cfg.scheme)), t % 2 == 1);
    EXPECT_EQ(testing_util::diff_graph(got, want), "") << "instance " << t;
    if (task == Task::Dedup) {
      for (const auto& p : got) EXPECT_LT(p.left, p.right);
    }
  }
}

}  // namespace
}  // namespace progres
