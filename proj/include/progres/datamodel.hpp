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

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace progres {

// Errors. Each maps to a distinct CLI exit status.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : Error {
  using Error::Error;
};
struct IngestError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

using EntityId = std::uint32_t;

enum class Source : std::uint8_t { SourceA, SourceB, Single };
enum class Task : std::uint8_t { RecordLinkage, Dedup };

inline std::string_view to_string(Task task) {
  return task == Task::RecordLinkage ? "record_linkage" : "dedup";
}

// One record. `agnostic_text` is the schema-agnostic view: every non-empty
// attribute value in stored order, joined by single spaces, lowercased at load.
struct EntityProfile {
  EntityId id = 0;
  Source source = Source::Single;
  std::string external_id;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string agnostic_text;
};

// Joins non-empty values with single spaces. Attribute names never appear.
inline std::string join_values(
    const std::vector<std::pair<std::string, std::string>>& attributes) {
  std::string out;
  for (const auto& [name, value] : attributes) {
    if (value.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += value;
  }
  return out;
}

// Canonical candidate pair key. Record Linkage: (SourceA id, SourceB id).
// Deduplication: left < right.
struct PairKey {
  EntityId left = 0;
  EntityId right = 0;

  friend constexpr auto operator<=>(const PairKey&, const PairKey&) = default;

  constexpr std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(left) << 32) | right;
  }
  static constexpr PairKey unpack(std::uint64_t v) {
    return {static_cast<EntityId>(v >> 32), static_cast<EntityId>(v & 0xffffffffu)};
  }
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const noexcept {
    // splitmix64 finalizer
    std::uint64_t z = k.packed() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};

struct WeightedPair {
  EntityId left = 0;
  EntityId right = 0;
  double weight = 0.0;

  constexpr PairKey key() const { return {left, right}; }
  friend bool operator==(const WeightedPair&, const WeightedPair&) = default;
};

// A reference to an entity of a given source.
struct EntityRef {
  Source source = Source::Single;
  EntityId id = 0;
};

// Dedup: (min, max), self-pairs rejected.
inline PairKey canonicalize_dedup(EntityId a, EntityId b) {
  if (a == b) throw ValidationError("self-pair (" + std::to_string(a) + ", " +
                                    std::to_string(a) + ") in deduplication");
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

// Record Linkage: the SourceA id goes left regardless of argument order.
inline PairKey canonicalize(EntityRef a, EntityRef b, Task task) {
  if (task == Task::Dedup) return canonicalize_dedup(a.id, b.id);
  if (a.source == Source::SourceA && b.source == Source::SourceB) return {a.id, b.id};
  if (a.source == Source::SourceB && b.source == Source::SourceA) return {b.id, a.id};
  throw ValidationError("record linkage pair must join SourceA with SourceB");
}

// Maximum number of verifications. Always >= 1.
class Budget {
 public:
  explicit Budget(std::int64_t value) : value_(value) {
    if (value < 1) throw ConfigError("budget must be >= 1, got " + std::to_string(value));
  }
  std::size_t value() const { return static_cast<std::size_t>(value_); }

 private:
  std::int64_t value_;
};

struct GroundTruth {
  std::unordered_set<PairKey, PairKeyHash> pairs;

  std::size_t dup_count() const { return pairs.size(); }
  bool contains(PairKey key) const { return pairs.contains(key); }
};

// Everything a filtering workflow consumes.
struct Dataset {
  std::string name;
  Task task = Task::Dedup;
  std::vector<EntityProfile> source_a;  // the single source for Dedup
  std::vector<EntityProfile> source_b;  // empty for Dedup
  GroundTruth truth;
};

}  // namespace progres
