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

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "progres/csv.hpp"
#include "progres/datamodel.hpp"

namespace progres {

struct DatasetSpec {
  std::string name;
  std::string path_a;
  std::optional<std::string> path_b;  // absent => deduplication
  std::string gt_path;
  std::string id_column = "id";
  char separator = ',';
  char gt_separator = ',';

  Task task() const { return path_b ? Task::RecordLinkage : Task::Dedup; }
};

inline std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// One profile per data row, ids assigned by row order starting at 0. The
// id column's value is kept as the external key used by ground-truth files.
inline std::vector<EntityProfile> load_source(const std::string& path,
                                              const std::string& id_column,
                                              char separator,
                                              Source source = Source::Single) {
  auto rows = csv::read(path, separator);
  if (rows.empty()) throw IngestError("'" + path + "' has no header row");

  const csv::Row& header = rows.front();
  auto id_it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
    return csv::trim(h) == id_column;
  });
  if (id_it == header.end())
    throw IngestError("'" + path + "': id column '" + id_column + "' not in header");
  const std::size_t id_col = static_cast<std::size_t>(id_it - header.begin());

  std::vector<EntityProfile> profiles;
  profiles.reserve(rows.size() - 1);
  std::unordered_map<std::string, EntityId> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() > header.size())
      throw IngestError("'" + path + "' row " + std::to_string(r) + ": " +
                        std::to_string(row.size()) + " fields, header has " +
                        std::to_string(header.size()));
    EntityProfile p;
    p.id = static_cast<EntityId>(profiles.size());
    p.source = source;
    p.external_id = id_col < row.size() ? std::string(csv::trim(row[id_col])) : std::string{};
    if (p.external_id.empty())
      throw IngestError("'" + path + "' row " + std::to_string(r) + ": empty id");
    if (!seen.emplace(p.external_id, p.id).second)
      throw IngestError("'" + path + "': duplicate id '" + p.external_id + "'");
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == id_col) continue;
      p.attributes.emplace_back(header[c], c < row.size() ? row[c] : std::string{});
    }
    p.agnostic_text = ascii_lower(join_values(p.attributes));
    profiles.push_back(std::move(p));
  }
  return profiles;
}

namespace detail {

inline std::unordered_map<std::string, EntityId> id_lookup(
    const std::vector<EntityProfile>& profiles) {
  std::unordered_map<std::string, EntityId> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.emplace(p.external_id, p.id);
  return out;
}

}  // namespace detail

// Two id columns per row, resolved against the loaded sources. The first row
// is a header iff neither of its fields names a known entity.
inline GroundTruth load_groundtruth(const std::string& path, Task task,
                                    const std::vector<EntityProfile>& source_a,
                                    const std::vector<EntityProfile>& source_b,
                                    char separator = ',') {
  const auto rows = csv::read(path, separator);
  const auto left_ids = detail::id_lookup(source_a);
  const auto right_ids =
      task == Task::Dedup ? left_ids : detail::id_lookup(source_b);

  GroundTruth gt;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() < 2)
      throw ValidationError("'" + path + "' row " + std::to_string(r + 1) +
                            ": expected two id columns");
    const std::string a{csv::trim(row[0])};
    const std::string b{csv::trim(row[1])};
    auto ia = left_ids.find(a);
    auto ib = right_ids.find(b);
    if (r == 0 && ia == left_ids.end() && ib == right_ids.end()) continue;  // header
    if (ia == left_ids.end() || ib == right_ids.end())
      throw ValidationError("'" + path + "' row " + std::to_string(r + 1) +
                            ": unknown id in pair (" + a + ", " + b + ")");
    const PairKey key = task == Task::Dedup ? canonicalize_dedup(ia->second, ib->second)
                                            : PairKey{ia->second, ib->second};
    gt.pairs.insert(key);
  }
  return gt;
}

inline Dataset load_dataset(const DatasetSpec& spec) {
  Dataset ds;
  ds.name = spec.name;
  ds.task = spec.task();
  ds.source_a = load_source(spec.path_a, spec.id_column, spec.separator,
                            ds.task == Task::Dedup ? Source::Single : Source::SourceA);
  if (spec.path_b)
    ds.source_b = load_source(*spec.path_b, spec.id_column, spec.separator, Source::SourceB);
  ds.truth = load_groundtruth(spec.gt_path, ds.task, ds.source_a, ds.source_b,
                              spec.gt_separator);
  return ds;
}

}  // namespace progres
