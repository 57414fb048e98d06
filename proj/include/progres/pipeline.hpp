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

// End-to-end runs: JSON run configs, filtering dispatch, scheduling,
// artifacts, and the per-family grid search.

#pragma once

#include <sys/resource.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "progres/csv.hpp"
#include "progres/evaluation.hpp"
#include "progres/filter_block.hpp"
#include "progres/filter_join.hpp"
#include "progres/filter_nn.hpp"
#include "progres/filter_sort.hpp"
#include "progres/ingest.hpp"
#include "progres/scheduler.hpp"

namespace progres {

enum class Family : std::uint8_t { NN, Join, Blocking, Sorting };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::NN: return "nn";
    case Family::Join: return "join";
    case Family::Blocking: return "blocking";
    case Family::Sorting: return "sorting";
  }
  return "?";
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

inline Family parse_family(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "nn") return Family::NN;
  if (s == "join") return Family::Join;
  if (s == "blocking") return Family::Blocking;
  if (s == "sorting") return Family::Sorting;
  throw ConfigError("unknown filtering family '" + std::string(text) + "'");
}

inline SimFn parse_sim(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "euclidean") return SimFn::Euclidean;
  if (s == "cosine") return SimFn::Cosine;
  throw ConfigError("unknown similarity '" + std::string(text) + "'");
}

inline Indexing parse_indexing(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "smallest") return Indexing::Smallest;
  if (s == "largest") return Indexing::Largest;
  if (s == "both") return Indexing::Both;
  throw ConfigError("unknown indexing '" + std::string(text) + "'");
}

inline FeatureScoring parse_scoring(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "bs") return FeatureScoring::BS;
  if (s == "tf") return FeatureScoring::TF;
  if (s == "tfidf" || s == "tf-idf") return FeatureScoring::TFIDF;
  throw ConfigError("unknown feature scoring '" + std::string(text) + "'");
}

// "char3".."char5", "token1", "token2".
inline TokenizerCfg parse_tokenizer(std::string_view text) {
  const auto s = detail::lower(text);
  auto number = [&](std::size_t from) {
    if (s.size() != from + 1 || !std::isdigit(static_cast<unsigned char>(s[from])))
      throw ConfigError("unknown tokenizer '" + std::string(text) + "'");
    return s[from] - '0';
  };
  if (s.starts_with("char")) return TokenizerCfg::chars(number(4));
  if (s.starts_with("token")) return TokenizerCfg::tokens(number(5));
  throw ConfigError("unknown tokenizer '" + std::string(text) + "'");
}

inline SortWeighting parse_sort_weighting(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (std::size_t i = 0; i < kSortWeightingNames.size(); ++i)
    if (kSortWeightingNames[i] == s) return static_cast<SortWeighting>(i);
  throw ConfigError("unknown sorting weighting scheme '" + std::string(text) + "'");
}

inline SortScope parse_sort_scope(std::string_view text) {
  const auto s = detail::lower(text);
  if (s == "local") return SortScope::Local;
  if (s == "global") return SortScope::Global;
  throw ConfigError("unknown sorting scope '" + std::string(text) + "'");
}

struct NNParams {
  std::string model;
  std::size_t k = 5;
  SimFn sim = SimFn::Euclidean;
  Indexing indexing = Indexing::Smallest;
};

// One point of a family's parameter space.
struct FilterConfig {
  Family family = Family::Blocking;
  NNParams nn;
  JoinConfig join;
  BlockWeighting blocking = BlockWeighting::CB;
  SortCfg sorting;

  // Stable identifier used in grid output.
  std::string label() const {
    std::ostringstream os;
    os << to_string(family);
    switch (family) {
      case Family::NN:
        os << '/' << nn.model << '/' << to_string(nn.indexing) << '/' << to_string(nn.sim)
           << "/k" << nn.k;
        break;
      case Family::Join:
        os << '/' << join.tokenizer.name() << '/' << to_string(join.scoring) << '/'
           << to_string(join.indexing) << '/' << to_string(join.sim) << "/k" << join.k;
        break;
      case Family::Blocking: os << '/' << to_string(blocking); break;
      case Family::Sorting:
        os << "/w" << sorting.window << '/' << to_string(sorting.scheme) << '/'
           << to_string(sorting.scope);
        break;
    }
    return os.str();
  }

  void validate() const {
    switch (family) {
      case Family::NN:
        if (nn.k < 1) throw ConfigError("nn.k must be >= 1");
        break;
      case Family::Join:
        if (join.k < 1) throw ConfigError("join.k must be >= 1");
        break;
      case Family::Blocking: break;
      case Family::Sorting: sorting.validate(); break;
    }
  }
};

struct VectorPaths {
  std::string a;
  std::optional<std::string> b;
};

struct RunConfig {
  DatasetSpec dataset;
  std::map<std::string, VectorPaths> vectors;  // model name -> DVEC files
  FilterConfig filter;
  SchedulerKind scheduler = SchedulerKind::EC;
  std::string budget = "1xdup";
  std::uint64_t seed = 42;
  std::string out = "out";
};

namespace detail {

using nlohmann::json;

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

inline char separator_of(const json& j, const char* key, char fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = j.at(key).get<std::string>();
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw ConfigError(std::string(key) + " must be a single character");
  return s[0];
}

inline std::size_t positive_k(const json& j) {
  const auto k = j.value("k", 5);
  if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
  return static_cast<std::size_t>(k);
}

inline void parse_family_params(const json& j, FilterConfig& f) {
  if (j.contains("nn")) {
    const auto& n = j.at("nn");
    f.nn.model = n.value("model", f.nn.model);
    f.nn.k = positive_k(n);
    f.nn.sim = parse_sim(n.value("sim", std::string("euclidean")));
    f.nn.indexing = parse_indexing(n.value("indexing", std::string("smallest")));
  }
  if (j.contains("join")) {
    const auto& n = j.at("join");
    f.join.k = positive_k(n);
    f.join.sim = parse_sim(n.value("sim", std::string("euclidean")));
    f.join.indexing = parse_indexing(n.value("indexing", std::string("smallest")));
    f.join.tokenizer = parse_tokenizer(n.value("tokenizer", std::string("char3")));
    f.join.scoring = parse_scoring(n.value("scoring", std::string("tfidf")));
  }
  if (j.contains("blocking"))
    f.blocking = parse_block_weighting(j.at("blocking").value("scheme", std::string("CB")));
  if (j.contains("sorting")) {
    const auto& n = j.at("sorting");
    f.sorting.window = n.value("window", 2);
    f.sorting.scheme = parse_sort_weighting(n.value("scheme", std::string("ACF")));
    f.sorting.scope = parse_sort_scope(n.value("scope", std::string("local")));
  }
}

}  // namespace detail

// Relative paths resolve against `base_dir`, normally the config's folder.
inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using detail::resolve_path;
  RunConfig cfg;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const auto& d = j.at("dataset");
    auto& ds = cfg.dataset;
    ds.name = d.value("name", std::string("dataset"));
    ds.path_a = resolve_path(base_dir, d.at("path_a").get<std::string>());
    if (d.contains("path_b")) ds.path_b = resolve_path(base_dir, d.at("path_b").get<std::string>());
    ds.gt_path = resolve_path(base_dir, d.at("gt_path").get<std::string>());
    ds.id_column = d.value("id_column", std::string("id"));
    ds.separator = detail::separator_of(d, "separator", ',');
    ds.gt_separator = detail::separator_of(d, "gt_separator", ',');
    if (j.contains("task")) {
      const auto task = j.at("task").get<std::string>();
      const auto expected = std::string(to_string(ds.task()));
      if (task != "record_linkage" && task != "dedup")
        throw ConfigError("task must be 'record_linkage' or 'dedup'");
      if (task != expected)
        throw ConfigError("task '" + task + "' does not match the dataset (" + expected +
                          (ds.path_b ? ": path_b given)" : ": no path_b)"));
    }
    if (d.contains("vectors")) {
      for (const auto& [model, files] : d.at("vectors").items()) {
        VectorPaths vp;
        vp.a = resolve_path(base_dir, files.at("a").get<std::string>());
        if (files.contains("b")) vp.b = resolve_path(base_dir, files.at("b").get<std::string>());
        cfg.vectors.emplace(model, std::move(vp));
      }
      if (!cfg.vectors.empty()) cfg.filter.nn.model = cfg.vectors.begin()->first;
    }

    cfg.filter.family = parse_family(j.value("family", std::string("blocking")));
    detail::parse_family_params(j, cfg.filter);
    cfg.filter.sorting.seed = cfg.seed = j.value("seed", std::uint64_t{42});
    cfg.scheduler = parse_scheduler(j.value("scheduler", std::string("ec")));
    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      cfg.budget = b.is_number_integer() ? std::to_string(b.get<std::int64_t>())
                                         : b.get<std::string>();
    }
    if (j.contains("out")) cfg.out = resolve_path(base_dir, j.at("out").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.filter.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  const auto text = csv::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
  return parse_run_config(j, std::filesystem::path(path).parent_path());
}

// Lazily loaded DVEC matrices, checked against the source sizes.
class VectorStore {
 public:
  VectorStore(std::map<std::string, VectorPaths> paths, const Dataset& ds)
      : paths_(std::move(paths)), ds_(ds) {}

  std::vector<std::string> models() const {
    std::vector<std::string> out;
    for (const auto& [m, p] : paths_) out.push_back(m);
    return out;
  }

  const std::pair<DenseMatrix, DenseMatrix>& get(const std::string& model) {
    if (auto it = loaded_.find(model); it != loaded_.end()) return it->second;
    const auto pit = paths_.find(model);
    if (pit == paths_.end()) throw ConfigError("no vectors configured for model '" + model + "'");
    std::pair<DenseMatrix, DenseMatrix> m;
    m.first = read_dvec(pit->second.a);
    check_rows(m.first, ds_.source_a.size(), pit->second.a);
    if (ds_.task == Task::RecordLinkage) {
      if (!pit->second.b) throw ConfigError("model '" + model + "' lacks vectors for source b");
      m.second = read_dvec(*pit->second.b);
      check_rows(m.second, ds_.source_b.size(), *pit->second.b);
    }
    return loaded_.emplace(model, std::move(m)).first->second;
  }

 private:
  static void check_rows(const DenseMatrix& m, std::size_t expected, const std::string& path) {
    if (m.rows() != expected)
      throw ValidationError("'" + path + "' has " + std::to_string(m.rows()) +
                            " rows, the source has " + std::to_string(expected) + " entities");
  }

  std::map<std::string, VectorPaths> paths_;
  const Dataset& ds_;
  std::map<std::string, std::pair<DenseMatrix, DenseMatrix>> loaded_;
};

// Candidate pairs with weights, sorted by (left, right).
inline std::vector<WeightedPair> run_filter(const Dataset& ds, const FilterConfig& f,
                                            VectorStore* vectors) {
  f.validate();
  switch (f.family) {
    case Family::NN: {
      if (vectors == nullptr) throw ConfigError("nn family needs vectors");
      const auto& m = vectors->get(f.nn.model);
      NNConfig cfg{f.nn.k, f.nn.sim, f.nn.indexing, &m.first,
                   ds.task == Task::RecordLinkage ? &m.second : nullptr};
      return nn_candidates(cfg, ds.task);
    }
    case Family::Join: return join_workflow(ds, f.join);
    case Family::Blocking: return blocking_workflow(ds, f.blocking);
    case Family::Sorting: return sorting_workflow(ds, f.sorting);
  }
  throw ConfigError("unknown filtering family");
}

// Record linkage schedules the query side for NN/join and SourceA for the
// graph-based families; deduplication schedules every node.
inline Partition scheduling_partition(const Dataset& ds, const FilterConfig& f) {
  if (ds.task == Task::Dedup) return Partition::Both;
  switch (f.family) {
    case Family::NN:
      return query_partition(ds.task, f.nn.indexing, ds.source_a.size(), ds.source_b.size());
    case Family::Join:
      return query_partition(ds.task, f.join.indexing, ds.source_a.size(), ds.source_b.size());
    case Family::Blocking:
    case Family::Sorting: return Partition::Left;
  }
  return Partition::Left;
}

inline std::size_t peak_memory_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::size_t>(usage.ru_maxrss) * 1024;  // kilobytes on Linux
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct RunResult {
  std::size_t candidates = 0;
  Schedule schedule;
  RunMetrics metrics;
  double filter_seconds = 0.0;
  double schedule_seconds = 0.0;
};

// Filtering + weighting + scheduling, timed; verification is not timed.
inline RunResult execute(const Dataset& ds, const FilterConfig& f, SchedulerKind scheduler,
                         std::size_t budget, VectorStore* vectors) {
  RunResult r;
  Stopwatch total;
  const auto pairs = run_filter(ds, f, vectors);
  r.filter_seconds = total.seconds();
  Stopwatch sched;
  r.schedule = schedule(scheduler, pairs, budget, scheduling_partition(ds, f));
  r.schedule_seconds = sched.seconds();
  r.candidates = pairs.size();
  r.metrics = progressive_recall(r.schedule, ds.truth, budget);
  r.metrics.wall_time = r.filter_seconds + r.schedule_seconds;
  r.metrics.peak_memory = peak_memory_bytes();
  return r;
}

// ---- artifacts ------------------------------------------------------------

inline void write_pairs_csv(std::ostream& os, std::span<const WeightedPair> schedule) {
  os << "rank,left,right,weight\n";
  for (std::size_t i = 0; i < schedule.size(); ++i)
    os << (i + 1) << ',' << schedule[i].left << ',' << schedule[i].right << ','
       << csv::format_double(schedule[i].weight) << '\n';
}

inline void write_curve_csv(std::ostream& os, const RecallCurve& curve) {
  os << "rank,recall\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    os << (i + 1) << ',' << csv::format_double(curve.at(i)) << '\n';
}

// Schedule from a pairs CSV as written by write_pairs_csv.
inline Schedule read_pairs_csv(const std::string& path) {
  const auto rows = csv::read(path, ',');
  Schedule out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && !row.empty() && csv::trim(row[0]) == "rank") continue;
    if (row.size() < 3)
      throw IngestError("'" + path + "' row " + std::to_string(r + 1) +
                        ": expected rank,left,right[,weight]");
    auto num = [&](std::string_view s, auto& v) {
      s = csv::trim(s);
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw IngestError("'" + path + "' row " + std::to_string(r + 1) + ": bad number '" +
                          std::string(s) + "'");
    };
    WeightedPair p;
    num(row[1], p.left);
    num(row[2], p.right);
    if (row.size() > 3) num(row[3], p.weight);
    out.push_back(p);
  }
  return out;
}

// Deterministic metrics document; timing lives in the perf sidecar.
inline nlohmann::ordered_json metrics_json(const Dataset& ds, const RunConfig& cfg,
                                           std::size_t candidates, const RunMetrics& m) {
  nlohmann::ordered_json j;
  j["dataset"] = ds.name;
  j["task"] = std::string(to_string(ds.task));
  j["family"] = std::string(to_string(cfg.filter.family));
  j["config"] = cfg.filter.label();
  j["scheduler"] = std::string(to_string(cfg.scheduler));
  j["seed"] = cfg.seed;
  j["budget"] = m.budget;
  j["dup_count"] = m.dup_count;
  j["candidates"] = candidates;
  j["verified"] = m.verified;
  j["duplicates_found"] = m.duplicates_found;
  j["progressive_recall"] = m.progressive_recall;
  j["recall_at_budget"] = m.recall_at_budget;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
}

// ---- grid search ----------------------------------------------------------

inline constexpr std::array<std::size_t, 3> kGridK = {1, 5, 10};

inline std::vector<FilterConfig> grid_configs(Family family, const std::vector<std::string>& models,
                                              std::uint64_t seed) {
  std::vector<FilterConfig> out;
  const std::array<Indexing, 3> indexings = {Indexing::Smallest, Indexing::Largest, Indexing::Both};
  const std::array<SimFn, 2> sims = {SimFn::Euclidean, SimFn::Cosine};
  switch (family) {
    case Family::NN:
      for (const auto& m : models)
        for (auto ix : indexings)
          for (auto sim : sims)
            for (auto k : kGridK) {
              FilterConfig f;
              f.family = family;
              f.nn = {m, k, sim, ix};
              out.push_back(f);
            }
      break;
    case Family::Join: {
      const std::array<TokenizerCfg, 5> tokenizers = {
          TokenizerCfg::chars(3), TokenizerCfg::chars(4), TokenizerCfg::chars(5),
          TokenizerCfg::tokens(1), TokenizerCfg::tokens(2)};
      const std::array<FeatureScoring, 3> scorings = {FeatureScoring::BS, FeatureScoring::TF,
                                                      FeatureScoring::TFIDF};
      for (const auto& tok : tokenizers)
        for (auto sc : scorings)
          for (auto ix : indexings)
            for (auto sim : sims)
              for (auto k : kGridK) {
                FilterConfig f;
                f.family = family;
                f.join = {k, sim, ix, tok, sc};
                out.push_back(f);
              }
      break;
    }
    case Family::Blocking:
      for (auto w : all_block_weightings()) {
        FilterConfig f;
        f.family = family;
        f.blocking = w;
        out.push_back(f);
      }
      break;
    case Family::Sorting:
      for (int w = kMinWindow; w <= kMaxWindow; ++w)
        for (std::size_t s = 0; s < kSortWeightingNames.size(); ++s)
          for (auto scope : {SortScope::Local, SortScope::Global}) {
            FilterConfig f;
            f.family = family;
            f.sorting = {w, static_cast<SortWeighting>(s), scope, seed};
            out.push_back(f);
          }
      break;
  }
  return out;
}

struct GridRow {
  std::string config;
  SchedulerKind scheduler = SchedulerKind::EC;
  int multiple = 0;  // n in n x |Dup|
  std::size_t candidates = 0;
  RunMetrics metrics;
};

struct GridPerf {
  std::string config;
  SchedulerKind scheduler = SchedulerKind::EC;
  double filter_seconds = 0.0;
  double schedule_seconds = 0.0;
  std::size_t peak_memory = 0;
};

struct GridBest {
  SchedulerKind scheduler = SchedulerKind::EC;
  std::string config;
  double mean_dft = 0.0;
};

inline constexpr std::string_view kGridHeader =
    "config,scheduler,n,budget,candidates,verified,duplicates_found,progressive_recall,recall_at_budget";

inline std::string grid_row_csv(const GridRow& r) {
  std::ostringstream os;
  os << r.config << ',' << to_string(r.scheduler) << ',' << r.multiple << ','
     << r.metrics.budget << ',' << r.candidates << ',' << r.metrics.verified << ','
     << r.metrics.duplicates_found << ',' << csv::format_double(r.metrics.progressive_recall)
     << ',' << csv::format_double(r.metrics.recall_at_budget);
  return os.str();
}

// Runs every configuration of `family` under all schedulers and the ten
// budgets n x |Dup|. Filtering runs once per configuration; each scheduler
// runs once at the largest budget and smaller budgets evaluate its prefix
// (every scheduler stops where the budget runs out, so prefixes coincide).
// `on_config` sees each finished configuration's rows in order.
inline std::vector<GridBest> grid_search(
    const Dataset& ds, const std::vector<FilterConfig>& configs, VectorStore* vectors,
    const std::function<void(const std::vector<GridRow>&, const std::vector<GridPerf>&)>& on_config) {
  const auto budgets = budget_list(ds.truth.dup_count());
  std::vector<std::string> solutions;
  std::vector<std::vector<double>> pr;
  std::vector<SchedulerKind> solution_scheduler;
  std::vector<std::string> solution_config;
  for (const auto& f : configs) {
    Stopwatch sw;
    const auto pairs = run_filter(ds, f, vectors);
    const double filter_seconds = sw.seconds();
    const auto partition = scheduling_partition(ds, f);
    const auto label = f.label();
    std::vector<GridRow> rows;
    std::vector<GridPerf> perf;
    for (auto kind : kAllSchedulers) {
      Stopwatch st;
      const auto full = schedule(kind, pairs, budgets.back(), partition);
      const double schedule_seconds = st.seconds();
      std::vector<double> cells;
      for (std::size_t n = 0; n < budgets.size(); ++n) {
        const std::span<const WeightedPair> prefix(full.data(),
                                                   std::min(full.size(), budgets[n]));
        GridRow row{label, kind, static_cast<int>(n + 1), pairs.size(),
                    progressive_recall(prefix, ds.truth, budgets[n])};
        cells.push_back(row.metrics.progressive_recall);
        rows.push_back(std::move(row));
      }
      perf.push_back({label, kind, filter_seconds, schedule_seconds, peak_memory_bytes()});
      solutions.push_back(std::string(to_string(kind)) + ' ' + label);
      solution_scheduler.push_back(kind);
      solution_config.push_back(label);
      pr.push_back(std::move(cells));
    }
    if (on_config) on_config(rows, perf);
  }

  std::vector<GridBest> best;
  if (solutions.empty()) return best;
  const auto ranking = dft_ranking(solutions, pr);
  for (auto kind : kAllSchedulers) {
    for (const auto& e : ranking) {
      const auto idx = static_cast<std::size_t>(
          std::find(solutions.begin(), solutions.end(), e.solution) - solutions.begin());
      if (solution_scheduler[idx] != kind) continue;
      best.push_back({kind, solution_config[idx], e.mean_dft});
      break;
    }
  }
  return best;
}

}  // namespace progres
