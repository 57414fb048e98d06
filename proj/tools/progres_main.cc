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

// progres: run, grid-search and evaluate progressive entity resolution.
//
//   progres run  --config cfg.json [--scheduler bfs] [--budget 3xdup] [--out dir]
//   progres grid --config cfg.json [--family join] [--out dir]
//   progres eval --config cfg.json --pairs pairs.csv [--budget N] [--out dir]
//
// Exit status: 0 ok, 1 unreadable or malformed input, 2 invalid configuration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "progres/progres.hpp"

namespace fs = std::filesystem;
using namespace progres;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> budget;
  std::optional<std::string> scheduler;
  std::optional<std::string> family;
  std::string pairs;
};

RunConfig load(const Overrides& o) {
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.seed = cfg.filter.sorting.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.budget) cfg.budget = *o.budget;
  if (o.scheduler) cfg.scheduler = parse_scheduler(*o.scheduler);
  if (o.family) cfg.filter.family = parse_family(*o.family);
  cfg.filter.validate();
  return cfg;
}

void write_run_artifacts(const fs::path& dir, const Dataset& ds, const RunConfig& cfg,
                         const RunResult& r) {
  fs::create_directories(dir);
  std::ostringstream pairs;
  write_pairs_csv(pairs, r.schedule);
  write_text(dir / "pairs.csv", pairs.str());
  write_text(dir / "metrics.json", metrics_json(ds, cfg, r.candidates, r.metrics).dump(2) + "\n");
  std::ostringstream curve;
  write_curve_csv(curve, recall_curve(r.schedule, ds.truth, r.metrics.budget));
  write_text(dir / "curve.csv", curve.str());
  nlohmann::ordered_json perf;
  perf["filter_seconds"] = r.filter_seconds;
  perf["schedule_seconds"] = r.schedule_seconds;
  perf["wall_time"] = r.metrics.wall_time;
  perf["peak_memory_bytes"] = r.metrics.peak_memory;
  write_text(dir / "perf.json", perf.dump(2) + "\n");
}

int cmd_run(const Overrides& o) {
  const auto cfg = load(o);
  const auto ds = load_dataset(cfg.dataset);
  VectorStore vectors(cfg.vectors, ds);
  const auto budget = resolve_budget(cfg.budget, ds.truth.dup_count());
  const auto r = execute(ds, cfg.filter, cfg.scheduler, budget, &vectors);
  write_run_artifacts(cfg.out, ds, cfg, r);
  std::cout << cfg.filter.label() << ' ' << to_string(cfg.scheduler) << " budget=" << budget
            << " verified=" << r.metrics.verified
            << " pr=" << csv::format_double(r.metrics.progressive_recall)
            << " recall=" << csv::format_double(r.metrics.recall_at_budget) << '\n';
  return 0;
}

int cmd_grid(const Overrides& o) {
  const auto cfg = load(o);
  const auto ds = load_dataset(cfg.dataset);
  VectorStore vectors(cfg.vectors, ds);
  if (cfg.filter.family == Family::NN && cfg.vectors.empty())
    throw ConfigError("nn grid needs dataset.vectors");
  const auto configs = grid_configs(cfg.filter.family, vectors.models(), cfg.seed);

  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  std::ofstream grid(dir / "grid.csv", std::ios::binary);
  std::ofstream perf(dir / "grid_perf.csv", std::ios::binary);
  if (!grid || !perf) throw IoError("cannot write grid output under '" + dir.string() + "'");
  grid << kGridHeader << '\n' << std::flush;
  perf << "config,scheduler,filter_seconds,schedule_seconds,peak_memory_bytes\n" << std::flush;

  const auto best = grid_search(ds, configs, &vectors,
                                [&](const std::vector<GridRow>& rows,
                                    const std::vector<GridPerf>& p) {
                                  for (const auto& r : rows) grid << grid_row_csv(r) << '\n';
                                  grid.flush();
                                  for (const auto& x : p)
                                    perf << x.config << ',' << to_string(x.scheduler) << ','
                                         << csv::format_double(x.filter_seconds) << ','
                                         << csv::format_double(x.schedule_seconds) << ','
                                         << x.peak_memory << '\n';
                                  perf.flush();
                                });

  std::ostringstream report;
  report << "scheduler,config,mean_dft\n";
  for (const auto& b : best)
    report << to_string(b.scheduler) << ',' << b.config << ',' << csv::format_double(b.mean_dft)
           << '\n';
  write_text(dir / "best.csv", report.str());
  std::cout << configs.size() << " configurations x " << kAllSchedulers.size()
            << " schedulers x " << kBudgetMultiples << " budgets\n"
            << report.str();
  return 0;
}

int cmd_eval(const Overrides& o) {
  const auto cfg = load(o);
  const auto ds = load_dataset(cfg.dataset);
  const auto schedule = read_pairs_csv(o.pairs);
  const std::size_t budget =
      o.budget ? resolve_budget(*o.budget, ds.truth.dup_count()) : std::max<std::size_t>(schedule.size(), 1);
  const auto m = progressive_recall(schedule, ds.truth, budget);
  auto j = metrics_json(ds, cfg, schedule.size(), m);
  j.erase("candidates");
  if (o.out) {
    const fs::path dir(*o.out);
    fs::create_directories(dir);
    write_text(dir / "metrics.json", j.dump(2) + "\n");
    std::ostringstream curve;
    write_curve_csv(curve, recall_curve(schedule, ds.truth, budget));
    write_text(dir / "curve.csv", curve.str());
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Progressive entity resolution: filtering, weighting, scheduling"};
  app.require_subcommand(1);
  Overrides o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->required();
    sub->add_option("--seed", o.seed, "random seed (default 42)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--budget", o.budget, "budget: integer or <n>xdup");
    sub->add_option("--scheduler", o.scheduler, "ec, dfs, bfs or hybrid");
    sub->add_option("--family", o.family, "nn, join, blocking or sorting");
  };
  auto* run = app.add_subcommand("run", "run one configuration and write its artifacts");
  common(run);
  auto* grid = app.add_subcommand("grid", "grid-search a filtering family");
  common(grid);
  auto* eval = app.add_subcommand("eval", "recompute metrics for a pairs file");
  common(eval);
  eval->add_option("--pairs", o.pairs, "pairs CSV (rank,left,right,weight)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (grid->parsed()) return cmd_grid(o);
    return cmd_eval(o);
  } catch (const ConfigError& e) {
    std::cerr << "progres: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "progres: " << e.what() << '\n';
    return kExitInput;
  }
}
