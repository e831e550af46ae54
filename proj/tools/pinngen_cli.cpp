// pinngen: train PINNs on the Poisson benchmark, run sweeps, and query the
// results store.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 training abort,
// 3 results-store I/O error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "pinngen/error.hpp"
#include "pinngen/experiments.hpp"
#include "pinngen/version.hpp"

using namespace pinngen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTrainingAbort = 2;
constexpr int kExitStore = 3;

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> widths;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long w = std::stoll(item, &used);
      if (used != item.size() || w < 1) throw std::invalid_argument(item);
      widths.push_back(static_cast<std::size_t>(w));
    } catch (const std::exception&) {
      throw ConfigError("bad layer width '" + item + "' in --widths");
    }
  }
  return widths;
}

void print_gl_table(const SweepSummary& s) {
  std::printf("%-14s", "level");
  for (double e : s.spec.epsilons) std::printf("  G_l(%.0e)", e);
  std::printf("  %10s  %10s  %6s\n", "time_mean", "time_var", "failed");
  for (std::size_t i = 0; i < s.metrics.size(); ++i) {
    const LevelMetrics& m = s.metrics[i];
    std::printf("%-14s", s.spec.levels[i].label.c_str());
    for (const auto& r : m.gl) std::printf("  %10.4f", r.ensemble_G_l);
    std::printf("  %10.3f  %10.3g  %6zu\n", m.time_mean_s, m.time_variance_s2, m.failed_models);
  }
  if (!s.metrics.empty() && !s.metrics.front().gl.empty() &&
      s.metrics.front().gl.front().degenerate_side) {
    std::printf("note: the %s side has no exterior; G_l is 0 by convention\n",
                to_string(s.spec.side).c_str());
  }
}

void print_stats(const SweepSummary& s, bool pairwise) {
  std::printf("%-10s  %12s  %14s  %s\n", "epsilon", "H", "p", "significant (p < 0.01)");
  for (const auto& row : s.stats) {
    if (!row.kruskal) {
      std::printf("%-10.0e  skipped: %s\n", row.epsilon, row.skipped.c_str());
      continue;
    }
    std::printf("%-10.0e  %12.4f  %14.6g  %s\n", row.epsilon, row.kruskal->statistic,
                row.kruskal->p_value, row.kruskal->significant() ? "yes" : "no");
    if (!pairwise) continue;
    for (const auto& p : row.pairwise) {
      std::printf("    %s vs %s: U=%.1f p=%.6g%s\n", s.spec.levels[p.first].label.c_str(),
                  s.spec.levels[p.second].label.c_str(), p.result.statistic, p.adjusted_p,
                  p.adjusted_p < kSignificanceLevel ? " *" : "");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed network ensembles on a 1D Poisson benchmark"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train one model and write its record as JSON");
  int depth = 2;
  int width = 50;
  std::string widths_text;
  double lo = -std::numbers::pi;
  double hi = std::numbers::pi;
  TrainConfig tc = full_domain_template();
  std::string reduction = "sum";
  std::string out_file;
  train->add_option("--depth", depth, "Hidden layers")->check(CLI::PositiveNumber);
  train->add_option("--width", width, "Units per hidden layer")->check(CLI::PositiveNumber);
  train->add_option("--widths", widths_text, "Comma-separated hidden widths (overrides depth/width)");
  train->add_option("--lo", lo, "Training domain lower end");
  train->add_option("--hi", hi, "Training domain upper end");
  train->add_option("--n-cp", tc.n_cp, "Collocation points");
  train->add_option("--adam-iters", tc.adam_iters, "Adam steps");
  train->add_option("--adam-lr", tc.adam_lr, "Adam learning rate");
  train->add_option("--lbfgs-iters", tc.lbfgs_max_iters, "L-BFGS iteration limit");
  train->add_option("--lbfgs-tol", tc.lbfgs_tol, "L-BFGS tolerance");
  train->add_option("--history", tc.lbfgs_history, "L-BFGS history size");
  train->add_option("--seed", tc.seed, "Seed");
  train->add_option("--reduction", reduction, "Loss reduction")->check(CLI::IsMember({"sum", "mean"}));
  train->add_flag("--resample", tc.resample_each_iter, "Redraw collocation points every Adam step");
  train->add_option("-o,--out", out_file, "Write the model record here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a sweep preset or config and store the results");
  std::string preset_name;
  std::string config_file;
  std::optional<int> ensemble;
  std::optional<std::int64_t> adam_iters;
  std::optional<std::int64_t> lbfgs_iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> side;
  std::optional<int> n_grid;
  std::string store_dir = "results";
  unsigned threads = 0;
  bool quiet = false;
  auto* preset_opt = sweep->add_option("--preset", preset_name, "Preset name")
                         ->check(CLI::IsMember(preset_names()));
  sweep->add_option("--config", config_file, "JSON sweep spec")->excludes(preset_opt);
  sweep->add_option("--ensemble", ensemble, "Models per level")->check(CLI::PositiveNumber);
  sweep->add_option("--adam-iters", adam_iters, "Adam steps");
  sweep->add_option("--lbfgs-iters", lbfgs_iters, "L-BFGS iteration limit");
  sweep->add_option("--seed", seed, "Base seed");
  sweep->add_option("--side", side, "Side for G_l")->check(CLI::IsMember({"left", "right"}));
  sweep->add_option("--n-grid", n_grid, "Evaluation grid points");
  sweep->add_option("--store", store_dir, "Results store directory");
  sweep->add_option("--threads", threads, "Worker threads (0: all cores)");
  sweep->add_flag("-q,--quiet", quiet, "No progress lines");

  // genlevel / stats / plot-data share --store/--sweep/--run
  std::string sweep_name;
  std::string run_hash;
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("--store", store_dir, "Results store directory")->required();
    sub->add_option("--sweep", sweep_name, "Sweep name")->required();
    sub->add_option("--run", run_hash, "Run hash (default: newest)");
  };
  auto* genlevel = app.add_subcommand("genlevel", "Print G_l per level and epsilon");
  add_query(genlevel);
  genlevel->add_option("--side", side, "Side for G_l")->check(CLI::IsMember({"left", "right"}));
  genlevel->add_option("--n-grid", n_grid, "Evaluation grid points");
  bool as_json = false;
  genlevel->add_flag("--json", as_json, "Print the full summary as JSON");

  auto* stats = app.add_subcommand("stats", "Kruskal-Wallis and pairwise Mann-Whitney tests");
  add_query(stats);
  bool bonferroni = false;
  stats->add_flag("--bonferroni", bonferroni, "Bonferroni-adjust the pairwise p-values");

  auto* plot = app.add_subcommand("plot-data", "Export CSV tables behind the figures");
  add_query(plot);
  int points = 1001;
  plot->add_option("--points", points, "Grid points for curves")->check(CLI::Range(2, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      const MlpArchitecture arch = widths_text.empty()
                                       ? MlpArchitecture::uniform(static_cast<std::size_t>(depth),
                                                                  static_cast<std::size_t>(width))
                                       : MlpArchitecture(parse_widths(widths_text));
      tc.reduction = loss_reduction_from_string(reduction);
      const PoissonProblem problem = make_problem(Interval(lo, hi));
      const TrainedModel model = train_single(problem, arch, tc);
      std::printf("arch %s  seed %llu  loss %.6g  stop %s  lbfgs_iters %lld  time %.2f s\n",
                  arch.describe().c_str(), static_cast<unsigned long long>(model.seed),
                  model.final_loss, to_string(model.converged_by).c_str(),
                  static_cast<long long>(model.lbfgs_iterations), model.wall_time_s);
      if (!out_file.empty()) {
        Json doc = encode(model);
        doc["provenance"] = provenance(content_hash(encode(tc)));
        doc["train"] = encode(tc);
        doc["train_domain"] = encode(problem.train_domain);
        std::ofstream out(out_file);
        out << doc.dump(1) << "\n";
        if (!out) throw StoreError("cannot write " + out_file);
      }
      if (model.failed) {
        std::fprintf(stderr, "training aborted: %s\n", model.diagnostic.c_str());
        return kExitTrainingAbort;
      }
      return kExitOk;
    }

    if (*sweep) {
      SweepSpec spec;
      if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw ConfigError("cannot read config " + config_file);
        Json j;
        try {
          j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError("config " + config_file + ": " + e.what());
        }
        spec = decode_sweep_spec(j);
      } else if (!preset_name.empty()) {
        spec = preset(preset_name);
      } else {
        throw ConfigError("sweep needs --preset or --config");
      }
      if (ensemble) spec.ensemble_size = *ensemble;
      if (adam_iters) spec.train.adam_iters = *adam_iters;
      if (lbfgs_iters) spec.train.lbfgs_max_iters = *lbfgs_iters;
      if (seed) spec.base_seed = *seed;
      if (side) spec.side = side_from_string(*side);
      if (n_grid) spec.n_grid = *n_grid;
      ResultsStore store(store_dir);
      RunOptions options;
      options.threads = threads;
      options.log = quiet ? nullptr : &std::cerr;
      const SweepSummary s = run_sweep(spec, store, options);
      std::printf("sweep %s  run %s  store %s\n", spec.name.c_str(), s.spec_hash.c_str(),
                  store.root().c_str());
      print_gl_table(s);
      print_stats(s, false);
      return kExitOk;
    }

    ResultsStore store(store_dir);
    if (*genlevel) {
      SweepSummary s = load_sweep(store, sweep_name, run_hash);
      if (side || n_grid) {
        if (side) s.spec.side = side_from_string(*side);
        if (n_grid) s.spec.n_grid = *n_grid;
        s.spec.validate();
        s.metrics.clear();
        for (const auto& e : s.ensembles) s.metrics.push_back(evaluate_level(s.spec, e));
        s.stats = sweep_stats(s.spec, s.metrics);
      }
      if (as_json) {
        std::printf("%s\n", encode(s).dump(1).c_str());
      } else {
        std::printf("sweep %s  run %s  side %s  grid %d\n", sweep_name.c_str(), s.spec_hash.c_str(),
                    to_string(s.spec.side).c_str(), s.spec.n_grid);
        print_gl_table(s);
      }
      return kExitOk;
    }
    if (*stats) {
      SweepSummary s = load_sweep(store, sweep_name, run_hash);
      s.spec.bonferroni = bonferroni;
      s.stats = sweep_stats(s.spec, s.metrics);
      print_stats(s, true);
      return kExitOk;
    }
    if (*plot) {
      for (const auto& p : export_plot_data(store, sweep_name, run_hash, points)) {
        std::printf("%s\n", p.c_str());
      }
      return kExitOk;
    }
  } catch (const StoreError& e) {
    std::fprintf(stderr, "store error: %s\n", e.what());
    return kExitStore;
  } catch (const TrainingAbort& e) {
    std::fprintf(stderr, "training aborted: %s\n", e.what());
    return kExitTrainingAbort;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
