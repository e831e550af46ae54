#pragma once
/**
 * @file experiments.hpp
 * @brief Sweep presets, the sweep runner and plot-data export.
 *
 * Store layout under the root:
 *   <sweep>/ensembles/<level_hash>.json   trained models of one level
 *   <sweep>/runs/<spec_hash>/spec.json    the sweep spec
 *   <sweep>/runs/<spec_hash>/summary.json G_l, timing and test tables
 *   <sweep>/runs/<spec_hash>/plots/     export_plot_data CSVs
 * Ensembles are keyed by everything that determines their content, so a
 * rerun reuses them instead of training again.
 */

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pinngen/genlevel.hpp"
#include "pinngen/results_store.hpp"
#include "pinngen/serialization.hpp"
#include "pinngen/stats.hpp"
#include "pinngen/training.hpp"

namespace pinngen {

/// baseline_full_domain, three_subdomains, neurons, layers,
/// collocation_points, domain_size.
const std::vector<std::string>& preset_names();

struct SweepLevel {
  std::string label;
  double value = 0.0;  ///< the swept hyperparameter (width, depth, N_CP, domain index, ...)
  MlpArchitecture arch;
  Interval train_domain;
  int n_cp = 0;

  friend bool operator==(const SweepLevel&, const SweepLevel&) = default;
};

struct SweepSpec {
  std::string name;
  std::vector<SweepLevel> levels;
  int ensemble_size = 100;
  TrainConfig train;  ///< template; n_cp and seed are set per level and model
  std::uint64_t base_seed = 0;
  Interval full_domain = full_poisson_domain();
  Side side = Side::right;
  std::vector<double> epsilons = kDefaultEpsilons;
  int n_grid = kDefaultGridPoints;
  bool bonferroni = false;

  void validate() const;
};

/// Throws ConfigError for an unknown name.
SweepSpec preset(const std::string& name);

/// Domain of the domain-size sweep at index i: [-pi/3 - 2pi/(3*2^i), -pi/3].
Interval shrinking_domain(int i);

Json encode(const SweepLevel& level);
SweepLevel decode_sweep_level(const Json& j);
Json encode(const SweepSpec& spec);
/// Missing fields fall back to the preset named by "name" (or "preset").
SweepSpec decode_sweep_spec(const Json& j);

std::string spec_hash(const SweepSpec& spec);
std::string level_hash(const SweepSpec& spec, std::size_t level_index);

struct LevelMetrics {
  std::vector<GenLevelResult> gl;      ///< one per epsilon, spec.side
  std::vector<GenLevelAltResult> alt;  ///< one per epsilon
  double time_mean_s = 0.0;
  double time_variance_s2 = 0.0;  ///< sample variance (n - 1); 0 for one model
  std::size_t failed_models = 0;
};

struct StatsRow {
  double epsilon = 0.0;
  std::optional<StatTestResult> kruskal;
  std::vector<PairwiseTest> pairwise;
  std::string skipped;  ///< reason when the tests could not run
};

struct SweepSummary {
  SweepSpec spec;
  std::string spec_hash;
  std::vector<std::string> level_hashes;
  std::vector<Ensemble> ensembles;
  std::vector<LevelMetrics> metrics;
  std::vector<StatsRow> stats;
};

struct RunOptions {
  unsigned threads = 0;        ///< 0: hardware concurrency
  std::ostream* log = nullptr;  ///< progress lines, if set
};

LevelMetrics evaluate_level(const SweepSpec& spec, const Ensemble& ensemble);
std::vector<StatsRow> sweep_stats(const SweepSpec& spec, const std::vector<LevelMetrics>& metrics);

/// Trains (or loads) every level, computes metrics and tests, persists all.
SweepSummary run_sweep(const SweepSpec& spec, ResultsStore& store, const RunOptions& options = {});

Json encode(const SweepSummary& summary);

/// Run hashes stored for a sweep, oldest first by modification time.
std::vector<std::string> stored_runs(const ResultsStore& store, const std::string& sweep_name);

/// Loads the spec and ensembles of a stored run (the newest if run_hash is
/// empty) and recomputes the metrics. Throws StoreError if nothing exists.
SweepSummary load_sweep(const ResultsStore& store, const std::string& sweep_name,
                        const std::string& run_hash = "");

/// Writes per-level prediction and derivative curves (ensemble mean and
/// +-2 std bands), the G_l table and the timing table. Returns the paths.
std::vector<std::filesystem::path> export_plot_data(ResultsStore& store,
                                                    const std::string& sweep_name,
                                                    const std::string& run_hash = "",
                                                    int n_points = 1001);

}  // namespace pinngen
