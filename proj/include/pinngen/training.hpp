#pragma once
/**
 * @file training.hpp
 * @brief Adam-then-L-BFGS training of single PINNs and seeded ensembles.
 */

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pinngen/diff_engine.hpp"
#include "pinngen/mlp.hpp"
#include "pinngen/optimizers.hpp"
#include "pinngen/problem.hpp"

namespace pinngen {

struct TrainConfig {
  std::int64_t adam_iters = 5000;
  double adam_lr = 1e-3;
  std::int64_t lbfgs_max_iters = 5000;
  double lbfgs_tol = 1e-8;
  int lbfgs_history = 50;
  int n_cp = 36;
  std::uint64_t seed = 0;
  LossReduction reduction = LossReduction::sum;
  /// Redraw the Latin hypercube sample before every Adam step. The L-BFGS
  /// phase always works on the last sample (its line search needs a fixed
  /// objective).
  bool resample_each_iter = false;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// 10000 Adam steps at 1e-3 then up to 10000 L-BFGS steps, tol 1e-8.
TrainConfig full_domain_template();
/// 5000 Adam steps at 1e-3 then up to 5000 L-BFGS steps, tol 1e-8.
TrainConfig sweep_template();

struct TrainedModel {
  MlpArchitecture arch;
  ParamVector params;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  double adam_time_s = 0.0;
  double lbfgs_time_s = 0.0;
  double final_loss = 0.0;
  StopReason converged_by = StopReason::adam_budget;
  std::int64_t lbfgs_iterations = 0;
  bool failed = false;
  std::string diagnostic;
};

struct Ensemble {
  std::vector<TrainedModel> models;  ///< ordered by seed
  TrainConfig config;                ///< seed field holds the base seed
  MlpArchitecture arch;
  PoissonProblem problem;
};

/// Samples collocation points, runs Adam then L-BFGS, records wall time.
/// Optimizer aborts come back as a failed record instead of an exception.
TrainedModel train_single(const PoissonProblem& problem, const MlpArchitecture& arch,
                          const TrainConfig& config);

/// Model i is trained with seed config.seed + i. `threads` = 0 picks the
/// hardware concurrency; results are independent of the thread count.
Ensemble train_ensemble(const PoissonProblem& problem, const MlpArchitecture& arch,
                        const TrainConfig& config, int n_models, unsigned threads = 0);

/// Runs fn(0) .. fn(count-1) on up to `threads` workers. Exceptions are
/// rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace pinngen
