#pragma once
/**
 * @file optimizers.hpp
 * @brief Adam with bias correction and L-BFGS (two-loop recursion,
 *        strong-Wolfe line search) over flat parameter vectors.
 */

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pinngen/mlp.hpp"

namespace pinngen {

/// Evaluates the loss at `params`, writes its gradient into `grad`.
using LossGradFn = std::function<double(std::span<const double> params, std::span<double> grad)>;

enum class StopReason {
  adam_budget,         ///< L-BFGS phase disabled; Adam ran its full budget
  lbfgs_tol,           ///< gradient max-norm or loss decrease below tolerance
  lbfgs_budget,        ///< L-BFGS iteration limit reached
  line_search_failed,  ///< no acceptable step; best iterate returned
  aborted,             ///< non-finite loss or gradient
};

std::string to_string(StopReason r);
StopReason stop_reason_from_string(const std::string& s);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Called before each Adam step with the 0-based step index.
using StepHook = std::function<void(std::int64_t step)>;

/// Exactly `iters` Adam steps, in place. Throws TrainingAbort on a non-finite
/// gradient; `params` then holds the last iterate.
void adam_minimize(ParamVector& params, const LossGradFn& grad_fn, std::int64_t iters, double lr,
                   const AdamOptions& options = {}, const StepHook& before_step = {});

ParamVector adam_run(ParamVector params, const LossGradFn& grad_fn, std::int64_t iters, double lr,
                     const AdamOptions& options = {}, const StepHook& before_step = {});

struct LbfgsOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_evals = 25;
};

struct LbfgsResult {
  ParamVector params;
  StopReason stop = StopReason::lbfgs_budget;
  double loss = 0.0;
  std::int64_t iterations = 0;
  std::int64_t evaluations = 0;
  std::vector<double> loss_history;  ///< loss at the start and after every accepted step
};

LbfgsResult lbfgs_run(ParamVector params, const LossGradFn& loss_grad_fn, std::int64_t max_iters,
                      double tol, int history, const LbfgsOptions& options = {});

}  // namespace pinngen
