#include "pinngen/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pinngen/sampling.hpp"

namespace pinngen {

void TrainConfig::validate() const {
  if (adam_iters < 0) throw ConfigError("adam_iters must be >= 0");
  if (lbfgs_max_iters < 0) throw ConfigError("lbfgs_max_iters must be >= 0");
  if (!(adam_lr > 0.0)) throw ConfigError("adam_lr must be > 0");
  if (!(lbfgs_tol > 0.0)) throw ConfigError("lbfgs_tol must be > 0");
  if (lbfgs_history < 1) throw ConfigError("lbfgs_history must be >= 1");
  if (n_cp < 1) throw ConfigError("n_cp must be >= 1");
}

TrainConfig full_domain_template() {
  TrainConfig c;
  c.adam_iters = 10000;
  c.adam_lr = 1e-3;
  c.lbfgs_max_iters = 10000;
  c.lbfgs_tol = 1e-8;
  c.lbfgs_history = 50;
  c.n_cp = 100;
  return c;
}

TrainConfig sweep_template() {
  TrainConfig c;
  c.adam_iters = 5000;
  c.adam_lr = 1e-3;
  c.lbfgs_max_iters = 5000;
  c.lbfgs_tol = 1e-8;
  c.lbfgs_history = 50;
  c.n_cp = 36;
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

TrainedModel train_single(const PoissonProblem& problem, const MlpArchitecture& arch,
                          const TrainConfig& config) {
  config.validate();
  const auto start = Clock::now();

  TrainedModel model;
  model.arch = arch;
  model.seed = config.seed;
  model.params = init_params(arch, config.seed);

  const CollocationSet colloc = latin_hypercube(config.n_cp, problem.train_domain, config.seed);
  PinnLossEvaluator evaluator(arch, colloc.points, problem.boundary_points,
                              LossOptions{config.reduction, problem.n_modes});
  const LossGradFn fn = [&evaluator](std::span<const double> p, std::span<double> g) {
    return evaluator.loss_and_grad(p, g);
  };

  StepHook resample;
  if (config.resample_each_iter) {
    resample = [&](std::int64_t step) {
      const auto fresh = latin_hypercube(config.n_cp, problem.train_domain, config.seed,
                                         static_cast<std::uint64_t>(step));
      evaluator.set_collocation(fresh.points);
    };
  }

  const auto adam_start = Clock::now();
  try {
    adam_minimize(model.params, fn, config.adam_iters, config.adam_lr, AdamOptions{}, resample);
    model.converged_by = StopReason::adam_budget;
  } catch (const TrainingAbort& abort) {
    model.failed = true;
    model.converged_by = StopReason::aborted;
    model.diagnostic = abort.what();
  }
  model.adam_time_s = seconds_since(adam_start);

  const auto lbfgs_start = Clock::now();
  if (!model.failed && config.lbfgs_max_iters > 0) {
    LbfgsResult res = lbfgs_run(std::move(model.params), fn, config.lbfgs_max_iters,
                                config.lbfgs_tol, config.lbfgs_history);
    model.params = std::move(res.params);
    model.converged_by = res.stop;
    model.lbfgs_iterations = res.iterations;
    if (res.stop == StopReason::aborted) {
      model.failed = true;
      model.diagnostic = "lbfgs: non-finite loss or gradient at the starting point";
    } else if (res.stop == StopReason::line_search_failed) {
      model.diagnostic = "lbfgs: line search failed after " + std::to_string(res.iterations) +
                         " iterations; best iterate kept";
    }
  }
  model.lbfgs_time_s = seconds_since(lbfgs_start);

  const double loss = evaluator.loss(model.params.span());
  model.final_loss = std::isfinite(loss) ? loss : std::numeric_limits<double>::infinity();
  model.wall_time_s = seconds_since(start);
  return model;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

Ensemble train_ensemble(const PoissonProblem& problem, const MlpArchitecture& arch,
                        const TrainConfig& config, int n_models, unsigned threads) {
  if (n_models < 1) throw ConfigError("train_ensemble: n_models must be >= 1");
  config.validate();
  Ensemble ensemble;
  ensemble.config = config;
  ensemble.arch = arch;
  ensemble.problem = problem;
  ensemble.models.resize(static_cast<std::size_t>(n_models));
  parallel_for(ensemble.models.size(), threads, [&](std::size_t i) {
    TrainConfig cfg = config;
    cfg.seed = config.seed + i;
    ensemble.models[i] = train_single(problem, arch, cfg);
  });
  return ensemble;
}

}  // namespace pinngen
