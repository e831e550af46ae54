#include "pinngen/genlevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pinngen/diff_engine.hpp"
#include "pinngen/error.hpp"

namespace pinngen {

std::string to_string(Side side) { return side == Side::left ? "left" : "right"; }

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw ConfigError("unknown side '" + s + "' (expected left or right)");
}

std::vector<double> uniform_grid(const Interval& domain, int n_grid) {
  if (n_grid < 2) throw ContractViolation("uniform_grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(n_grid));
  const double h = domain.length() / static_cast<double>(n_grid - 1);
  for (int i = 0; i < n_grid; ++i) grid[static_cast<std::size_t>(i)] = domain.lo + h * i;
  grid.back() = domain.hi;
  return grid;
}

namespace {

void require_grid(int n_grid) {
  if (n_grid < 100) throw ContractViolation("error_profile: n_grid must be >= 100");
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw ContractViolation("epsilon must be > 0");
}

bool cell_ok(const std::vector<double>& err, std::size_t i, double epsilon) {
  // NaN compares false and therefore fails.
  return err[i] <= epsilon && err[i + 1] <= epsilon;
}

// Exterior part of cell i on the given side, as [a, b]; empty when b <= a.
std::pair<double, double> exterior_part(const std::vector<double>& grid, std::size_t i,
                                        const Interval& train, Side side) {
  if (side == Side::right) return {std::max(grid[i], train.hi), grid[i + 1]};
  return {grid[i], std::min(grid[i + 1], train.lo)};
}

double exterior_length(const Interval& full, const Interval& train, Side side) {
  return side == Side::right ? full.hi - train.hi : train.lo - full.lo;
}

const std::vector<double>& model_errors(const ErrorProfile& profile, std::size_t model_index) {
  if (model_index >= profile.errors.size()) {
    throw ContractViolation("model index out of range");
  }
  return profile.errors[model_index];
}

}  // namespace

ErrorProfile error_profile(const Ensemble& ensemble, const PoissonProblem& problem, int n_grid) {
  require_grid(n_grid);
  ErrorProfile profile;
  profile.full_domain = problem.full_domain;
  profile.grid = uniform_grid(problem.full_domain, n_grid);
  std::vector<double> exact(profile.grid.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    exact[i] = analytic_u(profile.grid[i], problem.n_modes);
  }
  profile.errors.reserve(ensemble.models.size());
  for (const TrainedModel& model : ensemble.models) {
    std::vector<double> pred = mlp_forward_batch(model.arch, model.params.span(), profile.grid);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double e = std::abs(exact[i] - pred[i]);
      pred[i] = std::isfinite(e) ? e : std::numeric_limits<double>::quiet_NaN();
    }
    profile.errors.push_back(std::move(pred));
  }
  return profile;
}

ErrorProfile error_profile(const std::vector<std::function<double(double)>>& predictors,
                           const Interval& full_domain, int n_grid, int n_modes) {
  require_grid(n_grid);
  ErrorProfile profile;
  profile.full_domain = full_domain;
  profile.grid = uniform_grid(full_domain, n_grid);
  for (const auto& predict : predictors) {
    std::vector<double> err(profile.grid.size());
    for (std::size_t i = 0; i < err.size(); ++i) {
      const double x = profile.grid[i];
      const double e = std::abs(analytic_u(x, n_modes) - predict(x));
      err[i] = std::isfinite(e) ? e : std::numeric_limits<double>::quiet_NaN();
    }
    profile.errors.push_back(std::move(err));
  }
  return profile;
}

SideLength g_l_single(const ErrorProfile& profile, std::size_t model_index,
                      const Interval& train_domain, double epsilon, Side side) {
  require_epsilon(epsilon);
  const auto& err = model_errors(profile, model_index);
  if (exterior_length(profile.full_domain, train_domain, side) <= 0.0) return {0.0, true};

  double best = 0.0;
  bool in_run = false;
  double run_start = 0.0;
  for (std::size_t i = 0; i + 1 < profile.grid.size(); ++i) {
    const auto [a, b] = exterior_part(profile.grid, i, train_domain, side);
    if (!(b > a)) continue;
    if (cell_ok(err, i, epsilon)) {
      if (!in_run) run_start = a;
      in_run = true;
      best = std::max(best, b - run_start);
    } else {
      in_run = false;
    }
  }
  return {best, false};
}

GenLevelResult gl_ensemble(const ErrorProfile& profile, const Interval& train_domain,
                           double epsilon, Side side) {
  if (profile.errors.empty()) throw ContractViolation("gl_ensemble: empty ensemble");
  GenLevelResult result;
  result.epsilon = epsilon;
  result.side = side;
  result.grid_resolution = profile.resolution();
  result.ensemble_G_l = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < profile.model_count(); ++m) {
    const SideLength g = g_l_single(profile, m, train_domain, epsilon, side);
    result.degenerate_side = g.degenerate;
    result.per_model_g_l.push_back(g.length);
    result.ensemble_G_l = std::min(result.ensemble_G_l, g.length);
  }
  return result;
}

SideLength anchored_run(const ErrorProfile& profile, std::size_t model_index,
                        const Interval& train_domain, double epsilon, Side side) {
  require_epsilon(epsilon);
  const auto& err = model_errors(profile, model_index);
  if (exterior_length(profile.full_domain, train_domain, side) <= 0.0) return {0.0, true};

  const std::size_t cells = profile.grid.size() - 1;
  double start = 0.0;
  double end = 0.0;
  bool started = false;
  // Walk outward from the training boundary.
  for (std::size_t k = 0; k < cells; ++k) {
    const std::size_t i = side == Side::right ? k : cells - 1 - k;
    const auto [a, b] = exterior_part(profile.grid, i, train_domain, side);
    if (!(b > a)) continue;
    if (!cell_ok(err, i, epsilon)) break;
    if (!started) {
      started = true;
      start = side == Side::right ? a : b;
    }
    end = side == Side::right ? b : a;
  }
  return {started ? std::abs(end - start) : 0.0, false};
}

GenLevelAltResult gl_alt(const ErrorProfile& profile, const Interval& train_domain,
                         double epsilon) {
  if (profile.errors.empty()) throw ContractViolation("gl_alt: empty ensemble");
  GenLevelAltResult result;
  result.epsilon = epsilon;
  result.grid_resolution = profile.resolution();
  result.ensemble = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < profile.model_count(); ++m) {
    double value = std::numeric_limits<double>::infinity();
    for (Side side : {Side::left, Side::right}) {
      const SideLength run = anchored_run(profile, m, train_domain, epsilon, side);
      if (!run.degenerate) value = std::min(value, run.length);
    }
    if (!std::isfinite(value)) value = 0.0;  // no exterior on either side
    result.per_model.push_back(value);
    result.ensemble = std::min(result.ensemble, value);
  }
  return result;
}

}  // namespace pinngen
