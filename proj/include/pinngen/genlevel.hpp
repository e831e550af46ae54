#pragma once
/**
 * @file genlevel.hpp
 * @brief Generalization Level of trained PINN ensembles.
 *
 * For one model, g_l is the length of the longest contiguous segment of
 * the exterior Omega \ Omega_T (on one side of the training interval) on
 * which |u - u_theta| <= eps. The ensemble value G_l is the minimum of g_l
 * over models. The anchored variant measures the accurate run that starts
 * at the boundary of Omega_T and takes the minimum over both sides.
 *
 * Everything is evaluated on a uniform grid over the full domain. A grid
 * cell [x_i, x_{i+1}] is accurate when the error at both ends is <= eps;
 * only the part of a cell that lies outside Omega_T contributes length, so
 * a cell straddling the training boundary contributes its exterior part.
 */

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pinngen/problem.hpp"
#include "pinngen/training.hpp"

namespace pinngen {

inline constexpr int kDefaultGridPoints = 2000;
inline const std::vector<double> kDefaultEpsilons{1e-2, 1e-3, 1e-4, 1e-5};

enum class Side { left, right };
std::string to_string(Side side);
Side side_from_string(const std::string& s);

struct ErrorProfile {
  Interval full_domain;
  std::vector<double> grid;                 ///< uniform, both ends included
  std::vector<std::vector<double>> errors;  ///< errors[model][grid index], >= 0 or NaN

  std::size_t model_count() const { return errors.size(); }
  int resolution() const { return static_cast<int>(grid.size()); }
  double spacing() const { return full_domain.length() / static_cast<double>(grid.size() - 1); }
};

/// n_grid uniform points over problem.full_domain, pointwise |u - u_theta|
/// for every model. Requires n_grid >= 100.
ErrorProfile error_profile(const Ensemble& ensemble, const PoissonProblem& problem,
                           int n_grid = kDefaultGridPoints);

/// Same, for arbitrary predictors (synthetic models, stored records, ...).
ErrorProfile error_profile(const std::vector<std::function<double(double)>>& predictors,
                           const Interval& full_domain, int n_grid, int n_modes = kDefaultModes);

std::vector<double> uniform_grid(const Interval& domain, int n_grid);

struct SideLength {
  double length = 0.0;
  bool degenerate = false;  ///< the side has no exterior at all
};

SideLength g_l_single(const ErrorProfile& profile, std::size_t model_index,
                      const Interval& train_domain, double epsilon, Side side);

struct GenLevelResult {
  double epsilon = 0.0;
  Side side = Side::right;
  std::vector<double> per_model_g_l;
  double ensemble_G_l = 0.0;
  int grid_resolution = 0;
  bool degenerate_side = false;
};

GenLevelResult gl_ensemble(const ErrorProfile& profile, const Interval& train_domain,
                           double epsilon, Side side);

/// Boundary-anchored accurate run on one side (0 for a degenerate side).
SideLength anchored_run(const ErrorProfile& profile, std::size_t model_index,
                        const Interval& train_domain, double epsilon, Side side);

struct GenLevelAltResult {
  double epsilon = 0.0;
  std::vector<double> per_model;  ///< min over non-degenerate sides of the anchored run
  double ensemble = 0.0;          ///< min over models
  int grid_resolution = 0;
};

GenLevelAltResult gl_alt(const ErrorProfile& profile, const Interval& train_domain,
                         double epsilon);

}  // namespace pinngen
