#pragma once
/**
 * @file diff_engine.hpp
 * @brief PINN loss and its exact parameter gradient.
 *
 * The loss is
 *
 *     L(theta) = sum_i (u_theta''(x_i) + f(x_i))^2 + sum_j (u_theta(x_j) - u_b(x_j))^2
 *
 * over collocation points x_i and boundary points x_j. The gradient is
 * obtained by reverse accumulation through the jet program that produces
 * u_theta'' (every jet slot of every unit is its own intermediate), so the
 * adjoint flows through the second-derivative channel as well as the value.
 *
 * All points are pushed through each layer as one dense matrix product; jets
 * of order two suffice for the loss because lower slots never depend on
 * higher ones.
 */

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pinngen/mlp.hpp"
#include "pinngen/problem.hpp"
#include "pinngen/sampling.hpp"

namespace pinngen {

enum class LossReduction { sum, mean };

struct LossOptions {
  LossReduction reduction = LossReduction::sum;
  int n_modes = kDefaultModes;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  ///< ParamVector layout
};

/// Reusable loss/gradient evaluator for one (architecture, data) pair.
/// Holds scratch buffers, so one instance must not be shared across threads.
class PinnLossEvaluator {
 public:
  PinnLossEvaluator(MlpArchitecture arch, std::vector<double> collocation,
                    std::vector<BoundaryPoint> boundary, LossOptions options = {});
  ~PinnLossEvaluator();
  PinnLossEvaluator(PinnLossEvaluator&&) noexcept;
  PinnLossEvaluator& operator=(PinnLossEvaluator&&) noexcept;

  const MlpArchitecture& architecture() const;
  std::size_t param_count() const { return architecture().param_count(); }

  /// Swaps in new collocation points of the same count.
  void set_collocation(std::span<const double> points);

  double loss(std::span<const double> params);
  /// Writes d loss / d theta into `grad` (length N_theta) and returns the loss.
  double loss_and_grad(std::span<const double> params, std::span<double> grad);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LossAndGrad grad_pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                           const CollocationSet& colloc, std::span<const BoundaryPoint> boundary,
                           const LossOptions& options = {});

double pinn_loss(const MlpArchitecture& arch, const ParamVector& params,
                 const CollocationSet& colloc, std::span<const BoundaryPoint> boundary,
                 const LossOptions& options = {});

/// Loss re-evaluated point by point through mlp_forward_jet. Shares no code
/// with PinnLossEvaluator; T = long double gives a low-noise oracle.
template <typename T>
T pinn_loss_reference(const MlpArchitecture& arch, std::span<const T> params,
                      std::span<const double> collocation, std::span<const BoundaryPoint> boundary,
                      const LossOptions& options = {}) {
  T residual_sum{};
  for (double xd : collocation) {
    const T x = static_cast<T>(xd);
    const T r = residual_from_jet(mlp_forward_jet<T>(arch, params, x), x, options.n_modes);
    residual_sum += r * r;
  }
  T boundary_sum{};
  for (const BoundaryPoint& b : boundary) {
    const T e = mlp_forward_jet<T>(arch, params, static_cast<T>(b.x)).v - static_cast<T>(b.u_b);
    boundary_sum += e * e;
  }
  if (options.reduction == LossReduction::mean) {
    residual_sum /= static_cast<T>(collocation.size());
    boundary_sum /= static_cast<T>(boundary.size());
  }
  return residual_sum + boundary_sum;
}

/// Central differences, one pair of loss evaluations per coordinate. The
/// perturbation is applied in the evaluator's own precision T.
template <typename T>
std::vector<double> fd_gradient(std::span<const double> params,
                                const std::function<T(std::span<const T>)>& loss, double step) {
  if (!(step > 0.0)) throw ContractViolation("fd_gradient: step must be positive");
  std::vector<T> theta(params.begin(), params.end());
  std::vector<double> grad(params.size());
  const T h = static_cast<T>(step);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const T saved = theta[i];
    theta[i] = saved + h;
    const T up = loss(theta);
    theta[i] = saved - h;
    const T down = loss(theta);
    theta[i] = saved;
    grad[i] = static_cast<double>((up - down) / (T{2} * h));
  }
  return grad;
}

/// u_theta at every x (value channel only).
std::vector<double> mlp_forward_batch(const MlpArchitecture& arch, std::span<const double> params,
                                      std::span<const double> xs);

/// Full fourth-order jets of u_theta at every x.
std::vector<Jet4> mlp_forward_jet_batch(const MlpArchitecture& arch,
                                        std::span<const double> params,
                                        std::span<const double> xs);

}  // namespace pinngen
