#pragma once
/**
 * @file problem.hpp
 * @brief 1D Poisson benchmark u'' + f = 0 with f(x) = sum_k 2k sin(2kx) and
 *        exact solution u(x) = sum_k sin(2kx) / (2k), k = 1..5.
 *
 * The residual is r = u'' + f. With this sign the closed-form u above is the
 * exact solution, and u(-pi) = u(pi) = 0.
 */

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pinngen/error.hpp"
#include "pinngen/jet.hpp"

namespace pinngen {

inline constexpr int kDefaultModes = 5;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo < hi)) {
      throw ContractViolation("Interval: lo must be < hi, got [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }
  }

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval full_poisson_domain() { return Interval(-std::numbers::pi, std::numbers::pi); }

struct BoundaryPoint {
  double x;
  double u_b;
};

struct PoissonProblem {
  Interval train_domain;
  Interval full_domain;
  int n_modes = kDefaultModes;
  std::vector<BoundaryPoint> boundary_points;
};

/// Problem on `train_domain` closed with exact Dirichlet values at its ends.
PoissonProblem make_problem(const Interval& train_domain,
                            const Interval& full_domain = full_poisson_domain());

template <typename T>
T source_f(T x, int n_modes = kDefaultModes) {
  using std::sin;
  T sum{};
  for (int k = 1; k <= n_modes; ++k) {
    const T freq = T(2 * k);
    sum += freq * sin(freq * x);
  }
  return sum;
}

template <typename T>
T analytic_u(T x, int n_modes = kDefaultModes) {
  using std::sin;
  T sum{};
  for (int k = 1; k <= n_modes; ++k) {
    const T freq = T(2 * k);
    sum += sin(freq * x) / freq;
  }
  return sum;
}

/// k-th derivative of analytic_u, 1 <= order <= 4 (term-wise).
template <typename T>
T analytic_deriv(T x, int order, int n_modes = kDefaultModes) {
  using std::cos;
  using std::sin;
  if (order < 1 || order > 4) {
    throw ContractViolation("analytic_deriv: order must be in 1..4, got " + std::to_string(order));
  }
  T sum{};
  for (int k = 1; k <= n_modes; ++k) {
    const T freq = T(2 * k);
    // d^n/dx^n sin(a x) = a^n sin(a x + n pi/2); the 1/a prefactor leaves a^(n-1).
    T scale = T{1};
    for (int i = 1; i < order; ++i) scale *= freq;
    T term{};
    switch (order) {
      case 1: term = cos(freq * x); break;
      case 2: term = -sin(freq * x); break;
      case 3: term = -cos(freq * x); break;
      case 4: term = sin(freq * x); break;
    }
    sum += scale * term;
  }
  return sum;
}

/// Jet of the exact solution, built from the closed form (not a network).
template <typename T>
BasicJet<T> analytic_jet(T x, int n_modes = kDefaultModes) {
  return BasicJet<T>{analytic_u(x, n_modes), analytic_deriv(x, 1, n_modes),
                     analytic_deriv(x, 2, n_modes), analytic_deriv(x, 3, n_modes),
                     analytic_deriv(x, 4, n_modes)};
}

template <typename T>
T residual_from_jet(const BasicJet<T>& j, T x, int n_modes = kDefaultModes) {
  return j.d2 + source_f(x, n_modes);
}

/// {(lo, u(lo)), (hi, u(hi))}; requires train_domain within full_domain.
std::vector<BoundaryPoint> boundary_targets(const Interval& train_domain,
                                            const Interval& full_domain = full_poisson_domain(),
                                            int n_modes = kDefaultModes);

}  // namespace pinngen
