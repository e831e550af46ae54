#pragma once
/**
 * @file jet.hpp
 * @brief Fourth-order jets: a value together with its first four derivatives
 *        with respect to a single scalar variable.
 */

#include <cmath>
#include <cstddef>
#include <span>

#include "pinngen/error.hpp"

namespace pinngen {

/// Truncated Taylor data (u, u', u'', u''', u'''') of a scalar quantity.
template <typename T>
struct BasicJet {
  T v{};
  T d1{};
  T d2{};
  T d3{};
  T d4{};

  static constexpr std::size_t kOrder = 4;

  static constexpr BasicJet constant(T value) { return BasicJet{value, T{}, T{}, T{}, T{}}; }
  static constexpr BasicJet variable(T x) { return BasicJet{x, T{1}, T{}, T{}, T{}}; }

  /// k-th component, k = 0 is the value.
  constexpr T operator[](std::size_t k) const {
    switch (k) {
      case 0: return v;
      case 1: return d1;
      case 2: return d2;
      case 3: return d3;
      case 4: return d4;
      default: throw ContractViolation("jet component index out of range");
    }
  }

  bool is_finite() const {
    using std::isfinite;
    return isfinite(v) && isfinite(d1) && isfinite(d2) && isfinite(d3) && isfinite(d4);
  }

  friend constexpr bool operator==(const BasicJet&, const BasicJet&) = default;
};

using Jet4 = BasicJet<double>;

/// Jet of sum_i w_i * g_i + b. Exact; the bias only enters the value slot.
template <typename T>
BasicJet<T> jet_affine(std::span<const BasicJet<T>> inputs, std::span<const T> weights, T bias) {
  if (inputs.size() != weights.size()) {
    throw ContractViolation("jet_affine: " + std::to_string(weights.size()) + " weights for " +
                            std::to_string(inputs.size()) + " inputs");
  }
  BasicJet<T> out{bias, T{}, T{}, T{}, T{}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const T w = weights[i];
    out.v += w * inputs[i].v;
    out.d1 += w * inputs[i].d1;
    out.d2 += w * inputs[i].d2;
    out.d3 += w * inputs[i].d3;
    out.d4 += w * inputs[i].d4;
  }
  return out;
}

/// Derivatives of tanh at a point, expressed through t = tanh(z).
/// s[k] is the k-th derivative, s[0] = t. Order 5 is needed by the adjoint
/// of the fourth-order composition.
template <typename T>
struct TanhDerivatives {
  T s[6];

  explicit TanhDerivatives(T z) {
    using std::tanh;
    const T t = tanh(z);
    const T t2 = t * t;
    const T sech2 = T{1} - t2;
    s[0] = t;
    s[1] = sech2;
    s[2] = T{-2} * t * sech2;
    s[3] = sech2 * (T{6} * t2 - T{2});
    s[4] = sech2 * (T{16} * t - T{24} * t2 * t);
    s[5] = sech2 * (T{16} - T{120} * t2 + T{120} * t2 * t2);
  }
};

/// Jet of tanh(g) given the jet of g (Faa di Bruno to fourth order).
template <typename T>
BasicJet<T> jet_tanh(const BasicJet<T>& g) {
  const TanhDerivatives<T> td(g.v);
  const T* s = td.s;
  const T g1 = g.d1;
  const T g2 = g.d2;
  const T g3 = g.d3;
  const T g4 = g.d4;
  const T g1sq = g1 * g1;

  BasicJet<T> h;
  h.v = s[0];
  h.d1 = s[1] * g1;
  h.d2 = s[1] * g2 + s[2] * g1sq;
  h.d3 = s[1] * g3 + T{3} * s[2] * g1 * g2 + s[3] * g1sq * g1;
  h.d4 = s[1] * g4 + s[2] * (T{4} * g1 * g3 + T{3} * g2 * g2) + T{6} * s[3] * g1sq * g2 +
         s[4] * g1sq * g1sq;
  return h;
}

}  // namespace pinngen
