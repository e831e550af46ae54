#pragma once
/**
 * @file mlp.hpp
 * @brief Dense tanh network R -> R and its flat parameter layout.
 *
 * Layout contract of ParamVector: layers in order (input -> hidden ... ->
 * output); for each layer the weight matrix in row-major order (row = output
 * unit, column = input unit) followed by the bias vector.
 */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pinngen/jet.hpp"

namespace pinngen {

struct LayerShape {
  std::size_t fan_in;
  std::size_t fan_out;
  std::size_t offset;  ///< index of the first weight in the flat vector

  std::size_t weight_count() const { return fan_in * fan_out; }
  std::size_t bias_offset() const { return offset + weight_count(); }
  std::size_t param_count() const { return weight_count() + fan_out; }
};

/// 1 -> hidden_widths... -> 1, tanh on hidden layers, identity on the output.
class MlpArchitecture {
 public:
  MlpArchitecture() = default;
  explicit MlpArchitecture(std::vector<std::size_t> hidden_widths);

  /// `depth` hidden layers of `width` units each.
  static MlpArchitecture uniform(std::size_t depth, std::size_t width);

  const std::vector<std::size_t>& hidden_widths() const { return hidden_widths_; }
  const std::vector<LayerShape>& layers() const { return layers_; }
  std::size_t param_count() const { return param_count_; }
  std::size_t max_width() const;

  std::string describe() const;  // e.g. "1-50-50-1"

  friend bool operator==(const MlpArchitecture& a, const MlpArchitecture& b) {
    return a.hidden_widths_ == b.hidden_widths_;
  }

 private:
  std::vector<std::size_t> hidden_widths_;
  std::vector<LayerShape> layers_;
  std::size_t param_count_ = 0;
};

/// Flat trainable parameters of an MlpArchitecture.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
  static ParamVector zeros(const MlpArchitecture& arch) {
    return ParamVector(std::vector<double>(arch.param_count(), 0.0));
  }

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

void require_matching_params(const MlpArchitecture& arch, std::size_t n_params);

/// Jet of u_theta at x: seeds (x, 1, 0, 0, 0) and pushes it through every
/// layer. Scalar reference path; T may be wider than double for oracles.
template <typename T>
BasicJet<T> mlp_forward_jet(const MlpArchitecture& arch, std::span<const T> params, T x) {
  require_matching_params(arch, params.size());
  std::vector<BasicJet<T>> current{BasicJet<T>::variable(x)};
  std::vector<BasicJet<T>> next;
  const auto& layers = arch.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& shape = layers[l];
    const bool hidden = l + 1 < layers.size();
    next.resize(shape.fan_out);
    for (std::size_t o = 0; o < shape.fan_out; ++o) {
      const auto row = params.subspan(shape.offset + o * shape.fan_in, shape.fan_in);
      const T bias = params[shape.bias_offset() + o];
      BasicJet<T> z = jet_affine<T>(current, row, bias);
      next[o] = hidden ? jet_tanh(z) : z;
    }
    current.swap(next);
  }
  return current.front();
}

inline Jet4 mlp_forward_jet(const MlpArchitecture& arch, const ParamVector& params, double x) {
  return mlp_forward_jet<double>(arch, params.span(), x);
}

/// Plain forward pass (value channel only).
double mlp_forward(const MlpArchitecture& arch, std::span<const double> params, double x);

}  // namespace pinngen
