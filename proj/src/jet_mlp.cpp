#include <algorithm>
#include <cmath>

#include "pinngen/mlp.hpp"

namespace pinngen {

MlpArchitecture::MlpArchitecture(std::vector<std::size_t> hidden_widths)
    : hidden_widths_(std::move(hidden_widths)) {
  if (hidden_widths_.empty()) {
    throw ContractViolation("MlpArchitecture: at least one hidden layer is required");
  }
  std::size_t fan_in = 1;
  std::size_t offset = 0;
  auto push = [&](std::size_t fan_out) {
    layers_.push_back(LayerShape{fan_in, fan_out, offset});
    offset += fan_in * fan_out + fan_out;
    fan_in = fan_out;
  };
  for (std::size_t w : hidden_widths_) {
    if (w == 0) throw ContractViolation("MlpArchitecture: hidden width must be >= 1");
    push(w);
  }
  push(1);
  param_count_ = offset;
}

MlpArchitecture MlpArchitecture::uniform(std::size_t depth, std::size_t width) {
  return MlpArchitecture(std::vector<std::size_t>(depth, width));
}

std::size_t MlpArchitecture::max_width() const {
  return *std::max_element(hidden_widths_.begin(), hidden_widths_.end());
}

std::string MlpArchitecture::describe() const {
  std::string s = "1";
  for (std::size_t w : hidden_widths_) s += "-" + std::to_string(w);
  return s + "-1";
}

void require_matching_params(const MlpArchitecture& arch, std::size_t n_params) {
  if (n_params != arch.param_count()) {
    throw ContractViolation("parameter vector has " + std::to_string(n_params) +
                            " entries, architecture " + arch.describe() + " needs " +
                            std::to_string(arch.param_count()));
  }
}

double mlp_forward(const MlpArchitecture& arch, std::span<const double> params, double x) {
  require_matching_params(arch, params.size());
  std::vector<double> current{x};
  std::vector<double> next;
  const auto& layers = arch.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& shape = layers[l];
    next.assign(shape.fan_out, 0.0);
    for (std::size_t o = 0; o < shape.fan_out; ++o) {
      double z = params[shape.bias_offset() + o];
      const double* row = params.data() + shape.offset + o * shape.fan_in;
      for (std::size_t i = 0; i < shape.fan_in; ++i) z += row[i] * current[i];
      next[o] = (l + 1 < layers.size()) ? std::tanh(z) : z;
    }
    current.swap(next);
  }
  return current.front();
}

}  // namespace pinngen
