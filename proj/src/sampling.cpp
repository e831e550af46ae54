#include "pinngen/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace pinngen {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, RngStream stream, std::uint64_t substream)
    : engine_(splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(stream)) + substream)) {}

double Rng::uniform_open() {
  // 53 random bits, shifted by half an ulp so 0 is never produced.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

CollocationSet latin_hypercube(int n, const Interval& domain, std::uint64_t seed,
                               std::uint64_t substream) {
  if (n <= 0) throw ConfigError("latin_hypercube: n must be >= 1, got " + std::to_string(n));
  Rng rng(seed, RngStream::collocation, substream);
  const double width = domain.length() / n;
  CollocationSet set;
  set.domain = domain;
  set.seed = seed;
  set.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double lo = domain.lo + width * i;
    const double hi = (i + 1 == n) ? domain.hi : domain.lo + width * (i + 1);
    // Stays inside the stratum even when rounding pushes it onto an edge.
    double x = lo + (hi - lo) * rng.uniform_open();
    x = std::clamp(x, std::nextafter(lo, hi), std::nextafter(hi, lo));
    set.points.push_back(x);
  }
  return set;
}

ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed) {
  Rng rng(seed, RngStream::init);
  ParamVector params = ParamVector::zeros(arch);
  for (const LayerShape& shape : arch.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(shape.fan_in + shape.fan_out));
    for (std::size_t i = 0; i < shape.weight_count(); ++i) {
      params[shape.offset + i] = rng.uniform(-limit, limit);
    }
  }
  return params;
}

}  // namespace pinngen
