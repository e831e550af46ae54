#pragma once
/**
 * @file sampling.hpp
 * @brief Seeded Latin hypercube collocation points and Glorot-uniform
 *        parameter initialization.
 *
 * All randomness comes from std::mt19937_64, whose output sequence is fixed by
 * the C++ standard. Bits are turned into doubles here rather than through
 * std::uniform_real_distribution (implementation-defined), so a seed gives
 * the same numbers on every platform. Independent streams for one run seed
 * are derived by hashing (seed, stream tag) with splitmix64.
 */

#include <cstdint>
#include <random>
#include <vector>

#include "pinngen/mlp.hpp"
#include "pinngen/problem.hpp"

namespace pinngen {

/// Recorded in every result document.
inline constexpr const char* kRngIdentity = "mt19937_64/splitmix64-streams/53bit-open-unit";

enum class RngStream : std::uint64_t {
  collocation = 0x636f6c6c6f63ULL,
  init = 0x696e6974ULL,
};

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
 public:
  Rng(std::uint64_t seed, RngStream stream, std::uint64_t substream = 0);

  /// Uniform in the open interval (0, 1).
  double uniform_open();
  /// Uniform in [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

 private:
  std::mt19937_64 engine_;
};

struct CollocationSet {
  std::vector<double> points;  ///< sorted ascending, strictly inside domain
  Interval domain;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// One uniform draw inside each of n equal-width strata of `domain`.
/// `substream` selects an independent draw for the same seed (resampling).
CollocationSet latin_hypercube(int n, const Interval& domain, std::uint64_t seed,
                               std::uint64_t substream = 0);

/// Glorot-uniform weights, U(-a, a) with a = sqrt(6 / (fan_in + fan_out)); zero biases.
ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed);

}  // namespace pinngen
