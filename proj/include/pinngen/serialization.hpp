#pragma once
/**
 * @file serialization.hpp
 * @brief Versioned JSON encodings of configs, trained models and metric
 *        results, plus content hashing of canonical JSON.
 *
 * Doubles are written with 17 significant digits, so a decode of an encode
 * is bit-exact. Non-finite reals are written as the strings "nan", "inf"
 * and "-inf".
 */

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pinngen/genlevel.hpp"
#include "pinngen/mlp.hpp"
#include "pinngen/problem.hpp"
#include "pinngen/stats.hpp"
#include "pinngen/training.hpp"

namespace pinngen {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json encode_real(double x);
double decode_real(const Json& j);

Json encode(const Interval& interval);
Interval decode_interval(const Json& j);

Json encode(const MlpArchitecture& arch);
MlpArchitecture decode_architecture(const Json& j);

Json encode(const TrainConfig& config);
TrainConfig decode_train_config(const Json& j);

/// Model record: arch, flat params, seed, timings, loss, convergence flag.
Json encode(const TrainedModel& model);
TrainedModel decode_trained_model(const Json& j);

Json encode(const GenLevelResult& result);
GenLevelResult decode_genlevel_result(const Json& j);

Json encode(const GenLevelAltResult& result);
GenLevelAltResult decode_genlevel_alt(const Json& j);

Json encode(const StatTestResult& result);
StatTestResult decode_stat_result(const Json& j);

std::string to_string(LossReduction r);
LossReduction loss_reduction_from_string(const std::string& s);

/// Compact dump with sorted object keys; equal documents give equal text.
std::string canonical_dump(const Json& j);

std::uint64_t fnv1a64(std::string_view bytes);

/// 16 hex digits of fnv1a64(canonical_dump(j)).
std::string content_hash(const Json& j);

/// schema_version, code_version, rng identity, config hash and grid resolution
/// (omitted when grid_resolution <= 0).
Json provenance(const std::string& config_hash, int grid_resolution = 0);

/// Throws StoreError if the document's schema_version is not kSchemaVersion.
void require_schema(const Json& j);

}  // namespace pinngen
