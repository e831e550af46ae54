#include "pinngen/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "pinngen/error.hpp"
#include "pinngen/sampling.hpp"
#include "pinngen/version.hpp"

namespace pinngen {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw StoreError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw StoreError(std::string("bad field '") + key + "': " + e.what());
  }
}

double real_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw StoreError(std::string("missing field '") + key + "'");
  }
  return decode_real(j.at(key));
}

Json encode_reals(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(encode_real(v));
  return arr;
}

std::vector<double> decode_reals(const Json& j) {
  if (!j.is_array()) throw StoreError("expected an array of reals");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(decode_real(v));
  return out;
}

}  // namespace

Json encode_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double decode_real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw StoreError("not a real: " + j.dump());
}

Json encode(const Interval& interval) {
  return Json{{"lo", encode_real(interval.lo)}, {"hi", encode_real(interval.hi)}};
}

Interval decode_interval(const Json& j) {
  try {
    return Interval(real_field(j, "lo"), real_field(j, "hi"));
  } catch (const ContractViolation& e) {
    throw StoreError(e.what());
  }
}

Json encode(const MlpArchitecture& arch) {
  return Json{{"hidden_widths", arch.hidden_widths()}};
}

MlpArchitecture decode_architecture(const Json& j) {
  try {
    return MlpArchitecture(field<std::vector<std::size_t>>(j, "hidden_widths"));
  } catch (const ContractViolation& e) {
    throw StoreError(e.what());
  }
}

std::string to_string(LossReduction r) { return r == LossReduction::sum ? "sum" : "mean"; }

LossReduction loss_reduction_from_string(const std::string& s) {
  if (s == "sum") return LossReduction::sum;
  if (s == "mean") return LossReduction::mean;
  throw ConfigError("unknown loss reduction '" + s + "'");
}

Json encode(const TrainConfig& c) {
  return Json{{"adam_iters", c.adam_iters},
              {"adam_lr", encode_real(c.adam_lr)},
              {"lbfgs_max_iters", c.lbfgs_max_iters},
              {"lbfgs_tol", encode_real(c.lbfgs_tol)},
              {"lbfgs_history", c.lbfgs_history},
              {"n_cp", c.n_cp},
              {"seed", c.seed},
              {"reduction", to_string(c.reduction)},
              {"resample_each_iter", c.resample_each_iter}};
}

TrainConfig decode_train_config(const Json& j) {
  TrainConfig c;
  c.adam_iters = field<std::int64_t>(j, "adam_iters");
  c.adam_lr = real_field(j, "adam_lr");
  c.lbfgs_max_iters = field<std::int64_t>(j, "lbfgs_max_iters");
  c.lbfgs_tol = real_field(j, "lbfgs_tol");
  c.lbfgs_history = field<int>(j, "lbfgs_history");
  c.n_cp = field<int>(j, "n_cp");
  c.seed = field<std::uint64_t>(j, "seed");
  c.reduction = loss_reduction_from_string(field<std::string>(j, "reduction"));
  c.resample_each_iter = field<bool>(j, "resample_each_iter");
  return c;
}

Json encode(const TrainedModel& m) {
  return Json{{"arch", encode(m.arch)},
              {"params", encode_reals(m.params.values())},
              {"seed", m.seed},
              {"wall_time_s", encode_real(m.wall_time_s)},
              {"adam_time_s", encode_real(m.adam_time_s)},
              {"lbfgs_time_s", encode_real(m.lbfgs_time_s)},
              {"final_loss", encode_real(m.final_loss)},
              {"converged_by", to_string(m.converged_by)},
              {"lbfgs_iterations", m.lbfgs_iterations},
              {"failed", m.failed},
              {"diagnostic", m.diagnostic}};
}

TrainedModel decode_trained_model(const Json& j) {
  TrainedModel m;
  m.arch = decode_architecture(field<Json>(j, "arch"));
  m.params = ParamVector(decode_reals(field<Json>(j, "params")));
  if (m.params.size() != m.arch.param_count()) {
    throw StoreError("model record: parameter count does not match the architecture");
  }
  m.seed = field<std::uint64_t>(j, "seed");
  m.wall_time_s = real_field(j, "wall_time_s");
  m.adam_time_s = real_field(j, "adam_time_s");
  m.lbfgs_time_s = real_field(j, "lbfgs_time_s");
  m.final_loss = real_field(j, "final_loss");
  try {
    m.converged_by = stop_reason_from_string(field<std::string>(j, "converged_by"));
  } catch (const ContractViolation& e) {
    throw StoreError(e.what());
  }
  m.lbfgs_iterations = field<std::int64_t>(j, "lbfgs_iterations");
  m.failed = field<bool>(j, "failed");
  m.diagnostic = field<std::string>(j, "diagnostic");
  return m;
}

Json encode(const GenLevelResult& r) {
  return Json{{"epsilon", encode_real(r.epsilon)},
              {"side", to_string(r.side)},
              {"per_model_g_l", encode_reals(r.per_model_g_l)},
              {"ensemble_G_l", encode_real(r.ensemble_G_l)},
              {"grid_resolution", r.grid_resolution},
              {"degenerate_side", r.degenerate_side}};
}

GenLevelResult decode_genlevel_result(const Json& j) {
  GenLevelResult r;
  r.epsilon = real_field(j, "epsilon");
  try {
    r.side = side_from_string(field<std::string>(j, "side"));
  } catch (const ConfigError& e) {
    throw StoreError(e.what());
  }
  r.per_model_g_l = decode_reals(field<Json>(j, "per_model_g_l"));
  r.ensemble_G_l = real_field(j, "ensemble_G_l");
  r.grid_resolution = field<int>(j, "grid_resolution");
  r.degenerate_side = field<bool>(j, "degenerate_side");
  return r;
}

Json encode(const GenLevelAltResult& r) {
  return Json{{"epsilon", encode_real(r.epsilon)},
              {"per_model", encode_reals(r.per_model)},
              {"ensemble", encode_real(r.ensemble)},
              {"grid_resolution", r.grid_resolution}};
}

GenLevelAltResult decode_genlevel_alt(const Json& j) {
  GenLevelAltResult r;
  r.epsilon = real_field(j, "epsilon");
  r.per_model = decode_reals(field<Json>(j, "per_model"));
  r.ensemble = real_field(j, "ensemble");
  r.grid_resolution = field<int>(j, "grid_resolution");
  return r;
}

Json encode(const StatTestResult& r) {
  return Json{{"statistic", encode_real(r.statistic)},
              {"p_value", encode_real(r.p_value)},
              {"group_sizes", r.group_sizes},
              {"tie_corrected", r.tie_corrected},
              {"method", to_string(r.method)},
              {"degenerate", r.degenerate}};
}

StatTestResult decode_stat_result(const Json& j) {
  StatTestResult r;
  r.statistic = real_field(j, "statistic");
  r.p_value = real_field(j, "p_value");
  r.group_sizes = field<std::vector<std::size_t>>(j, "group_sizes");
  r.tie_corrected = field<bool>(j, "tie_corrected");
  try {
    r.method = stat_method_from_string(field<std::string>(j, "method"));
  } catch (const ContractViolation& e) {
    throw StoreError(e.what());
  }
  r.degenerate = field<bool>(j, "degenerate");
  return r;
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string content_hash(const Json& j) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_dump(j))));
  return buf;
}

Json provenance(const std::string& config_hash, int grid_resolution) {
  Json p{{"schema_version", kSchemaVersion},
         {"code_version", kVersion},
         {"rng", kRngIdentity},
         {"config_hash", config_hash}};
  if (grid_resolution > 0) p["grid_resolution"] = grid_resolution;
  return p;
}

void require_schema(const Json& j) {
  const Json* p = &j;
  if (j.contains("provenance")) p = &j.at("provenance");
  if (!p->contains("schema_version") || p->at("schema_version") != kSchemaVersion) {
    throw StoreError("unsupported or missing schema_version");
  }
}

}  // namespace pinngen
