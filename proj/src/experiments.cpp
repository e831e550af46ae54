#include "pinngen/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pinngen/diff_engine.hpp"
#include "pinngen/error.hpp"
#include "pinngen/version.hpp"

namespace pinngen {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

Interval sweep_train_domain() { return Interval(-kPi, -kPi / 3.0); }

// Collocation density of the full-domain baseline (100 points over 2*pi).
int density_matched_cp(const Interval& domain) {
  return static_cast<int>(std::lround(100.0 * domain.length() / (2.0 * kPi)));
}

SweepSpec base_sweep(const std::string& name) {
  SweepSpec spec;
  spec.name = name;
  spec.train = sweep_template();
  return spec;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

fs::path ensemble_path(const std::string& sweep, const std::string& hash) {
  return fs::path(sweep) / "ensembles" / (hash + ".json");
}

fs::path run_dir(const std::string& sweep, const std::string& hash) {
  return fs::path(sweep) / "runs" / hash;
}

TrainConfig level_config(const SweepSpec& spec, const SweepLevel& level) {
  TrainConfig c = spec.train;
  c.n_cp = level.n_cp;
  c.seed = spec.base_seed;
  return c;
}

Json encode_problem(const PoissonProblem& p) {
  Json boundary = Json::array();
  for (const auto& b : p.boundary_points) {
    boundary.push_back(Json{{"x", encode_real(b.x)}, {"u_b", encode_real(b.u_b)}});
  }
  return Json{{"train_domain", encode(p.train_domain)},
              {"full_domain", encode(p.full_domain)},
              {"n_modes", p.n_modes},
              {"boundary_points", boundary}};
}

Json encode_ensemble(const SweepSpec& spec, std::size_t level_index, const std::string& hash,
                     const Ensemble& ensemble) {
  Json models = Json::array();
  for (const auto& m : ensemble.models) models.push_back(encode(m));
  return Json{{"provenance", provenance(hash)},
              {"sweep", spec.name},
              {"level", encode(spec.levels[level_index])},
              {"train", encode(ensemble.config)},
              {"ensemble_size", ensemble.models.size()},
              {"problem", encode_problem(ensemble.problem)},
              {"models", models}};
}

Ensemble decode_ensemble(const Json& doc, const SweepSpec& spec, std::size_t level_index,
                         const std::string& hash) {
  require_schema(doc);
  if (doc.at("provenance").value("config_hash", "") != hash) {
    throw StoreError("ensemble record does not match its content hash " + hash);
  }
  const SweepLevel& level = spec.levels[level_index];
  Ensemble e;
  e.arch = level.arch;
  e.config = decode_train_config(doc.at("train"));
  e.problem = make_problem(level.train_domain, spec.full_domain);
  for (const auto& m : doc.at("models")) e.models.push_back(decode_trained_model(m));
  if (static_cast<int>(e.models.size()) != spec.ensemble_size) {
    throw StoreError("ensemble record " + hash + " has the wrong number of models");
  }
  return e;
}

void log_line(const RunOptions& options, const std::string& line) {
  if (options.log) *options.log << line << std::endl;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"baseline_full_domain", "three_subdomains",
                                              "neurons",              "layers",
                                              "collocation_points",   "domain_size"};
  return names;
}

Interval shrinking_domain(int i) {
  if (i < 0) throw ContractViolation("shrinking_domain: index must be >= 0");
  const double hi = -kPi / 3.0;
  return Interval(hi - 2.0 * kPi / (3.0 * std::ldexp(1.0, i)), hi);
}

void SweepSpec::validate() const {
  if (name.empty()) throw ConfigError("sweep needs a name");
  if (levels.empty()) throw ConfigError("sweep '" + name + "' has no levels");
  if (ensemble_size < 1) throw ConfigError("ensemble_size must be >= 1");
  if (epsilons.empty()) throw ConfigError("epsilon set is empty");
  for (double e : epsilons) {
    if (!(e > 0.0)) throw ConfigError("every epsilon must be > 0");
  }
  if (n_grid < 100) throw ConfigError("n_grid must be >= 100");
  for (const auto& level : levels) {
    if (level.n_cp < 1) throw ConfigError("level '" + level.label + "': n_cp must be >= 1");
    if (!full_domain.contains(level.train_domain)) {
      throw ConfigError("level '" + level.label + "': training domain outside the full domain");
    }
  }
  train.validate();
}

SweepSpec preset(const std::string& name) {
  SweepSpec spec;
  if (name == "baseline_full_domain") {
    spec.name = name;
    spec.train = full_domain_template();
    spec.levels.push_back({"2x50", 50.0, MlpArchitecture::uniform(2, 50), full_poisson_domain(), 100});
  } else if (name == "three_subdomains") {
    spec.name = name;
    spec.train = full_domain_template();
    const Interval parts[] = {Interval(-kPi, -kPi / 3.0), Interval(-kPi / 3.0, kPi / 3.0),
                              Interval(kPi / 3.0, kPi)};
    for (int j = 0; j < 3; ++j) {
      spec.levels.push_back({"omega_" + std::to_string(j + 1), static_cast<double>(j + 1),
                             MlpArchitecture::uniform(2, 50), parts[j],
                             density_matched_cp(parts[j])});
    }
  } else if (name == "neurons") {
    spec = base_sweep(name);
    for (std::size_t w : {10, 20, 50, 100, 200, 400, 600}) {
      spec.levels.push_back({std::to_string(w), static_cast<double>(w),
                             MlpArchitecture::uniform(1, w), sweep_train_domain(), 36});
    }
  } else if (name == "layers") {
    spec = base_sweep(name);
    for (std::size_t d : {1, 4, 10, 20}) {
      spec.levels.push_back({std::to_string(d), static_cast<double>(d),
                             MlpArchitecture::uniform(d, 50), sweep_train_domain(), 36});
    }
  } else if (name == "collocation_points") {
    spec = base_sweep(name);
    for (int n : {18, 25, 36, 50, 100, 200}) {
      spec.levels.push_back({std::to_string(n), static_cast<double>(n),
                             MlpArchitecture::uniform(1, 20), sweep_train_domain(), n});
    }
  } else if (name == "domain_size") {
    spec = base_sweep(name);
    for (int i = 0; i <= 4; ++i) {
      const int n_cp = static_cast<int>(std::lround(36.0 / std::ldexp(1.0, i)));
      spec.levels.push_back({"i=" + std::to_string(i), static_cast<double>(i),
                             MlpArchitecture::uniform(1, 20), shrinking_domain(i), n_cp});
    }
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return spec;
}

Json encode(const SweepLevel& level) {
  return Json{{"label", level.label},
              {"value", encode_real(level.value)},
              {"arch", encode(level.arch)},
              {"train_domain", encode(level.train_domain)},
              {"n_cp", level.n_cp}};
}

SweepLevel decode_sweep_level(const Json& j) {
  try {
    SweepLevel level;
    level.label = j.at("label").get<std::string>();
    level.value = decode_real(j.at("value"));
    level.arch = decode_architecture(j.at("arch"));
    level.train_domain = decode_interval(j.at("train_domain"));
    level.n_cp = j.at("n_cp").get<int>();
    return level;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep level: ") + e.what());
  }
}

Json encode(const SweepSpec& spec) {
  Json levels = Json::array();
  for (const auto& l : spec.levels) levels.push_back(encode(l));
  Json eps = Json::array();
  for (double e : spec.epsilons) eps.push_back(encode_real(e));
  return Json{{"name", spec.name},
              {"levels", levels},
              {"ensemble_size", spec.ensemble_size},
              {"train", encode(spec.train)},
              {"base_seed", spec.base_seed},
              {"full_domain", encode(spec.full_domain)},
              {"side", to_string(spec.side)},
              {"epsilons", eps},
              {"n_grid", spec.n_grid},
              {"bonferroni", spec.bonferroni}};
}

SweepSpec decode_sweep_spec(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
  std::string name = j.value("name", j.value("preset", std::string()));
  if (name.empty()) throw ConfigError("sweep config needs a name");
  SweepSpec spec;
  const bool known = std::find(preset_names().begin(), preset_names().end(), name) !=
                     preset_names().end();
  if (known) spec = preset(name);
  spec.name = name;
  try {
    if (j.contains("levels")) {
      spec.levels.clear();
      for (const auto& l : j.at("levels")) spec.levels.push_back(decode_sweep_level(l));
    }
    if (j.contains("ensemble_size")) spec.ensemble_size = j.at("ensemble_size").get<int>();
    if (j.contains("train")) {
      Json merged = encode(spec.train);
      merged.update(j.at("train"));
      spec.train = decode_train_config(merged);
    }
    if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("full_domain")) spec.full_domain = decode_interval(j.at("full_domain"));
    if (j.contains("side")) spec.side = side_from_string(j.at("side").get<std::string>());
    if (j.contains("epsilons")) {
      spec.epsilons.clear();
      for (const auto& e : j.at("epsilons")) spec.epsilons.push_back(decode_real(e));
    }
    if (j.contains("n_grid")) spec.n_grid = j.at("n_grid").get<int>();
    if (j.contains("bonferroni")) spec.bonferroni = j.at("bonferroni").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sweep config: ") + e.what());
  } catch (const StoreError& e) {
    throw ConfigError(std::string("bad sweep config: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string spec_hash(const SweepSpec& spec) {
  return content_hash(Json{{"spec", encode(spec)}, {"provenance", provenance("")}});
}

std::string level_hash(const SweepSpec& spec, std::size_t level_index) {
  const SweepLevel& level = spec.levels.at(level_index);
  const Json key{{"arch", encode(level.arch)},
                 {"train_domain", encode(level.train_domain)},
                 {"full_domain", encode(spec.full_domain)},
                 {"n_modes", kDefaultModes},
                 {"train", encode(level_config(spec, level))},
                 {"ensemble_size", spec.ensemble_size},
                 {"provenance", provenance("")}};
  return content_hash(key);
}

LevelMetrics evaluate_level(const SweepSpec& spec, const Ensemble& ensemble) {
  LevelMetrics m;
  const ErrorProfile profile = error_profile(ensemble, ensemble.problem, spec.n_grid);
  for (double eps : spec.epsilons) {
    m.gl.push_back(gl_ensemble(profile, ensemble.problem.train_domain, eps, spec.side));
    m.alt.push_back(gl_alt(profile, ensemble.problem.train_domain, eps));
  }
  const auto n = static_cast<double>(ensemble.models.size());
  double sum = 0.0;
  for (const auto& model : ensemble.models) {
    sum += model.wall_time_s;
    if (model.failed) ++m.failed_models;
  }
  m.time_mean_s = sum / n;
  if (ensemble.models.size() > 1) {
    double ss = 0.0;
    for (const auto& model : ensemble.models) {
      ss += (model.wall_time_s - m.time_mean_s) * (model.wall_time_s - m.time_mean_s);
    }
    m.time_variance_s2 = ss / (n - 1.0);
  }
  return m;
}

std::vector<StatsRow> sweep_stats(const SweepSpec& spec, const std::vector<LevelMetrics>& metrics) {
  std::vector<StatsRow> rows;
  for (std::size_t e = 0; e < spec.epsilons.size(); ++e) {
    StatsRow row;
    row.epsilon = spec.epsilons[e];
    std::vector<std::vector<double>> groups;
    for (const auto& m : metrics) groups.push_back(m.gl.at(e).per_model_g_l);
    if (groups.size() < 2) {
      row.skipped = "fewer than 2 levels";
    } else if (std::any_of(groups.begin(), groups.end(),
                           [](const auto& g) { return g.size() < 2; })) {
      row.skipped = "fewer than 2 models per level";
    } else {
      row.kruskal = kruskal_wallis(groups);
      row.pairwise = pairwise_mann_whitney(groups, spec.bonferroni);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json encode(const SweepSummary& s) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < s.metrics.size(); ++i) {
    const LevelMetrics& m = s.metrics[i];
    Json gl = Json::array();
    Json alt = Json::array();
    for (const auto& r : m.gl) gl.push_back(encode(r));
    for (const auto& r : m.alt) alt.push_back(encode(r));
    Json losses = Json::array();
    Json stops = Json::array();
    for (const auto& model : s.ensembles[i].models) {
      losses.push_back(encode_real(model.final_loss));
      stops.push_back(to_string(model.converged_by));
    }
    levels.push_back(Json{{"level", encode(s.spec.levels[i])},
                          {"level_hash", s.level_hashes[i]},
                          {"G_l", gl},
                          {"G_l_alt", alt},
                          {"final_losses", losses},
                          {"converged_by", stops},
                          {"failed_models", m.failed_models},
                          {"time_mean_s", encode_real(m.time_mean_s)},
                          {"time_variance_s2", encode_real(m.time_variance_s2)}});
  }
  Json stats = Json::array();
  for (const auto& row : s.stats) {
    Json r{{"epsilon", encode_real(row.epsilon)}};
    if (row.kruskal) {
      r["kruskal_wallis"] = encode(*row.kruskal);
      r["significant"] = row.kruskal->significant();
      Json pairs = Json::array();
      for (const auto& p : row.pairwise) {
        pairs.push_back(Json{{"first", p.first},
                             {"second", p.second},
                             {"result", encode(p.result)},
                             {"adjusted_p", encode_real(p.adjusted_p)}});
      }
      r["mann_whitney"] = pairs;
    } else {
      r["skipped"] = row.skipped;
    }
    stats.push_back(std::move(r));
  }
  return Json{{"provenance", provenance(s.spec_hash, s.spec.n_grid)},
              {"spec", encode(s.spec)},
              {"levels", levels},
              {"stats", stats}};
}

SweepSummary run_sweep(const SweepSpec& spec, ResultsStore& store, const RunOptions& options) {
  spec.validate();
  SweepSummary summary;
  summary.spec = spec;
  summary.spec_hash = spec_hash(spec);
  store.write_json(run_dir(spec.name, summary.spec_hash) / "spec.json",
                   Json{{"provenance", provenance(summary.spec_hash)}, {"spec", encode(spec)}});

  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    const SweepLevel& level = spec.levels[i];
    const std::string hash = level_hash(spec, i);
    const fs::path rel = ensemble_path(spec.name, hash);
    const std::string tag = spec.name + " level " + std::to_string(i + 1) + "/" +
                            std::to_string(spec.levels.size()) + " (" + level.label + ")";
    Ensemble ensemble;
    if (store.exists(rel)) {
      ensemble = decode_ensemble(store.read_json(rel), spec, i, hash);
      log_line(options, tag + ": loaded " + std::to_string(ensemble.models.size()) +
                            " models from the store");
    } else {
      const auto start = std::chrono::steady_clock::now();
      ensemble = train_ensemble(make_problem(level.train_domain, spec.full_domain), level.arch,
                                level_config(spec, level), spec.ensemble_size, options.threads);
      store.write_json(rel, encode_ensemble(spec, i, hash, ensemble));
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      char buf[64];
      std::snprintf(buf, sizeof buf, " in %.1f s", secs);
      log_line(options, tag + ": trained " + std::to_string(ensemble.models.size()) +
                            " models" + buf);
    }
    summary.metrics.push_back(evaluate_level(spec, ensemble));
    summary.level_hashes.push_back(hash);
    summary.ensembles.push_back(std::move(ensemble));
  }
  summary.stats = sweep_stats(spec, summary.metrics);
  store.write_json(run_dir(spec.name, summary.spec_hash) / "summary.json", encode(summary));
  return summary;
}

std::vector<std::string> stored_runs(const ResultsStore& store, const std::string& sweep_name) {
  std::vector<std::pair<fs::file_time_type, std::string>> runs;
  for (const auto& hash : store.list(fs::path(sweep_name) / "runs")) {
    const fs::path spec_file = store.path(run_dir(sweep_name, hash) / "spec.json");
    std::error_code ec;
    const auto t = fs::last_write_time(spec_file, ec);
    if (!ec) runs.emplace_back(t, hash);
  }
  std::sort(runs.begin(), runs.end());
  std::vector<std::string> out;
  for (auto& r : runs) out.push_back(std::move(r.second));
  return out;
}

SweepSummary load_sweep(const ResultsStore& store, const std::string& sweep_name,
                        const std::string& run_hash) {
  std::string hash = run_hash;
  if (hash.empty()) {
    const auto runs = stored_runs(store, sweep_name);
    if (runs.empty()) throw StoreError("no stored runs for sweep '" + sweep_name + "'");
    hash = runs.back();
  }
  const fs::path spec_file = run_dir(sweep_name, hash) / "spec.json";
  if (!store.exists(spec_file)) {
    throw StoreError("no stored run " + hash + " for sweep '" + sweep_name + "'");
  }
  const Json doc = store.read_json(spec_file);
  require_schema(doc);
  SweepSummary summary;
  try {
    summary.spec = decode_sweep_spec(doc.at("spec"));
  } catch (const ConfigError& e) {
    throw StoreError(std::string("stored spec unreadable: ") + e.what());
  }
  summary.spec_hash = hash;
  for (std::size_t i = 0; i < summary.spec.levels.size(); ++i) {
    const std::string lh = level_hash(summary.spec, i);
    const fs::path rel = ensemble_path(sweep_name, lh);
    if (!store.exists(rel)) {
      throw StoreError("run " + hash + " is incomplete: level " + std::to_string(i + 1) +
                       " was never stored");
    }
    Ensemble e = decode_ensemble(store.read_json(rel), summary.spec, i, lh);
    summary.metrics.push_back(evaluate_level(summary.spec, e));
    summary.level_hashes.push_back(lh);
    summary.ensembles.push_back(std::move(e));
  }
  summary.stats = sweep_stats(summary.spec, summary.metrics);
  return summary;
}

namespace {

struct Band {
  std::vector<double> mean;
  std::vector<double> stddev;
};

// Mean and sample standard deviation over the models with a finite value.
Band ensemble_band(const std::vector<std::vector<Jet4>>& jets, int order) {
  const std::size_t n_points = jets.front().size();
  Band b;
  b.mean.assign(n_points, std::nan(""));
  b.stddev.assign(n_points, std::nan(""));
  for (std::size_t i = 0; i < n_points; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& model : jets) {
      const double v = model[i][static_cast<std::size_t>(order)];
      if (std::isfinite(v)) {
        sum += v;
        ++count;
      }
    }
    if (count == 0) continue;
    const double mean = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& model : jets) {
      const double v = model[i][static_cast<std::size_t>(order)];
      if (std::isfinite(v)) ss += (v - mean) * (v - mean);
    }
    b.mean[i] = mean;
    b.stddev[i] = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
  }
  return b;
}

}  // namespace

std::vector<fs::path> export_plot_data(ResultsStore& store, const std::string& sweep_name,
                                       const std::string& run_hash, int n_points) {
  if (n_points < 2) throw ContractViolation("export_plot_data: n_points must be >= 2");
  const SweepSummary s = load_sweep(store, sweep_name, run_hash);
  const fs::path dir = run_dir(sweep_name, s.spec_hash) / "plots";
  std::vector<fs::path> written;
  const std::vector<double> grid = uniform_grid(s.spec.full_domain, n_points);

  for (std::size_t li = 0; li < s.ensembles.size(); ++li) {
    const Ensemble& e = s.ensembles[li];
    const SweepLevel& level = s.spec.levels[li];
    std::vector<std::vector<Jet4>> jets;
    for (const auto& m : e.models) jets.push_back(mlp_forward_jet_batch(m.arch, m.params.span(), grid));
    std::vector<Band> bands;
    for (int k = 0; k <= 4; ++k) bands.push_back(ensemble_band(jets, k));

    std::ostringstream pred;
    pred << "x,oracle,mean,std,lower,upper,abs_error,in_train_domain\n";
    std::ostringstream deriv;
    deriv << "x";
    for (int k = 1; k <= 4; ++k) deriv << ",oracle_d" << k << ",mean_d" << k << ",std_d" << k;
    deriv << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      const Jet4 exact = analytic_jet(x, e.problem.n_modes);
      const double mu = bands[0].mean[i];
      const double sd = bands[0].stddev[i];
      pred << format_number(x) << ',' << format_number(exact.v) << ',' << format_number(mu) << ','
           << format_number(sd) << ',' << format_number(mu - 2.0 * sd) << ','
           << format_number(mu + 2.0 * sd) << ',' << format_number(std::abs(mu - exact.v)) << ','
           << (e.problem.train_domain.contains(x) ? 1 : 0) << '\n';
      deriv << format_number(x);
      for (int k = 1; k <= 4; ++k) {
        deriv << ',' << format_number(exact[static_cast<std::size_t>(k)]) << ','
              << format_number(bands[static_cast<std::size_t>(k)].mean[i]) << ','
              << format_number(bands[static_cast<std::size_t>(k)].stddev[i]);
      }
      deriv << '\n';
    }
    const std::string stem = std::to_string(li) + "_" + sanitize(level.label);
    const fs::path p1 = dir / ("prediction_" + stem + ".csv");
    const fs::path p2 = dir / ("derivatives_" + stem + ".csv");
    store.write_text(p1, pred.str());
    store.write_text(p2, deriv.str());
    written.push_back(store.path(p1));
    written.push_back(store.path(p2));
  }

  std::ostringstream gl;
  gl << "level_index,label,value,epsilon,side,G_l,G_l_alt,grid_resolution,degenerate_side\n";
  for (std::size_t li = 0; li < s.metrics.size(); ++li) {
    const SweepLevel& level = s.spec.levels[li];
    for (std::size_t k = 0; k < s.spec.epsilons.size(); ++k) {
      const GenLevelResult& r = s.metrics[li].gl[k];
      gl << li << ',' << level.label << ',' << format_number(level.value) << ','
         << format_number(r.epsilon) << ',' << to_string(r.side) << ','
         << format_number(r.ensemble_G_l) << ',' << format_number(s.metrics[li].alt[k].ensemble)
         << ',' << r.grid_resolution << ',' << (r.degenerate_side ? 1 : 0) << '\n';
    }
  }
  std::ostringstream timing;
  timing << "level_index,label,value,n_models,failed_models,time_mean_s,time_variance_s2\n";
  for (std::size_t li = 0; li < s.metrics.size(); ++li) {
    const SweepLevel& level = s.spec.levels[li];
    const LevelMetrics& m = s.metrics[li];
    timing << li << ',' << level.label << ',' << format_number(level.value) << ','
           << s.ensembles[li].models.size() << ',' << m.failed_models << ','
           << format_number(m.time_mean_s) << ',' << format_number(m.time_variance_s2) << '\n';
  }
  std::ostringstream st;
  st << "epsilon,H,p_value,significant,skipped\n";
  for (const auto& row : s.stats) {
    st << format_number(row.epsilon) << ',';
    if (row.kruskal) {
      st << format_number(row.kruskal->statistic) << ',' << format_number(row.kruskal->p_value)
         << ',' << (row.kruskal->significant() ? 1 : 0) << ",\n";
    } else {
      st << ",,," << row.skipped << '\n';
    }
  }
  for (const auto& [name, content] :
       {std::pair{"gl.csv", gl.str()}, {"timing.csv", timing.str()}, {"stats.csv", st.str()}}) {
    store.write_text(dir / name, content);
    written.push_back(store.path(dir / name));
  }
  return written;
}

}  // namespace pinngen
