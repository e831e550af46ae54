#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "pinngen/experiments.hpp"

using namespace pinngen;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("pinngen_exp_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  return p;
}

// Two cheap levels, three models each.
SweepSpec tiny_spec() {
  SweepSpec s = preset("collocation_points");
  s.levels.resize(2);
  s.ensemble_size = 3;
  s.train.adam_iters = 200;
  s.train.lbfgs_max_iters = 50;
  s.n_grid = 400;
  s.base_seed = 5;
  return s;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

}  // namespace

TEST(Preset, NeuronWidths) {
  const auto s = preset("neurons");
  std::vector<double> values;
  for (const auto& l : s.levels) {
    values.push_back(l.value);
    EXPECT_EQ(l.arch.hidden_widths().size(), 1u);
    EXPECT_EQ(l.n_cp, 36);
  }
  EXPECT_EQ(values, (std::vector<double>{10, 20, 50, 100, 200, 400, 600}));
  EXPECT_EQ(s.ensemble_size, 100);
  EXPECT_EQ(s.train.adam_iters, 5000);
  EXPECT_EQ(s.train.lbfgs_max_iters, 5000);
  EXPECT_EQ(s.side, Side::right);
}

TEST(Preset, Layers) {
  const auto s = preset("layers");
  ASSERT_EQ(s.levels.size(), 4u);
  const std::size_t depths[] = {1, 4, 10, 20};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(s.levels[i].arch, MlpArchitecture::uniform(depths[i], 50));
  }
}

TEST(Preset, CollocationPointsKeepTheDomain) {
  const auto s = preset("collocation_points");
  std::vector<int> n;
  for (const auto& l : s.levels) {
    n.push_back(l.n_cp);
    EXPECT_EQ(l.train_domain, Interval(-kPi, -kPi / 3));
    EXPECT_EQ(l.arch, MlpArchitecture::uniform(1, 20));
  }
  EXPECT_EQ(n, (std::vector<int>{18, 25, 36, 50, 100, 200}));
  // 100 points over a 2 pi / 3 interval.
  const auto& l100 = s.levels[4];
  EXPECT_NEAR(l100.n_cp / l100.train_domain.length(), 100 / (2 * kPi / 3), 1e-12);
}

TEST(Preset, DomainSizeHalvesLengthAndPoints) {
  const auto s = preset("domain_size");
  ASSERT_EQ(s.levels.size(), 5u);
  EXPECT_EQ(s.levels[0].train_domain.lo, -kPi);
  EXPECT_NEAR(s.levels[0].train_domain.hi, -kPi / 3, 1e-15);
  EXPECT_NEAR(s.levels[0].train_domain.length(), 2 * kPi / 3, 1e-15);
  const std::vector<int> expected{36, 18, 9, 5, 2};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.levels[i].n_cp, expected[i]);
    EXPECT_EQ(s.levels[i].train_domain.hi, -kPi / 3);
    EXPECT_NEAR(s.levels[i].train_domain.length(), 2 * kPi / 3 / std::ldexp(1.0, static_cast<int>(i)),
                1e-14);
  }
}

TEST(Preset, BaselineAndSubdomains) {
  const auto b = preset("baseline_full_domain");
  ASSERT_EQ(b.levels.size(), 1u);
  EXPECT_EQ(b.levels[0].train_domain, full_poisson_domain());
  EXPECT_EQ(b.train.adam_iters, 10000);
  EXPECT_EQ(b.train.lbfgs_max_iters, 10000);
  const auto t = preset("three_subdomains");
  ASSERT_EQ(t.levels.size(), 3u);
  EXPECT_EQ(t.levels[0].train_domain.lo, -kPi);
  EXPECT_EQ(t.levels[2].train_domain.hi, kPi);
  EXPECT_EQ(t.levels[0].train_domain.hi, t.levels[1].train_domain.lo);
}

TEST(Preset, UnknownNameThrows) {
  EXPECT_THROW(preset("widths"), ConfigError);
  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).validate());
}

TEST(SweepSpec, ValidateRejectsBadInput) {
  SweepSpec s = tiny_spec();
  s.levels.clear();
  EXPECT_THROW(s.validate(), ConfigError);
  s = tiny_spec();
  s.ensemble_size = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = tiny_spec();
  s.epsilons = {1e-2, -1.0};
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(SweepSpec, JsonRoundTripPreservesHash) {
  for (const auto& name : preset_names()) {
    SweepSpec s = preset(name);
    s.base_seed = 99;
    s.ensemble_size = 7;
    const SweepSpec d = decode_sweep_spec(Json::parse(encode(s).dump()));
    EXPECT_EQ(spec_hash(d), spec_hash(s)) << name;
    EXPECT_EQ(d.levels, s.levels);
  }
}

TEST(SweepSpec, PartialConfigFallsBackToPreset) {
  const SweepSpec d = decode_sweep_spec(Json{{"name", "layers"}, {"ensemble_size", 4}});
  EXPECT_EQ(d.ensemble_size, 4);
  EXPECT_EQ(d.levels, preset("layers").levels);
}

TEST(LevelHash, IsolatedFromOtherLevels) {
  SweepSpec a = preset("neurons");
  SweepSpec b = a;
  b.levels[3].arch = MlpArchitecture::uniform(1, 123);
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    if (i == 3) {
      EXPECT_NE(level_hash(a, i), level_hash(b, i));
    } else {
      EXPECT_EQ(level_hash(a, i), level_hash(b, i));
    }
  }
  b = a;
  b.n_grid = 4000;  // evaluation setting, not part of training
  EXPECT_EQ(level_hash(a, 0), level_hash(b, 0));
  b.base_seed = 1;
  EXPECT_NE(level_hash(a, 0), level_hash(b, 0));
}

TEST(RunSweep, DegenerateOneModelOneLevel) {
  const fs::path root = fresh_dir("one");
  ResultsStore store(root);
  SweepSpec s = tiny_spec();
  s.levels.resize(1);
  s.ensemble_size = 1;
  const auto summary = run_sweep(s, store);
  ASSERT_EQ(summary.metrics.size(), 1u);
  for (const auto& r : summary.metrics[0].gl) {
    ASSERT_EQ(r.per_model_g_l.size(), 1u);
    EXPECT_EQ(r.ensemble_G_l, r.per_model_g_l[0]);
  }
  EXPECT_EQ(summary.metrics[0].time_variance_s2, 0.0);
  for (const auto& row : summary.stats) {
    EXPECT_FALSE(row.kruskal.has_value());
    EXPECT_FALSE(row.skipped.empty());
  }
  fs::remove_all(root);
}

TEST(RunSweep, DeterministicAcrossStores) {
  const fs::path r1 = fresh_dir("det1"), r2 = fresh_dir("det2");
  ResultsStore s1(r1), s2(r2);
  const auto a = run_sweep(tiny_spec(), s1, {1, nullptr});
  const auto b = run_sweep(tiny_spec(), s2, {2, nullptr});
  ASSERT_EQ(a.ensembles.size(), b.ensembles.size());
  for (std::size_t l = 0; l < a.ensembles.size(); ++l) {
    for (std::size_t m = 0; m < a.ensembles[l].models.size(); ++m) {
      EXPECT_EQ(a.ensembles[l].models[m].params, b.ensembles[l].models[m].params);
      EXPECT_EQ(a.ensembles[l].models[m].final_loss, b.ensembles[l].models[m].final_loss);
    }
    for (std::size_t k = 0; k < a.metrics[l].gl.size(); ++k) {
      EXPECT_EQ(a.metrics[l].gl[k].per_model_g_l, b.metrics[l].gl[k].per_model_g_l);
      EXPECT_EQ(a.metrics[l].alt[k].per_model, b.metrics[l].alt[k].per_model);
    }
  }
  for (std::size_t k = 0; k < a.stats.size(); ++k) {
    ASSERT_EQ(a.stats[k].kruskal.has_value(), b.stats[k].kruskal.has_value());
    if (a.stats[k].kruskal) {
      EXPECT_EQ(a.stats[k].kruskal->statistic, b.stats[k].kruskal->statistic);
      EXPECT_EQ(a.stats[k].kruskal->p_value, b.stats[k].kruskal->p_value);
    }
  }
  fs::remove_all(r1);
  fs::remove_all(r2);
}

TEST(RunSweep, RerunReusesStoredEnsemblesAndReloads) {
  const fs::path root = fresh_dir("rerun");
  ResultsStore store(root);
  const auto first = run_sweep(tiny_spec(), store);
  const auto again = run_sweep(tiny_spec(), store);  // identical documents: no StoreError
  EXPECT_EQ(again.ensembles[1].models[2].wall_time_s, first.ensembles[1].models[2].wall_time_s);
  const auto loaded = load_sweep(store, "collocation_points");
  EXPECT_EQ(loaded.spec_hash, first.spec_hash);
  EXPECT_EQ(encode(loaded).dump(), encode(first).dump());
  EXPECT_THROW(load_sweep(store, "layers"), StoreError);
  fs::remove_all(root);
}

TEST(ExportPlotData, TablesAndColumns) {
  const fs::path root = fresh_dir("plots");
  ResultsStore store(root);
  const SweepSpec spec = tiny_spec();
  run_sweep(spec, store);
  const auto paths = export_plot_data(store, spec.name, "", 1001);
  EXPECT_EQ(paths.size(), 2 * spec.levels.size() + 3);

  fs::path gl, pred;
  for (const auto& p : paths) {
    if (p.filename() == "gl.csv") gl = p;
    if (p.filename().string().starts_with("prediction_0_")) pred = p;
  }
  ASSERT_FALSE(gl.empty());
  ASSERT_FALSE(pred.empty());
  EXPECT_EQ(read_lines(gl).size(), 1 + spec.levels.size() * spec.epsilons.size());

  const auto lines = read_lines(pred);
  ASSERT_EQ(lines.size(), 1002u);
  EXPECT_EQ(lines[0], "x,oracle,mean,std,lower,upper,abs_error,in_train_domain");
  bool saw_pi_over_4 = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    ASSERT_EQ(f.size(), 8u);
    const double x = std::stod(f[0]), mean = std::stod(f[2]), sd = std::stod(f[3]);
    EXPECT_GE(sd, 0.0);
    EXPECT_NEAR(std::stod(f[4]), mean - 2 * sd, 1e-12);
    EXPECT_NEAR(std::stod(f[5]), mean + 2 * sd, 1e-12);
    // Grid point 625 of 1001 over [-pi, pi] is pi/4.
    if (i - 1 == 625) {
      EXPECT_NEAR(x, kPi / 4, 1e-12);
      EXPECT_NEAR(std::stod(f[1]), 13.0 / 30.0, 1e-12);
      saw_pi_over_4 = true;
    }
  }
  EXPECT_TRUE(saw_pi_over_4);
  // Exporting twice writes identical files.
  EXPECT_NO_THROW(export_plot_data(store, spec.name, "", 1001));
  fs::remove_all(root);
}

TEST(ExportPlotData, MissingSweepIsStoreError) {
  const fs::path root = fresh_dir("missing");
  ResultsStore store(root);
  EXPECT_THROW(export_plot_data(store, "neurons"), StoreError);
  fs::remove_all(root);
}
