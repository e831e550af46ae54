#include "pinngen/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "pinngen/error.hpp"

namespace pinngen {

std::string to_string(StatMethod m) {
  return m == StatMethod::kruskal_wallis ? "kruskal_wallis" : "mann_whitney_u";
}

StatMethod stat_method_from_string(const std::string& s) {
  if (s == "kruskal_wallis") return StatMethod::kruskal_wallis;
  if (s == "mann_whitney_u") return StatMethod::mann_whitney_u;
  throw ContractViolation("unknown test method '" + s + "'");
}

namespace {

struct Ranking {
  std::vector<double> ranks;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
};

Ranking rank_impl(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Ranking r;
  r.ranks.assign(n, 0.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1 .. j
    for (std::size_t k = i; k < j; ++k) r.ranks[order[k]] = avg;
    const auto t = static_cast<double>(j - i);
    r.tie_term += t * t * t - t;
    i = j;
  }
  return r;
}

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ContractViolation("rank tests need finite values");
  }
}

double normal_two_sided(double z) { return std::min(1.0, std::erfc(z / std::sqrt(2.0))); }

}  // namespace

std::vector<double> rank_with_ties(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("rank_with_ties: empty input");
  require_finite(values);
  return rank_impl(values).ranks;
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw ContractViolation("chi_square_sf: df must be >= 1");
  if (std::isnan(x) || x < 0.0) throw ContractViolation("chi_square_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ContractViolation("kruskal_wallis: need at least 2 groups");
  std::vector<double> pooled;
  StatTestResult result;
  result.method = StatMethod::kruskal_wallis;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ContractViolation("kruskal_wallis: every group needs >= 2 values");
    require_finite(g);
    pooled.insert(pooled.end(), g.begin(), g.end());
    result.group_sizes.push_back(g.size());
  }
  const Ranking ranking = rank_impl(pooled);
  const auto n = static_cast<double>(pooled.size());
  result.tie_corrected = ranking.tie_term > 0.0;
  const double correction = 1.0 - ranking.tie_term / (n * n * n - n);
  if (correction <= 0.0) {
    result.degenerate = true;
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }

  double sum = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranking.ranks[offset + i];
    sum += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  result.statistic = std::max(0.0, h);
  result.p_value = chi_square_sf(result.statistic, static_cast<int>(groups.size()) - 1);
  return result;
}

StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ContractViolation("mann_whitney_u: empty sample");
  require_finite(a);
  require_finite(b);
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranking ranking = rank_impl(pooled);

  const auto n1 = static_cast<double>(a.size());
  const auto n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  const double r1 = std::accumulate(ranking.ranks.begin(), ranking.ranks.begin() + a.size(), 0.0);
  const double u1 = r1 - n1 * (n1 + 1.0) / 2.0;
  const double u2 = n1 * n2 - u1;

  StatTestResult result;
  result.method = StatMethod::mann_whitney_u;
  result.group_sizes = {a.size(), b.size()};
  result.tie_corrected = ranking.tie_term > 0.0;
  result.statistic = std::min(u1, u2);

  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - ranking.tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    result.degenerate = true;
    result.statistic = mu;
    result.p_value = 1.0;
    return result;
  }
  const double z = (std::abs(u1 - mu) - 0.5) / std::sqrt(var);
  result.p_value = z <= 0.0 ? 1.0 : normal_two_sided(z);
  return result;
}

std::vector<PairwiseTest> pairwise_mann_whitney(const std::vector<std::vector<double>>& groups,
                                                bool bonferroni) {
  std::vector<PairwiseTest> tests;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseTest t;
      t.first = i;
      t.second = j;
      t.result = mann_whitney_u(groups[i], groups[j]);
      t.adjusted_p = t.result.p_value;
      tests.push_back(std::move(t));
    }
  }
  if (bonferroni) {
    const auto m = static_cast<double>(tests.size());
    for (auto& t : tests) t.adjusted_p = std::min(1.0, t.result.p_value * m);
  }
  return tests;
}

}  // namespace pinngen
