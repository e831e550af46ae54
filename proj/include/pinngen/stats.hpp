#pragma once
/**
 * @file stats.hpp
 * @brief Rank-based tests (Kruskal-Wallis H, Mann-Whitney U) with tie
 *        correction, and the chi-square survival function behind them.
 */

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pinngen {

inline constexpr double kSignificanceLevel = 0.01;

enum class StatMethod { kruskal_wallis, mann_whitney_u };
std::string to_string(StatMethod m);
StatMethod stat_method_from_string(const std::string& s);

struct StatTestResult {
  double statistic = 0.0;  ///< H or U
  double p_value = 1.0;
  std::vector<std::size_t> group_sizes;
  bool tie_corrected = false;  ///< ties were present and the correction applied
  StatMethod method = StatMethod::kruskal_wallis;
  bool degenerate = false;  ///< every value tied; statistic and p fixed by convention

  bool significant(double alpha = kSignificanceLevel) const { return p_value < alpha; }
};

/// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> rank_with_ties(std::span<const double> values);

/// Survival function of the chi-square distribution, Q(df/2, x/2).
double chi_square_sf(double x, int df);

/// Requires >= 2 groups with >= 2 values each.
StatTestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Two-sided, normal approximation with tie and continuity correction.
/// U = min(U1, U2).
StatTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

struct PairwiseTest {
  std::size_t first = 0;
  std::size_t second = 0;
  StatTestResult result;
  double adjusted_p = 1.0;  ///< equals result.p_value unless Bonferroni is on
};

/// Mann-Whitney for every pair i < j, in lexicographic order.
std::vector<PairwiseTest> pairwise_mann_whitney(const std::vector<std::vector<double>>& groups,
                                                bool bonferroni = false);

}  // namespace pinngen
