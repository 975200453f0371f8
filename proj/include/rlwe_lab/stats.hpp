#pragma once

// Rank tests for comparing degree classes: Mann-Whitney U (normal
// approximation with tie and continuity corrections) and Kruskal-Wallis H.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace rlwe_lab {

struct SampleGroup {
  std::string label;
  std::vector<double> values;

  SampleGroup(std::string l, std::vector<double> v) : label(std::move(l)), values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("sample group '" + label + "' is empty");
  }
};

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> effect_size_r;
  std::optional<double> z;
};

enum class Alternative { two_sided, less, greater };

struct RankData {
  std::vector<double> ranks;  // 1-based, ties get their average rank
  double tie_sum = 0.0;       // sum over tie groups of t^3 - t
};

inline RankData average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankData out{std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = avg;
    const double t = static_cast<double>(j - i);
    out.tie_sum += t * t * t - t;
    i = j;
  }
  return out;
}

/// Upper tail P(X > x) for X ~ chi^2(df).
inline double chi_squared_survival(double x, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("chi-squared degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

/// Upper tail of the standard normal.
inline double normal_survival(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

/// U counts pairs with a_i > b_j, ties as 1/2. `greater` tests whether `a`
/// tends to exceed `b`.
inline TestOutcome mann_whitney_u(const SampleGroup& a, const SampleGroup& b,
                                  Alternative alt = Alternative::two_sided) {
  const double na = static_cast<double>(a.values.size());
  const double nb = static_cast<double>(b.values.size());
  std::vector<double> pooled(a.values);
  pooled.insert(pooled.end(), b.values.begin(), b.values.end());
  const RankData rd = average_ranks(pooled);
  const double rank_sum_a = std::accumulate(rd.ranks.begin(), rd.ranks.begin() + a.values.size(), 0.0);

  TestOutcome out;
  out.statistic = rank_sum_a - na * (na + 1.0) / 2.0;
  const double n = na + nb;
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - rd.tie_sum / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    out.p_value = 1.0;
    out.z = 0.0;
    out.effect_size_r = 0.0;
    return out;
  }
  const double sd = std::sqrt(var);
  const double diff = out.statistic - mean;
  double z = 0.0;
  switch (alt) {
    case Alternative::two_sided:
      z = std::copysign(std::max(std::abs(diff) - 0.5, 0.0), diff) / sd;
      out.p_value = std::min(1.0, 2.0 * normal_survival(std::abs(z)));
      break;
    case Alternative::greater:
      z = (diff - 0.5) / sd;
      out.p_value = normal_survival(z);
      break;
    case Alternative::less:
      z = (diff + 0.5) / sd;
      out.p_value = normal_survival(-z);
      break;
  }
  out.p_value = std::clamp(out.p_value, 0.0, 1.0);
  out.z = z;
  out.effect_size_r = std::abs(z) / std::sqrt(n);
  return out;
}

/// H with tie correction; p from chi^2 with k - 1 degrees of freedom.
inline TestOutcome kruskal_wallis(const std::vector<SampleGroup>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis needs at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.values.begin(), g.values.end());
  const double n = static_cast<double>(pooled.size());
  const RankData rd = average_ranks(pooled);

  double sum = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double r = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) r += rd.ranks[offset + i];
    sum += r * r / static_cast<double>(g.values.size());
    offset += g.values.size();
  }
  TestOutcome out;
  const double correction = 1.0 - rd.tie_sum / (n * n * n - n);
  if (!(correction > 0.0)) return out;  // every value identical
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  out.statistic = std::max(h, 0.0);
  out.p_value = std::clamp(chi_squared_survival(out.statistic, static_cast<double>(groups.size() - 1)), 0.0, 1.0);
  return out;
}

}  // namespace rlwe_lab
