#pragma once

// Markdown summary of sweep results: one table per degree family (degrees
// grouped by their nearest power of two) plus rank-test outcomes.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rlwe_lab/experiment.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/stats.hpp"

namespace rlwe_lab {

/// Nearest power of two on a log scale: lo when d^2 < 2 lo^2, else 2 lo.
inline std::size_t reference_degree(std::size_t d) {
  if (d <= 1) return 1;
  std::size_t lo = 1;
  while (lo * 2 <= d) lo *= 2;
  return d * d < 2 * lo * lo ? lo : 2 * lo;
}

inline std::size_t prime_below(std::size_t n) {
  for (std::size_t k = n; k-- > 2;)
    if (is_prime(static_cast<std::int64_t>(k))) return k;
  return 0;
}

inline std::size_t prime_above(std::size_t n) {
  for (std::size_t k = n + 1;; ++k)
    if (is_prime(static_cast<std::int64_t>(k))) return k;
}

/// Families keyed by reference degree, each with its ascending degrees.
inline std::map<std::size_t, std::vector<std::size_t>> degree_families(const SweepReport& report) {
  std::map<std::size_t, std::vector<std::size_t>> fam;
  for (const auto& s : report.per_degree) fam[reference_degree(s.degree)].push_back(s.degree);
  return fam;
}

/// True for the primes immediately below and above a degree's reference.
inline bool is_neighbour_prime(std::size_t d) {
  const std::size_t r = reference_degree(d);
  return d == prime_below(r) || d == prime_above(r);
}

enum class Comparison { none, primes_vs_rest };

struct ComparisonResult {
  std::vector<std::size_t> prime_degrees;
  std::vector<std::size_t> other_degrees;
  std::optional<TestOutcome> success_rates;  // per-degree rates
  std::optional<TestOutcome> times;          // per-trial times
};

inline ComparisonResult compare_primes_vs_rest(const SweepReport& report, Alternative alt = Alternative::two_sided) {
  ComparisonResult out;
  std::vector<double> rate_p, rate_o, time_p, time_o;
  for (const auto& s : report.per_degree) {
    const bool p = is_neighbour_prime(s.degree);
    (p ? out.prime_degrees : out.other_degrees).push_back(s.degree);
    (p ? rate_p : rate_o).push_back(s.success_rate);
  }
  for (const auto& r : report.records) (is_neighbour_prime(r.degree) ? time_p : time_o).push_back(r.time_s);
  if (!rate_p.empty() && !rate_o.empty())
    out.success_rates = mann_whitney_u(SampleGroup("neighbour primes", rate_p), SampleGroup("other", rate_o), alt);
  if (!time_p.empty() && !time_o.empty())
    out.times = mann_whitney_u(SampleGroup("neighbour primes", time_p), SampleGroup("other", time_o), alt);
  return out;
}

/// Kruskal-Wallis on per-trial times, one group per degree of the family.
inline std::optional<TestOutcome> family_time_test(const SweepReport& report, const std::vector<std::size_t>& degrees) {
  if (degrees.size() < 2) return std::nullopt;
  std::vector<SampleGroup> groups;
  for (auto d : degrees) {
    std::vector<double> t;
    for (const auto& r : report.records)
      if (r.degree == d) t.push_back(r.time_s);
    groups.emplace_back("d=" + std::to_string(d), std::move(t));
  }
  return kruskal_wallis(groups);
}

namespace detail {

inline std::string fmt_fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string fmt_sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

inline std::string fmt_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

inline void write_outcome(std::ostream& out, const std::string& name, const char* stat, const TestOutcome& t) {
  out << "- " << name << ": " << stat << " = " << fmt_fixed(t.statistic, 3) << ", p = " << fmt_sci(t.p_value);
  if (t.effect_size_r) out << ", r = " << fmt_fixed(*t.effect_size_r, 3);
  out << '\n';
}

}  // namespace detail

inline void write_family_table(std::ostream& out, const SweepReport& report, std::size_t reference,
                               const std::vector<std::size_t>& degrees) {
  out << "### Degrees near " << reference << "\n\n";
  out << "| Field extension | Success rate | Average time [s] |\n";
  out << "|---:|---:|---:|\n";
  for (auto d : degrees) {
    const auto& s = report.at(d);
    out << "| " << d << " | " << detail::fmt_fixed(s.success_rate, 2) << " | " << detail::fmt_fixed(s.mean_time_s, 2)
        << " |\n";
  }
  out << '\n';
}

inline void write_report(std::ostream& out, const SweepReport& report, Comparison cmp = Comparison::none,
                         Alternative alt = Alternative::two_sided) {
  out << "## Attack results\n\n";
  const auto families = degree_families(report);
  for (const auto& [ref, degrees] : families) write_family_table(out, report, ref, degrees);
  if (cmp == Comparison::none) return;

  out << "## Statistics\n\n";
  const auto c = compare_primes_vs_rest(report, alt);
  out << "Neighbour primes: " << (c.prime_degrees.empty() ? "none" : detail::fmt_list(c.prime_degrees))
      << "; other degrees: " << (c.other_degrees.empty() ? "none" : detail::fmt_list(c.other_degrees)) << "\n\n";
  if (c.success_rates)
    detail::write_outcome(out, "Mann-Whitney, per-degree success rate", "U", *c.success_rates);
  else
    out << "- Mann-Whitney, per-degree success rate: not computed (one side empty)\n";
  if (c.times)
    detail::write_outcome(out, "Mann-Whitney, per-trial time", "U", *c.times);
  else
    out << "- Mann-Whitney, per-trial time: not computed (one side empty)\n";
  for (const auto& [ref, degrees] : families) {
    const auto kw = family_time_test(report, degrees);
    const std::string name = "Kruskal-Wallis, times near " + std::to_string(ref);
    if (kw)
      detail::write_outcome(out, name, "H", *kw);
    else
      out << "- " << name << ": not computed (fewer than two degrees)\n";
  }
  out << "- Shapiro-Wilk and Steel-Dwass: not computed by this tool\n";
}

}  // namespace rlwe_lab
