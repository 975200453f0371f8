#pragma once

// Row-style Hermite normal form over Z. Two generator sets span the same
// lattice iff their HNFs are equal, which makes this the reference check for
// every lattice-preserving operation.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rlwe_lab/basis.hpp"

namespace rlwe_lab {

/// Echelon form with positive pivots, entries above each pivot reduced into
/// [0, pivot), zero rows removed.
template <class Int>
IntegerBasis<mpz_class> hermite_normal_form(const IntegerBasis<Int>& generators) {
  IntegerBasis<mpz_class> h = to_mpz_basis(generators);
  auto& rows = h.rows();
  const std::size_t m = rows.size();
  const std::size_t n = h.dim();
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < n && pivot_row < m; ++col) {
    // Euclid across rows: repeatedly take the smallest nonzero entry as pivot.
    while (true) {
      std::optional<std::size_t> best;
      for (std::size_t i = pivot_row; i < m; ++i)
        if (rows[i][col] != 0 && (!best || abs(rows[i][col]) < abs(rows[*best][col]))) best = i;
      if (!best) break;
      std::swap(rows[pivot_row], rows[*best]);
      bool rest_zero = true;
      for (std::size_t i = pivot_row + 1; i < m; ++i) {
        if (rows[i][col] == 0) continue;
        mpz_class qt;
        mpz_tdiv_q(qt.get_mpz_t(), rows[i][col].get_mpz_t(), rows[pivot_row][col].get_mpz_t());
        for (std::size_t t = col; t < n; ++t) rows[i][t] -= qt * rows[pivot_row][t];
        if (rows[i][col] != 0) rest_zero = false;
      }
      if (rest_zero) break;
    }
    if (rows[pivot_row][col] == 0) continue;
    if (rows[pivot_row][col] < 0)
      for (std::size_t t = col; t < n; ++t) rows[pivot_row][t] = -rows[pivot_row][t];
    const mpz_class& p = rows[pivot_row][col];
    for (std::size_t i = 0; i < pivot_row; ++i) {
      mpz_class qt;
      mpz_fdiv_q(qt.get_mpz_t(), rows[i][col].get_mpz_t(), p.get_mpz_t());
      if (qt != 0)
        for (std::size_t t = col; t < n; ++t) rows[i][t] -= qt * rows[pivot_row][t];
    }
    ++pivot_row;
  }
  rows.resize(pivot_row);
  return h;
}

template <class IntA, class IntB>
bool same_lattice(const IntegerBasis<IntA>& a, const IntegerBasis<IntB>& b) {
  return a.dim() == b.dim() && hermite_normal_form(a) == hermite_normal_form(b);
}

/// Membership test against a basis already in Hermite normal form.
template <class Int>
bool hnf_contains(const IntegerBasis<mpz_class>& hnf, const std::vector<Int>& v) {
  if (v.size() != hnf.dim()) return false;
  std::vector<mpz_class> w;
  w.reserve(v.size());
  for (const auto& x : v) w.push_back(to_mpz(x));
  std::size_t col = 0;
  for (const auto& row : hnf.rows()) {
    while (row[col] == 0) {
      if (w[col] != 0) return false;
      ++col;
    }
    if (!mpz_divisible_p(w[col].get_mpz_t(), row[col].get_mpz_t())) return false;
    const mpz_class c = w[col] / row[col];
    for (std::size_t t = col; t < w.size(); ++t) w[t] -= c * row[t];
    ++col;
  }
  for (; col < w.size(); ++col)
    if (w[col] != 0) return false;
  return true;
}

template <class IntA, class IntB>
bool lattice_contains(const IntegerBasis<IntA>& generators, const std::vector<IntB>& v) {
  return hnf_contains(hermite_normal_form(generators), v);
}

}  // namespace rlwe_lab
