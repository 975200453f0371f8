#pragma once

// Gram-Schmidt data, LLL reduction and reduction-quality metrics for integer
// row lattices.
//
// Two LLL engines are provided:
//  * an exact integral engine (Gram determinants d_i and lambda_ij = d_j mu_ij
//    kept as GMP integers), used for tests and for certifying results;
//  * a floating engine (long double GSO derived from an exactly maintained
//    integer Gram matrix) that does the heavy lifting at attack dimensions.
// By default the floating result is handed to the exact engine, which either
// confirms it is LLL-reduced or finishes the reduction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rlwe_lab/basis.hpp"
#include "rlwe_lab/hnf.hpp"

namespace rlwe_lab {

class DependentRowsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class BudgetExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LllArithmetic { floating, exact };

struct LllParams {
  double delta = 0.99;
  LllArithmetic arithmetic = LllArithmetic::floating;
  /// Floating mode only: pass the result through the exact engine.
  bool verify_exact = true;
  /// Main-loop iterations allowed per engine run.
  std::uint64_t iteration_budget = 10'000'000;

  LllParams() = default;
  explicit LllParams(double d) : delta(d) { validate(); }

  void validate() const {
    if (!(delta > 0.25 && delta < 1.0))
      throw std::invalid_argument("LLL delta must lie in (1/4, 1), got " + std::to_string(delta));
  }
};

/// Exact Gram-Schmidt data. ortho[i] = b_i*, mu[i][j] (j < i), norms_sq[i] = |b_i*|^2.
struct GsoData {
  std::vector<std::vector<mpq_class>> ortho;
  std::vector<std::vector<mpq_class>> mu;
  std::vector<mpq_class> norms_sq;
};

namespace detail {

inline mpq_class exact_rational(double v) {
  mpq_class r(v);  // binary doubles convert exactly
  r.canonicalize();
  return r;
}

// Arithmetic helpers shared by the floating engine for both integer types.

inline long double to_ld(std::int64_t v) { return static_cast<long double>(v); }
inline long double to_ld(__int128 v) { return static_cast<long double>(v); }
inline long double to_ld(const mpz_class& v) {
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::ldexp(static_cast<long double>(m), static_cast<int>(exp));
}

template <class Int>
struct WideOf {
  using type = mpz_class;
};
template <>
struct WideOf<std::int64_t> {
  using type = __int128;
};

inline void sub_mul_checked(std::int64_t& a, std::int64_t x, std::int64_t b) {
  std::int64_t p = 0;
  if (__builtin_mul_overflow(x, b, &p) || __builtin_sub_overflow(a, p, &a))
    throw std::overflow_error("lattice entry overflowed 64 bits");
}
inline void sub_mul_checked(__int128& a, __int128 x, __int128 b) {
  __int128 p = 0;
  if (__builtin_mul_overflow(x, b, &p) || __builtin_sub_overflow(a, p, &a))
    throw std::overflow_error("Gram matrix entry overflowed 128 bits");
}
inline void sub_mul_checked(mpz_class& a, const mpz_class& x, const mpz_class& b) { a -= x * b; }

template <class Int>
Int integer_from_rounded(long double x) {
  if constexpr (std::is_same_v<Int, std::int64_t>) {
    if (!(std::fabs(x) < 0x1p62L)) throw std::overflow_error("size-reduction coefficient overflowed 64 bits");
    return static_cast<std::int64_t>(x);
  } else {
    mpz_class z;
    mpz_set_d(z.get_mpz_t(), static_cast<double>(x));
    return z;
  }
}

template <class Int, class Wide>
Wide widen(const Int& v) {
  if constexpr (std::is_same_v<Wide, __int128>)
    return static_cast<__int128>(v);
  else
    return Wide(v);
}

/// Schnorr-Euchner style LLL with long double GSO. The Gram matrix is kept
/// exactly, so every GSO row is recomputed from exact inner products.
template <class Int>
class FloatLll {
 public:
  using Wide = typename WideOf<Int>::type;

  FloatLll(std::vector<std::vector<Int>> rows, std::size_t dim, double delta, std::uint64_t budget)
      : b_(std::move(rows)), dim_(dim), delta_(delta), budget_(budget) {
    const std::size_t n = b_.size();
    g_.assign(n, std::vector<Wide>(n, Wide(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        Wide acc(0);
        for (std::size_t t = 0; t < dim_; ++t) acc += widen<Int, Wide>(b_[i][t]) * widen<Int, Wide>(b_[j][t]);
        g_[i][j] = acc;
        g_[j][i] = acc;
      }
    mu_.assign(n, std::vector<long double>(n, 0.0L));
    r_.assign(n, std::vector<long double>(n, 0.0L));
  }

  std::uint64_t run() {
    std::size_t k = 0;
    std::uint64_t iterations = 0;
    while (k < b_.size()) {
      if (++iterations > budget_)
        throw BudgetExhaustedError("LLL iteration budget of " + std::to_string(budget_) + " exhausted");
      if (k > 0) size_reduce_row(k);
      if (g_[k][k] == Wide(0)) throw DependentRowsError("lll_reduce: input rows are linearly dependent");
      long double rkk = detail::to_ld(g_[k][k]);
      for (std::size_t j = 0; j < k; ++j) rkk -= mu_[k][j] * r_[k][j];
      r_[k][k] = rkk;
      if (k == 0) {
        k = 1;
        continue;
      }
      const long double m = mu_[k][k - 1];
      if (delta_ * r_[k - 1][k - 1] > rkk + m * m * r_[k - 1][k - 1]) {
        swap_rows(k - 1, k);
        --k;
      } else {
        ++k;
      }
    }
    return iterations;
  }

  std::vector<std::vector<Int>>& rows() { return b_; }

 private:
  void compute_mu_row(std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      long double rkj = detail::to_ld(g_[k][j]);
      for (std::size_t l = 0; l < j; ++l) rkj -= mu_[j][l] * r_[k][l];
      r_[k][j] = rkj;
      mu_[k][j] = rkj / r_[j][j];
    }
  }

  void size_reduce_row(std::size_t k) {
    // Each pass recomputes mu from the exact Gram matrix; a bounded number of
    // passes guards against floating oscillation at |mu| ~ 1/2.
    for (int pass = 0; pass < 32; ++pass) {
      compute_mu_row(k);
      bool changed = false;
      for (std::size_t jj = k; jj-- > 0;) {
        const long double m = mu_[k][jj];
        if (!(std::fabs(m) > 0.5L)) continue;
        const long double xr = std::nearbyint(m);
        const Int x = integer_from_rounded<Int>(xr);
        subtract_multiple(k, jj, x);
        for (std::size_t l = 0; l < jj; ++l) mu_[k][l] -= xr * mu_[jj][l];
        mu_[k][jj] -= xr;
        changed = true;
      }
      if (!changed) return;
    }
    // Pass limit hit: leave mu and r consistent for the Lovasz test.
    compute_mu_row(k);
  }

  // b_k -= x b_j, keeping the Gram matrix exact.
  void subtract_multiple(std::size_t k, std::size_t j, const Int& x) {
    for (std::size_t t = 0; t < dim_; ++t) sub_mul_checked(b_[k][t], x, b_[j][t]);
    const Wide wx = widen<Int, Wide>(x);
    Wide gkk = g_[k][k];
    sub_mul_checked(gkk, wx, g_[k][j]);
    sub_mul_checked(gkk, wx, g_[k][j]);
    Wide xx = wx;
    xx *= wx;
    sub_mul_checked(gkk, Wide(0) - xx, g_[j][j]);
    for (std::size_t i = 0; i < b_.size(); ++i) {
      if (i == k) continue;
      sub_mul_checked(g_[k][i], wx, g_[j][i]);
      g_[i][k] = g_[k][i];
    }
    g_[k][k] = gkk;
  }

  void swap_rows(std::size_t a, std::size_t c) {
    std::swap(b_[a], b_[c]);
    std::swap(g_[a], g_[c]);
    for (auto& row : g_) std::swap(row[a], row[c]);
  }

  std::vector<std::vector<Int>> b_;
  std::size_t dim_;
  long double delta_;
  std::uint64_t budget_;
  std::vector<std::vector<Wide>> g_;
  std::vector<std::vector<long double>> mu_;
  std::vector<std::vector<long double>> r_;
};

/// Nearest integer to num/den (den > 0), ties rounded up.
inline mpz_class round_div(const mpz_class& num, const mpz_class& den) {
  mpz_class twice = 2 * num + den;
  mpz_class twice_den = 2 * den;
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), twice.get_mpz_t(), twice_den.get_mpz_t());
  return out;
}

/// Integral LLL (Cohen, "A Course in Computational Algebraic Number Theory",
/// Alg. 2.6.7) generalised to delta = P/Q. d[i + 1] holds the Gram
/// determinant d_i and d[0] = 1.
class IntegralLll {
 public:
  IntegralLll(IntegerBasis<mpz_class> basis, double delta, std::uint64_t budget)
      : b_(std::move(basis)), budget_(budget) {
    const mpq_class dq = exact_rational(delta);
    p_ = dq.get_num();
    q_ = dq.get_den();
    const std::size_t n = b_.row_count();
    lambda_.assign(n, std::vector<mpz_class>(n, mpz_class(0)));
    d_.assign(n + 1, mpz_class(0));
    d_[0] = 1;
  }

  std::uint64_t run() {
    const std::size_t n = b_.row_count();
    if (n == 0) return 0;
    d_[1] = dot(0, 0);
    if (d_[1] == 0) throw DependentRowsError("lll_reduce: zero row in input");
    std::size_t k = 1;
    std::size_t kmax = 0;
    std::uint64_t iterations = 0;
    while (k < n) {
      if (++iterations > budget_)
        throw BudgetExhaustedError("LLL iteration budget of " + std::to_string(budget_) + " exhausted");
      if (k > kmax) {
        kmax = k;
        incorporate(k);
      }
      reduce(k, k - 1);
      // Lovasz fails iff P d_{k-1}^2 > Q (d_k d_{k-2} + lambda^2).
      const mpz_class& lam = lambda_[k][k - 1];
      const mpz_class lhs = p_ * d_[k] * d_[k];
      const mpz_class rhs = q_ * (d_[k + 1] * d_[k - 1] + lam * lam);
      if (lhs > rhs) {
        swap(k, kmax);
        if (k > 1) --k;
      } else {
        for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
        ++k;
      }
    }
    return iterations;
  }

  IntegerBasis<mpz_class>& basis() { return b_; }

 private:
  mpz_class dot(std::size_t i, std::size_t j) const {
    mpz_class acc = 0;
    for (std::size_t t = 0; t < b_.dim(); ++t) acc += b_(i, t) * b_(j, t);
    return acc;
  }

  void incorporate(std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      mpz_class u = dot(k, j);
      for (std::size_t i = 0; i < j; ++i) {
        u = d_[i + 1] * u - lambda_[k][i] * lambda_[j][i];
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d_[i].get_mpz_t());
      }
      if (j < k) {
        lambda_[k][j] = u;
      } else {
        if (u == 0) throw DependentRowsError("lll_reduce: input rows are linearly dependent");
        d_[k + 1] = u;
      }
    }
  }

  void reduce(std::size_t k, std::size_t l) {
    mpz_class twice = 2 * lambda_[k][l];
    if (abs(twice) <= d_[l + 1]) return;
    const mpz_class r = round_div(lambda_[k][l], d_[l + 1]);
    for (std::size_t t = 0; t < b_.dim(); ++t) b_(k, t) -= r * b_(l, t);
    lambda_[k][l] -= r * d_[l + 1];
    for (std::size_t i = 0; i < l; ++i) lambda_[k][i] -= r * lambda_[l][i];
  }

  void swap(std::size_t k, std::size_t kmax) {
    std::swap(b_[k], b_[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(lambda_[k][j], lambda_[k - 1][j]);
    const mpz_class lam = lambda_[k][k - 1];
    mpz_class bnew = d_[k - 1] * d_[k + 1] + lam * lam;
    mpz_divexact(bnew.get_mpz_t(), bnew.get_mpz_t(), d_[k].get_mpz_t());
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const mpz_class t = lambda_[i][k];
      mpz_class nk = d_[k + 1] * lambda_[i][k - 1] - lam * t;
      mpz_divexact(nk.get_mpz_t(), nk.get_mpz_t(), d_[k].get_mpz_t());
      lambda_[i][k] = nk;
      mpz_class nk1 = bnew * t + lam * nk;
      mpz_divexact(nk1.get_mpz_t(), nk1.get_mpz_t(), d_[k + 1].get_mpz_t());
      lambda_[i][k - 1] = nk1;
    }
    d_[k] = bnew;
  }

  IntegerBasis<mpz_class> b_;
  std::uint64_t budget_;
  mpz_class p_, q_;
  std::vector<std::vector<mpz_class>> lambda_;
  std::vector<mpz_class> d_;
};

/// Integral Gram-Schmidt: d[i + 1] = prod_{j<=i} |b_j*|^2, lambda[i][j] = d_j mu_ij.
/// Returns false when the rows are dependent.
inline bool integral_gso(const IntegerBasis<mpz_class>& b, std::vector<mpz_class>& d,
                         std::vector<std::vector<mpz_class>>& lambda) {
  const std::size_t n = b.row_count();
  d.assign(n + 1, mpz_class(0));
  d[0] = 1;
  lambda.assign(n, std::vector<mpz_class>(n, mpz_class(0)));
  std::vector<std::vector<mpz_class>> gram(n, std::vector<mpz_class>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      mpz_class acc = 0;
      for (std::size_t t = 0; t < b.dim(); ++t) acc += b(i, t) * b(j, t);
      gram[i][j] = acc;
    }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      mpz_class u = gram[i][j];
      for (std::size_t l = 0; l < j; ++l) {
        u = d[l + 1] * u - lambda[i][l] * lambda[j][l];
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[l].get_mpz_t());
      }
      if (j < i) {
        lambda[i][j] = u;
      } else {
        if (u == 0) return false;
        d[i + 1] = u;
      }
    }
  }
  return true;
}

/// Floating GSO squared norms |b_i*|^2 computed from the exact Gram matrix.
template <class Int>
std::vector<long double> float_gso_norms(const IntegerBasis<Int>& basis) {
  const std::size_t n = basis.row_count();
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0.0L));
  std::vector<std::vector<long double>> r(n, std::vector<long double>(n, 0.0L));
  using Wide = typename WideOf<Int>::type;
  std::vector<long double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Wide acc(0);
      for (std::size_t t = 0; t < basis.dim(); ++t)
        acc += widen<Int, Wide>(basis(i, t)) * widen<Int, Wide>(basis(j, t));
      long double v = to_ld(acc);
      for (std::size_t l = 0; l < j; ++l) v -= mu[j][l] * r[i][l];
      r[i][j] = v;
      if (j < i) mu[i][j] = v / r[j][j];
    }
    norms[i] = r[i][i];
  }
  return norms;
}

}  // namespace detail

/// Exact Gram-Schmidt orthogonalisation. Throws DependentRowsError when some
/// |b_i*|^2 vanishes.
template <class Int>
GsoData gso(const IntegerBasis<Int>& basis) {
  const std::size_t n = basis.row_count();
  const std::size_t dim = basis.dim();
  GsoData out;
  out.ortho.assign(n, std::vector<mpq_class>(dim));
  out.mu.assign(n, std::vector<mpq_class>(n, mpq_class(0)));
  out.norms_sq.assign(n, mpq_class(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < dim; ++t) out.ortho[i][t] = mpq_class(to_mpz(basis(i, t)));
    for (std::size_t j = 0; j < i; ++j) {
      mpq_class ip = 0;
      for (std::size_t t = 0; t < dim; ++t) ip += mpq_class(to_mpz(basis(i, t))) * out.ortho[j][t];
      out.mu[i][j] = ip / out.norms_sq[j];
      for (std::size_t t = 0; t < dim; ++t) out.ortho[i][t] -= out.mu[i][j] * out.ortho[j][t];
    }
    mpq_class nsq = 0;
    for (std::size_t t = 0; t < dim; ++t) nsq += out.ortho[i][t] * out.ortho[i][t];
    if (nsq == 0) throw DependentRowsError("gso: row " + std::to_string(i) + " is dependent on earlier rows");
    out.norms_sq[i] = nsq;
  }
  return out;
}

/// Exact size reduction: afterwards every |mu_ij| <= 1/2. The lattice is
/// unchanged (only unimodular row operations are applied).
template <class Int>
IntegerBasis<Int> size_reduce(const IntegerBasis<Int>& basis, const GsoData& data) {
  IntegerBasis<mpz_class> b = to_mpz_basis(basis);
  auto mu = data.mu;
  const mpq_class half(1, 2);
  for (std::size_t k = 1; k < b.row_count(); ++k) {
    for (std::size_t j = k; j-- > 0;) {
      if (abs(mu[k][j]) <= half) continue;
      const mpq_class shifted = mu[k][j] + half;
      mpz_class r;
      mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
      for (std::size_t t = 0; t < b.dim(); ++t) b(k, t) -= r * b(j, t);
      for (std::size_t l = 0; l < j; ++l) mu[k][l] -= mpq_class(r) * mu[j][l];
      mu[k][j] -= mpq_class(r);
    }
  }
  return from_mpz_basis<Int>(b);
}

template <class Int>
IntegerBasis<Int> size_reduce(const IntegerBasis<Int>& basis) {
  return size_reduce(basis, gso(basis));
}

/// True iff the rows are independent, |mu_ij| <= 1/2 for all j < i and the
/// Lovasz condition (delta - mu_{i+1,i}^2)|b_i*|^2 <= |b_{i+1}*|^2 holds,
/// all checked in exact arithmetic.
template <class Int>
bool is_lll_reduced(const IntegerBasis<Int>& basis, const LllParams& params = {}) {
  params.validate();
  std::vector<mpz_class> d;
  std::vector<std::vector<mpz_class>> lambda;
  if (!detail::integral_gso(to_mpz_basis(basis), d, lambda)) return false;
  const std::size_t n = basis.row_count();
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (abs(2 * lambda[i][j]) > d[j + 1]) return false;
  const mpq_class dq = detail::exact_rational(params.delta);
  for (std::size_t i = 1; i < n; ++i) {
    const mpz_class& lam = lambda[i][i - 1];
    if (dq.get_num() * d[i] * d[i] > dq.get_den() * (d[i + 1] * d[i - 1] + lam * lam)) return false;
  }
  return true;
}

/// LLL-reduces linearly independent rows. Throws DependentRowsError for
/// dependent input and BudgetExhaustedError when the iteration budget runs out.
template <class Int>
IntegerBasis<Int> lll_reduce(const IntegerBasis<Int>& basis, const LllParams& params = {}) {
  params.validate();
  if (params.arithmetic == LllArithmetic::exact) {
    detail::IntegralLll engine(to_mpz_basis(basis), params.delta, params.iteration_budget);
    engine.run();
    return from_mpz_basis<Int>(engine.basis());
  }
  detail::FloatLll<Int> engine(basis.rows(), basis.dim(), params.delta, params.iteration_budget);
  engine.run();
  IntegerBasis<Int> out = IntegerBasis<Int>::empty(basis.dim());
  for (auto& r : engine.rows()) out.push_back(std::move(r));
  if (!params.verify_exact || out.row_count() == 0) return out;
  detail::IntegralLll exact(to_mpz_basis(out), params.delta, params.iteration_budget);
  exact.run();
  return from_mpz_basis<Int>(exact.basis());
}

/// An LLL-reduced basis of the lattice spanned by arbitrary (possibly
/// dependent) generator rows: Hermite normal form removes the dependencies,
/// then the rows are reduced. All-zero input gives an empty basis.
template <class Int>
IntegerBasis<Int> extract_independent(const IntegerBasis<Int>& generators, const LllParams& params = {}) {
  params.validate();
  return lll_reduce(from_mpz_basis<Int>(hermite_normal_form(generators)), params);
}

template <class Int>
long double euclidean_norm(const std::vector<Int>& v) {
  long double acc = 0.0L;
  for (const auto& x : v) {
    const long double f = detail::to_ld(x);
    acc += f * f;
  }
  return std::sqrt(acc);
}

/// log of the lattice volume sqrt(det(B B^T)).
template <class Int>
long double log_volume(const IntegerBasis<Int>& basis) {
  const auto norms = detail::float_gso_norms(basis);
  long double acc = 0.0L;
  for (auto v : norms) {
    if (!(v > 0.0L)) throw DependentRowsError("log_volume: basis is rank deficient");
    acc += 0.5L * std::log(v);
  }
  return acc;
}

/// gamma with |b_1| = gamma^n vol(L)^(1/n), n = number of rows.
template <class Int>
double root_hermite_factor(const IntegerBasis<Int>& basis) {
  const std::size_t n = basis.row_count();
  if (n == 0) throw DependentRowsError("root_hermite_factor: empty basis");
  const auto norms = detail::float_gso_norms(basis);
  const long double scale = *std::max_element(norms.begin(), norms.end());
  long double logvol = 0.0L;
  for (auto v : norms) {
    // Relative threshold: exact dependence shows up as cancellation noise.
    if (!(v > scale * 1e-15L)) throw DependentRowsError("root_hermite_factor: basis is rank deficient");
    logvol += 0.5L * std::log(v);
  }
  const long double nn = static_cast<long double>(n);
  const long double log_b1 = std::log(euclidean_norm(basis[0]));
  return static_cast<double>(std::exp((log_b1 - logvol / nn) / nn));
}

}  // namespace rlwe_lab
