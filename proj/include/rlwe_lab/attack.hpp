#pragma once

// Secret recovery for two-sample RLWE via Kannan's embedding:
//
//   generators  [A^T | A'^T ; qI 0 ; 0 qI]   (3d x 2d, rank 2d)
//   A_LLL       reduced basis of that q-ary lattice
//   W           [A_LLL 0 ; b_c M]            ((2d+1) x (2d+1))
//
// After reducing W, a row (e, e', M) exposes the errors, and
// s = A^{-1} (b - e) mod q gives the secret.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlwe_lab/basis.hpp"
#include "rlwe_lab/lattice.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/rng.hpp"

namespace rlwe_lab {

using IntVector = std::vector<std::int64_t>;

struct AttackInstance {
  RingContext ctx;
  IntegerBasis<std::int64_t> A;        // multiplication matrix of a
  IntegerBasis<std::int64_t> A_prime;  // multiplication matrix of a'
  IntVector b;                         // A s + e  (centered)
  IntVector b_prime;                   // A' s + e'
  std::int64_t embedding_M = 1;
  std::uint64_t seed = 0;  // provenance only; recorded in instance dumps

  std::size_t degree() const { return ctx.degree(); }
  std::int64_t modulus() const { return ctx.modulus(); }
};

struct PlantedErrors {
  IntVector e;
  IntVector e_prime;
};

/// Assembles an instance from explicit ring elements.
inline AttackInstance make_instance(const RingElement& a, const RingElement& a_prime, const RingElement& secret,
                                    const RingElement& e, const RingElement& e_prime, std::int64_t M = 1) {
  const RingContext& ctx = secret.context();
  AttackInstance inst{ctx, multiplication_matrix(a), multiplication_matrix(a_prime), {}, {}, M, 0};
  inst.b = (a * secret + e).coeff_vector();
  inst.b_prime = (a_prime * secret + e_prime).coeff_vector();
  return inst;
}

/// Two fresh RLWE samples (a, a s + e), (a', a' s + e') sharing `secret`.
/// Sampling order: a, e, a', e'.
inline std::pair<AttackInstance, PlantedErrors> build_instance(const RingContext& ctx, const RingElement& secret,
                                                               Rng& rng, const GaussianParams& gauss,
                                                               std::int64_t M = 1) {
  for (auto c : secret.coeffs())
    if (c != 0 && c != 1) throw std::invalid_argument("build_instance: secret must have 0/1 coefficients");
  const RingElement a = sample_uniform(ctx, rng);
  const RingElement e = sample_error(ctx, rng, gauss);
  const RingElement a_prime = sample_uniform(ctx, rng);
  const RingElement e_prime = sample_error(ctx, rng, gauss);
  return {make_instance(a, a_prime, secret, e, e_prime, M), PlantedErrors{e.coeff_vector(), e_prime.coeff_vector()}};
}

/// Row generators of { (A s | A' s) mod q }: the top block stores A^T | A'^T
/// so that s^T times it is the row vector ((A s)^T | (A' s)^T).
inline IntegerBasis<std::int64_t> build_qary_generators(const AttackInstance& inst) {
  const std::size_t d = inst.degree();
  const std::int64_t q = inst.modulus();
  IntegerBasis<std::int64_t> g(3 * d, 2 * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      g(j, i) = inst.A(i, j);
      g(j, d + i) = inst.A_prime(i, j);
    }
  for (std::size_t i = 0; i < d; ++i) {
    g(d + i, i) = q;
    g(2 * d + i, d + i) = q;
  }
  return g;
}

inline IntVector embedding_target(const AttackInstance& inst) {
  IntVector t(inst.b);
  t.insert(t.end(), inst.b_prime.begin(), inst.b_prime.end());
  return t;
}

/// W = [[reduced, 0], [target, M]].
inline IntegerBasis<std::int64_t> kannan_embed(const IntegerBasis<std::int64_t>& reduced, const IntVector& target,
                                               std::int64_t M) {
  if (!reduced.is_square())
    throw std::invalid_argument("kannan_embed: reduced basis must be square (full rank), got " +
                                std::to_string(reduced.row_count()) + "x" + std::to_string(reduced.dim()));
  if (target.size() != reduced.dim()) throw std::invalid_argument("kannan_embed: target length mismatch");
  if (M <= 0) throw std::invalid_argument("kannan_embed: embedding constant must be positive");
  const std::size_t n = reduced.dim();
  IntegerBasis<std::int64_t> w(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = reduced(i, j);
  for (std::size_t j = 0; j < n; ++j) w(n, j) = target[j];
  w(n, n) = M;
  return w;
}

/// Rows ending in +-M, sign-normalised to +M; the one with the smallest
/// leading part wins (earliest row on ties). Absent when no row qualifies.
inline std::optional<PlantedErrors> extract_error(const IntegerBasis<std::int64_t>& reduced_w, std::size_t d,
                                                  std::int64_t M) {
  if (reduced_w.dim() != 2 * d + 1) throw std::invalid_argument("extract_error: W has wrong width");
  std::optional<PlantedErrors> best;
  long double best_norm = 0.0L;
  for (const auto& row : reduced_w.rows()) {
    const std::int64_t last = row[2 * d];
    if (last != M && last != -M) continue;
    const std::int64_t sign = last == M ? 1 : -1;
    long double norm = 0.0L;
    for (std::size_t i = 0; i < 2 * d; ++i) norm += static_cast<long double>(row[i]) * static_cast<long double>(row[i]);
    if (best && !(norm < best_norm)) continue;
    PlantedErrors cand;
    cand.e.resize(d);
    cand.e_prime.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      cand.e[i] = sign * row[i];
      cand.e_prime[i] = sign * row[d + i];
    }
    best = std::move(cand);
    best_norm = norm;
  }
  return best;
}

inline std::int64_t inverse_mod(std::int64_t a, std::int64_t q) {
  std::int64_t t = 0, new_t = 1, r = q, new_r = positive_mod(a, q);
  while (new_r != 0) {
    const std::int64_t quot = r / new_r;
    t = std::exchange(new_t, t - quot * new_t);
    r = std::exchange(new_r, r - quot * new_r);
  }
  if (r != 1) throw std::domain_error("value not invertible mod q");
  return positive_mod(t, q);
}

/// Solves A x = rhs over Z_q (q prime) by Gauss-Jordan elimination; nullopt
/// if A is singular mod q. Solution entries lie in [0, q).
inline std::optional<IntVector> solve_mod(const IntegerBasis<std::int64_t>& A, const IntVector& rhs, std::int64_t q) {
  const std::size_t n = A.row_count();
  if (!A.is_square() || rhs.size() != n) throw std::invalid_argument("solve_mod: shape mismatch");
  std::vector<IntVector> m(n, IntVector(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = positive_mod(A(i, j), q);
    m[i][n] = positive_mod(rhs[i], q);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(m[piv], m[col]);
    const std::int64_t inv = inverse_mod(m[col][col], q);
    for (std::size_t j = col; j <= n; ++j) m[col][j] = m[col][j] * inv % q;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || m[i][col] == 0) continue;
      const std::int64_t f = m[i][col];
      for (std::size_t j = col; j <= n; ++j) m[i][j] = positive_mod(m[i][j] - f * m[col][j], q);
    }
  }
  IntVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
  return x;
}

struct SecretRecovery {
  IntVector secret;  // entries in [0, q)
  bool binary = false;
};

/// s = A^{-1} (b - e) mod q. Absent when A is singular mod q; a non-binary
/// solution is still returned with `binary == false`.
inline std::optional<SecretRecovery> recover_secret(const IntegerBasis<std::int64_t>& A, const IntVector& b,
                                                    const IntVector& e, std::int64_t q) {
  if (b.size() != e.size()) throw std::invalid_argument("recover_secret: b and e differ in length");
  IntVector rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = b[i] - e[i];
  auto s = solve_mod(A, rhs, q);
  if (!s) return std::nullopt;
  SecretRecovery out{std::move(*s), true};
  for (auto c : out.secret)
    if (c != 0 && c != 1) out.binary = false;
  return out;
}

enum class FailureKind { none, no_short_vector, singular_matrix, budget_exhausted, wrong_key, internal_error };

inline std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::none: return "none";
    case FailureKind::no_short_vector: return "no_short_vector";
    case FailureKind::singular_matrix: return "singular_matrix";
    case FailureKind::budget_exhausted: return "budget_exhausted";
    case FailureKind::wrong_key: return "wrong_key";
    case FailureKind::internal_error: return "internal_error";
  }
  return "internal_error";
}

inline FailureKind failure_kind_from_string(std::string_view s) {
  for (auto k : {FailureKind::none, FailureKind::no_short_vector, FailureKind::singular_matrix,
                 FailureKind::budget_exhausted, FailureKind::wrong_key, FailureKind::internal_error})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown failure kind '" + std::string(s) + "'");
}

struct AttackResult {
  /// Error vector found, A invertible and the recovered secret is binary.
  /// Whether the key actually decrypts is decided by the crypto round trip.
  bool success = false;
  FailureKind failure = FailureKind::none;
  std::optional<PlantedErrors> recovered_error;
  std::optional<IntVector> recovered_secret;
  double wall_time_s = 0.0;
  double shortest_norm = 0.0;
  double root_hermite = 0.0;
};

/// Intermediate lattices, filled in when the caller asks for them.
struct EmbeddingLattice {
  IntegerBasis<std::int64_t> q_ary_generators;
  IntVector target;
  IntegerBasis<std::int64_t> reduced_basis;
  IntegerBasis<std::int64_t> embedded;
  IntegerBasis<std::int64_t> reduced_embedded;
};

/// Runs the full pipeline. The wall-clock window opens when the q-ary
/// generators are built and closes once the secret is obtained; quality
/// metrics are computed afterwards.
inline AttackResult attack(const AttackInstance& inst, const LllParams& params = {},
                           EmbeddingLattice* trace = nullptr) {
  AttackResult result;
  const std::size_t d = inst.degree();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto stop_clock = [&] { result.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count(); };
  IntegerBasis<std::int64_t> reduced_w;
  try {
    const auto generators = build_qary_generators(inst);
    const auto reduced = extract_independent(generators, params);
    const auto target = embedding_target(inst);
    const auto w = kannan_embed(reduced, target, inst.embedding_M);
    reduced_w = lll_reduce(w, params);
    if (trace) *trace = EmbeddingLattice{generators, target, reduced, w, reduced_w};
    result.recovered_error = extract_error(reduced_w, d, inst.embedding_M);
    if (!result.recovered_error) {
      stop_clock();
      result.failure = FailureKind::no_short_vector;
    } else {
      auto rec = recover_secret(inst.A, inst.b, result.recovered_error->e, inst.modulus());
      stop_clock();
      if (!rec) {
        result.failure = FailureKind::singular_matrix;
      } else {
        result.recovered_secret = rec->secret;
        result.success = rec->binary;
        if (!rec->binary) result.failure = FailureKind::wrong_key;
      }
    }
  } catch (const BudgetExhaustedError&) {
    stop_clock();
    result.failure = FailureKind::budget_exhausted;
    return result;
  }
  if (reduced_w.row_count() > 0) {
    result.shortest_norm = static_cast<double>(euclidean_norm(reduced_w[0]));
    result.root_hermite = root_hermite_factor(reduced_w);
  }
  return result;
}

}  // namespace rlwe_lab
