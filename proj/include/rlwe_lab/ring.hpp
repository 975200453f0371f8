#pragma once

// Arithmetic in Z_q[x]/(x^d + 1) with centered coefficient representatives,
// plus the samplers that define an RLWE instance.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlwe_lab/basis.hpp"
#include "rlwe_lab/rng.hpp"

namespace rlwe_lab {

inline bool is_prime(std::int64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t f = 3; f <= n / f; f += 2)
    if (n % f == 0) return false;
  return true;
}

/// Maps any integer to its representative in (-q/2, q/2].
constexpr std::int64_t center_mod(std::int64_t v, std::int64_t q) noexcept {
  std::int64_t r = v % q;
  if (r < 0) r += q;
  if (2 * r > q) r -= q;
  return r;
}

/// Representative in [0, q).
constexpr std::int64_t positive_mod(std::int64_t v, std::int64_t q) noexcept {
  std::int64_t r = v % q;
  return r < 0 ? r + q : r;
}

class RingContext {
 public:
  /// Throws std::invalid_argument unless degree >= 1 and q is a prime in
  /// [3, 2^31).
  RingContext(std::size_t degree, std::int64_t q) : degree_(degree), q_(q) {
    if (degree == 0) throw std::invalid_argument("ring degree must be at least 1");
    if (q >= (std::int64_t{1} << 31)) throw std::invalid_argument("ring modulus must be below 2^31");
    if (q < 3 || !is_prime(q))
      throw std::invalid_argument("ring modulus " + std::to_string(q) + " is not an odd prime");
  }

  std::size_t degree() const noexcept { return degree_; }
  std::int64_t modulus() const noexcept { return q_; }
  std::int64_t center(std::int64_t v) const noexcept { return center_mod(v, q_); }

  friend bool operator==(const RingContext&, const RingContext&) = default;

 private:
  std::size_t degree_;
  std::int64_t q_;
};

inline RingContext ring_new(std::size_t degree, std::int64_t q) { return RingContext(degree, q); }

class RingElement {
 public:
  explicit RingElement(const RingContext& ctx) : ctx_(ctx), coeffs_(ctx.degree(), 0) {}

  /// Coefficients are reduced into the centered range on construction.
  RingElement(const RingContext& ctx, std::vector<std::int64_t> coeffs)
      : ctx_(ctx), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != ctx_.degree())
      throw std::invalid_argument("coefficient count does not match ring degree");
    for (auto& c : coeffs_) c = ctx_.center(c);
  }

  static RingElement one(const RingContext& ctx) {
    RingElement e(ctx);
    e.coeffs_[0] = 1;
    return e;
  }

  const RingContext& context() const noexcept { return ctx_; }
  std::size_t degree() const noexcept { return coeffs_.size(); }
  std::span<const std::int64_t> coeffs() const noexcept { return coeffs_; }
  const std::vector<std::int64_t>& coeff_vector() const noexcept { return coeffs_; }
  std::int64_t operator[](std::size_t i) const { return coeffs_[i]; }

  bool is_zero() const noexcept {
    for (auto c : coeffs_)
      if (c != 0) return false;
    return true;
  }

  friend bool operator==(const RingElement&, const RingElement&) = default;

  friend RingElement operator+(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    RingElement r(a.ctx_);
    for (std::size_t i = 0; i < a.degree(); ++i) r.coeffs_[i] = a.ctx_.center(a.coeffs_[i] + b.coeffs_[i]);
    return r;
  }

  friend RingElement operator-(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    RingElement r(a.ctx_);
    for (std::size_t i = 0; i < a.degree(); ++i) r.coeffs_[i] = a.ctx_.center(a.coeffs_[i] - b.coeffs_[i]);
    return r;
  }

  friend RingElement operator-(const RingElement& a) {
    RingElement r(a.ctx_);
    for (std::size_t i = 0; i < a.degree(); ++i) r.coeffs_[i] = a.ctx_.center(-a.coeffs_[i]);
    return r;
  }

  /// Schoolbook negacyclic product: x^d wraps to -1.
  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    check_same(a, b);
    const std::size_t d = a.degree();
    const std::int64_t q = a.ctx_.modulus();
    std::vector<std::int64_t> acc(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        // |a_i b_j| <= q^2/4, so one product never overflows; reduce per step.
        const std::int64_t p = a.coeffs_[i] * b.coeffs_[j];
        const std::size_t k = i + j;
        if (k < d)
          acc[k] = (acc[k] + p) % q;
        else
          acc[k - d] = (acc[k - d] - p) % q;
      }
    }
    return RingElement(a.ctx_, std::move(acc));
  }

  /// Multiplies by a plain integer (e.g. the factor 2 on encryption noise).
  friend RingElement operator*(std::int64_t k, const RingElement& a) {
    RingElement r(a.ctx_);
    const std::int64_t q = a.ctx_.modulus();
    const std::int64_t kk = center_mod(k, q);
    for (std::size_t i = 0; i < a.degree(); ++i) r.coeffs_[i] = a.ctx_.center((kk * a.coeffs_[i]) % q);
    return r;
  }

 private:
  static void check_same(const RingElement& a, const RingElement& b) {
    if (!(a.ctx_ == b.ctx_)) throw std::invalid_argument("ring elements belong to different contexts");
  }

  RingContext ctx_;
  std::vector<std::int64_t> coeffs_;
};

inline RingElement add(const RingElement& a, const RingElement& b) { return a + b; }
inline RingElement sub(const RingElement& a, const RingElement& b) { return a - b; }
inline RingElement neg(const RingElement& a) { return -a; }
inline RingElement mul(const RingElement& a, const RingElement& b) { return a * b; }

/// Matrix A with A(i, j) = coefficient of x^i in a * x^j, so that A * s equals
/// the coefficient vector of a * s. Column j is a rotated by j with the
/// wrapped part negated.
inline IntegerBasis<std::int64_t> multiplication_matrix(const RingElement& a) {
  const std::size_t d = a.degree();
  const auto& ctx = a.context();
  IntegerBasis<std::int64_t> m(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i)
      m(i, j) = i >= j ? a[i - j] : ctx.center(-a[i + d - j]);
  return m;
}

/// The ring element whose multiplication matrix is `m` (its first column).
inline RingElement element_from_matrix(const RingContext& ctx, const IntegerBasis<std::int64_t>& m) {
  if (m.row_count() != ctx.degree() || m.dim() != ctx.degree())
    throw std::invalid_argument("multiplication matrix has wrong shape");
  std::vector<std::int64_t> c(ctx.degree());
  for (std::size_t i = 0; i < ctx.degree(); ++i) c[i] = m(i, 0);
  return RingElement(ctx, std::move(c));
}

/// Matrix-vector product reduced and centered mod q.
inline std::vector<std::int64_t> mat_vec_mod(const IntegerBasis<std::int64_t>& m,
                                             std::span<const std::int64_t> v, std::int64_t q) {
  if (m.dim() != v.size()) throw std::invalid_argument("matrix/vector size mismatch");
  std::vector<std::int64_t> out(m.row_count());
  for (std::size_t i = 0; i < m.row_count(); ++i) {
    std::int64_t acc = 0;
    for (std::size_t j = 0; j < v.size(); ++j) acc = (acc + center_mod(m(i, j), q) * center_mod(v[j], q)) % q;
    out[i] = center_mod(acc, q);
  }
  return out;
}

/// The default error width 4 / sqrt(2 pi).
inline const double kDefaultSigma = 4.0 / std::sqrt(2.0 * 3.14159265358979323846);

struct GaussianParams {
  /// Standard deviation of the continuous Gaussian before rounding. Zero is
  /// accepted and means "no noise".
  double sigma;

  explicit GaussianParams(double s = kDefaultSigma) : sigma(s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("sigma must be finite and non-negative");
  }
};

/// Coefficients uniform over (-q/2, q/2].
inline RingElement sample_uniform(const RingContext& ctx, Rng& rng) {
  const std::int64_t half = ctx.modulus() / 2;  // q odd: range is [-half, half]
  std::uniform_int_distribution<std::int64_t> dist(-half, half);
  std::vector<std::int64_t> c(ctx.degree());
  for (auto& v : c) v = dist(rng);
  return RingElement(ctx, std::move(c));
}

/// Coefficients uniform over {0, 1}.
inline RingElement sample_secret(const RingContext& ctx, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<std::int64_t> c(ctx.degree());
  for (auto& v : c) v = bit(rng);
  return RingElement(ctx, std::move(c));
}

/// Coefficients round(x) with x ~ N(0, sigma^2).
inline RingElement sample_error(const RingContext& ctx, Rng& rng, const GaussianParams& params) {
  std::vector<std::int64_t> c(ctx.degree(), 0);
  if (params.sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, params.sigma);
    for (auto& v : c) v = static_cast<std::int64_t>(std::llround(gauss(rng)));
  }
  return RingElement(ctx, std::move(c));
}

}  // namespace rlwe_lab
