#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace rlwe_lab {

/// Row-major integer matrix whose rows are lattice generators.
///
/// `Int` is either `std::int64_t` (the attack pipeline; arithmetic that could
/// leave the 64-bit range is overflow-checked) or `mpz_class` (arbitrary
/// precision). All rows share the same length `dim()`.
template <class Int = std::int64_t>
class IntegerBasis {
 public:
  using value_type = Int;
  using Row = std::vector<Int>;

  IntegerBasis() = default;

  IntegerBasis(std::size_t rows, std::size_t dim) : rows_(rows, Row(dim, Int(0))), dim_(dim) {}

  explicit IntegerBasis(std::vector<Row> rows) : rows_(std::move(rows)) {
    dim_ = rows_.empty() ? 0 : rows_.front().size();
    for (const auto& r : rows_)
      if (r.size() != dim_) throw std::invalid_argument("IntegerBasis: ragged rows");
  }

  IntegerBasis(std::initializer_list<std::initializer_list<Int>> rows) {
    for (const auto& r : rows) rows_.emplace_back(r);
    dim_ = rows_.empty() ? 0 : rows_.front().size();
    for (const auto& r : rows_)
      if (r.size() != dim_) throw std::invalid_argument("IntegerBasis: ragged rows");
  }

  /// Empty basis living in Z^dim.
  static IntegerBasis empty(std::size_t dim) {
    IntegerBasis b;
    b.dim_ = dim;
    return b;
  }

  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  bool is_square() const noexcept { return rows_.size() == dim_; }

  Row& operator[](std::size_t i) { return rows_[i]; }
  const Row& operator[](std::size_t i) const { return rows_[i]; }
  Int& operator()(std::size_t i, std::size_t j) { return rows_[i][j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }

  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::vector<Row>& rows() noexcept { return rows_; }

  void push_back(Row r) {
    if (rows_.empty() && dim_ == 0) dim_ = r.size();
    if (r.size() != dim_) throw std::invalid_argument("IntegerBasis: row length mismatch");
    rows_.push_back(std::move(r));
  }

  friend bool operator==(const IntegerBasis& a, const IntegerBasis& b) {
    return a.dim_ == b.dim_ && a.rows_ == b.rows_;
  }

 private:
  std::vector<Row> rows_;
  std::size_t dim_ = 0;
};

template <class Int>
IntegerBasis<Int> identity_basis(std::size_t n) {
  IntegerBasis<Int> b(n, n);
  for (std::size_t i = 0; i < n; ++i) b(i, i) = Int(1);
  return b;
}

inline mpz_class to_mpz(std::int64_t v) {
  mpz_class z;
  mpz_set_si(z.get_mpz_t(), static_cast<long>(v));
  return z;
}
inline const mpz_class& to_mpz(const mpz_class& v) { return v; }

template <class Int>
IntegerBasis<mpz_class> to_mpz_basis(const IntegerBasis<Int>& b) {
  IntegerBasis<mpz_class> out = IntegerBasis<mpz_class>::empty(b.dim());
  for (const auto& row : b.rows()) {
    std::vector<mpz_class> r;
    r.reserve(row.size());
    for (const auto& v : row) r.push_back(to_mpz(v));
    out.push_back(std::move(r));
  }
  return out;
}

/// Converts back from arbitrary precision; throws std::overflow_error when an
/// entry does not fit in `Int`.
template <class Int>
IntegerBasis<Int> from_mpz_basis(const IntegerBasis<mpz_class>& b) {
  if constexpr (std::is_same_v<Int, mpz_class>) {
    return b;
  } else {
    IntegerBasis<Int> out = IntegerBasis<Int>::empty(b.dim());
    for (const auto& row : b.rows()) {
      std::vector<Int> r;
      r.reserve(row.size());
      for (const auto& v : row) {
        if (!v.fits_slong_p()) throw std::overflow_error("basis entry exceeds 64-bit range");
        r.push_back(static_cast<Int>(v.get_si()));
      }
      out.push_back(std::move(r));
    }
    return out;
  }
}

}  // namespace rlwe_lab
