#pragma once

// Plain-text formats shared by the CLI and test fixtures.
//
//   ring element   one line of d signed integers (centered)
//   basis          "m n", then m lines of n integers
//   instance       "d q M seed", then A rows, A' rows, b, b'
//   keypair        instance followed by one secret line

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlwe_lab/attack.hpp"
#include "rlwe_lab/basis.hpp"
#include "rlwe_lab/crypto.hpp"
#include "rlwe_lab/ring.hpp"

namespace rlwe_lab {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t read_int(std::istream& in, const char* what) {
  std::int64_t v;
  if (!(in >> v)) throw FormatError(std::string("expected integer while reading ") + what);
  return v;
}

inline std::vector<std::int64_t> read_ints(std::istream& in, std::size_t n, const char* what) {
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = read_int(in, what);
  return v;
}

inline void write_ints(std::ostream& out, const std::vector<std::int64_t>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << '\n';
}

inline void write_matrix_rows(std::ostream& out, const IntegerBasis<std::int64_t>& m) {
  for (const auto& row : m.rows()) write_ints(out, row);
}

inline IntegerBasis<std::int64_t> read_matrix_rows(std::istream& in, std::size_t rows, std::size_t cols,
                                                   const char* what) {
  IntegerBasis<std::int64_t> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = read_int(in, what);
  return m;
}

}  // namespace detail

inline void write_ring_element(std::ostream& out, const RingElement& e) { detail::write_ints(out, e.coeff_vector()); }

inline RingElement read_ring_element(std::istream& in, const RingContext& ctx) {
  return RingElement(ctx, detail::read_ints(in, ctx.degree(), "ring element"));
}

/// Parses a single line; the number of tokens must equal the degree.
inline RingElement parse_ring_element(const std::string& line, const RingContext& ctx) {
  std::istringstream in(line);
  std::vector<std::int64_t> c;
  std::int64_t v;
  while (in >> v) c.push_back(v);
  if (!in.eof()) throw FormatError("ring element line contains a non-integer token");
  if (c.size() != ctx.degree())
    throw FormatError("ring element has " + std::to_string(c.size()) + " coefficients, expected " +
                      std::to_string(ctx.degree()));
  return RingElement(ctx, std::move(c));
}

inline void write_basis(std::ostream& out, const IntegerBasis<std::int64_t>& b) {
  out << b.row_count() << ' ' << b.dim() << '\n';
  detail::write_matrix_rows(out, b);
}

inline IntegerBasis<std::int64_t> read_basis(std::istream& in) {
  const auto m = detail::read_int(in, "basis header");
  const auto n = detail::read_int(in, "basis header");
  if (m < 0 || n < 1) throw FormatError("basis header must be 'm n' with m >= 0, n >= 1");
  return detail::read_matrix_rows(in, static_cast<std::size_t>(m), static_cast<std::size_t>(n), "basis");
}

inline void write_instance(std::ostream& out, const AttackInstance& inst) {
  out << inst.degree() << ' ' << inst.modulus() << ' ' << inst.embedding_M << ' ' << inst.seed << '\n';
  detail::write_matrix_rows(out, inst.A);
  detail::write_matrix_rows(out, inst.A_prime);
  detail::write_ints(out, inst.b);
  detail::write_ints(out, inst.b_prime);
}

inline AttackInstance read_instance(std::istream& in) {
  const auto d = detail::read_int(in, "instance header");
  const auto q = detail::read_int(in, "instance header");
  const auto M = detail::read_int(in, "instance header");
  std::uint64_t seed;
  if (!(in >> seed)) throw FormatError("expected seed in instance header");
  if (d < 1) throw FormatError("instance degree must be positive");
  RingContext ctx(static_cast<std::size_t>(d), q);
  const auto n = ctx.degree();
  AttackInstance inst{ctx, detail::read_matrix_rows(in, n, n, "A"), detail::read_matrix_rows(in, n, n, "A'"),
                      detail::read_ints(in, n, "b"), detail::read_ints(in, n, "b'"), M, seed};
  return inst;
}

inline void write_keypair(std::ostream& out, const KeyPair& kp) {
  write_instance(out, kp.pub);
  write_ring_element(out, kp.secret);
}

inline KeyPair read_keypair(std::istream& in) {
  AttackInstance pub = read_instance(in);
  RingElement s = read_ring_element(in, pub.ctx);
  return KeyPair{std::move(pub), std::move(s)};
}

inline void write_plaintext(std::ostream& out, const Plaintext& m) {
  for (std::size_t i = 0; i < m.bits.size(); ++i) out << (i ? " " : "") << m.bits[i];
  out << '\n';
}

inline Plaintext read_plaintext(std::istream& in, std::size_t degree) {
  Plaintext m;
  for (auto v : detail::read_ints(in, degree, "plaintext")) {
    if (v != 0 && v != 1) throw FormatError("plaintext bits must be 0 or 1");
    m.bits.push_back(static_cast<int>(v));
  }
  return m;
}

inline void write_ciphertext(std::ostream& out, const Ciphertext& c) {
  write_ring_element(out, c.c0);
  write_ring_element(out, c.c1);
}

inline Ciphertext read_ciphertext(std::istream& in, const RingContext& ctx) {
  RingElement c0 = read_ring_element(in, ctx);
  RingElement c1 = read_ring_element(in, ctx);
  return Ciphertext{std::move(c0), std::move(c1)};
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace rlwe_lab
