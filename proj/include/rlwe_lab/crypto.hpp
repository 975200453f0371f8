#pragma once

// Toy RLWE public-key encryption, used only as the success oracle for the
// attack. The sample (a, b = a s + e) is used doubled, (2a, 2b) = (a*, a* s + 2e):
//   c0 = 2b v + 2 e0 + m,   c1 = 2a v + 2 e1,
//   c0 - s c1 = m + 2 (e v + e0 - s e1)  (mod q),
// so each message bit is the parity of the centered decryption coefficient.
// With the undoubled key the e v term would carry odd parity into every bit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "rlwe_lab/attack.hpp"
#include "rlwe_lab/ring.hpp"
#include "rlwe_lab/rng.hpp"

namespace rlwe_lab {

struct KeyPair {
  AttackInstance pub;  // (A, b) and (A', b'); encryption uses the first sample
  RingElement secret;
};

struct Plaintext {
  std::vector<int> bits;

  RingElement to_element(const RingContext& ctx) const {
    if (bits.size() != ctx.degree()) throw std::invalid_argument("plaintext length does not match ring degree");
    std::vector<std::int64_t> c(bits.begin(), bits.end());
    return RingElement(ctx, std::move(c));
  }

  friend bool operator==(const Plaintext&, const Plaintext&) = default;
};

struct Ciphertext {
  RingElement c0;
  RingElement c1;
};

/// Ephemeral randomness of one encryption.
struct EncryptionNoise {
  RingElement v;
  RingElement e0;
  RingElement e1;
};

inline KeyPair keygen(const RingContext& ctx, Rng& rng, const GaussianParams& gauss, std::int64_t M = 1) {
  RingElement s = sample_secret(ctx, rng);
  auto [inst, planted] = build_instance(ctx, s, rng, gauss, M);
  return KeyPair{std::move(inst), std::move(s)};
}

inline Plaintext sample_plaintext(const RingContext& ctx, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  Plaintext m;
  m.bits.resize(ctx.degree());
  for (auto& b : m.bits) b = bit(rng);
  return m;
}

/// v has 0/1 coefficients; e0 and e1 are rounded Gaussians.
inline EncryptionNoise sample_encryption_noise(const RingContext& ctx, Rng& rng, const GaussianParams& gauss) {
  RingElement v = sample_secret(ctx, rng);
  RingElement e0 = sample_error(ctx, rng, gauss);
  RingElement e1 = sample_error(ctx, rng, gauss);
  return EncryptionNoise{std::move(v), std::move(e0), std::move(e1)};
}

inline Ciphertext encrypt_with(const AttackInstance& pk, const Plaintext& m, const EncryptionNoise& noise) {
  const RingContext& ctx = pk.ctx;
  const RingElement a = element_from_matrix(ctx, pk.A);
  const RingElement b(ctx, pk.b);
  const RingElement msg = m.to_element(ctx);
  return Ciphertext{2 * (b * noise.v + noise.e0) + msg, 2 * (a * noise.v + noise.e1)};
}

inline Ciphertext encrypt(const AttackInstance& pk, const Plaintext& m, Rng& rng, const GaussianParams& gauss) {
  return encrypt_with(pk, m, sample_encryption_noise(pk.ctx, rng, gauss));
}

/// Parity of each centered coefficient of c0 - s c1; negative odd values
/// decode as 1.
inline Plaintext decrypt(const RingElement& secret, const Ciphertext& c) {
  const RingElement w = c.c0 - secret * c.c1;
  Plaintext m;
  m.bits.reserve(w.degree());
  for (auto x : w.coeffs()) m.bits.push_back(static_cast<int>(((x % 2) + 2) % 2));
  return m;
}

/// True iff decrypting `c` with the recovered key reproduces `m` exactly.
inline bool attack_succeeds(const KeyPair& kp, const Plaintext& m, const Ciphertext& c, const AttackResult& result) {
  if (!result.recovered_secret) return false;
  const RingElement s(kp.pub.ctx, *result.recovered_secret);
  return decrypt(s, c) == m;
}

}  // namespace rlwe_lab
