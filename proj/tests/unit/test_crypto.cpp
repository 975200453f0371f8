#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "rlwe_lab/crypto.hpp"

using namespace rlwe_lab;

namespace {

RingElement elem(const RingContext& ctx, std::vector<std::int64_t> c) { return RingElement(ctx, std::move(c)); }

KeyPair fresh_keys(std::size_t d, std::uint64_t seed) {
  const RingContext ctx(d, 1997);
  Rng rng = make_rng(seed);
  return keygen(ctx, rng, GaussianParams());
}

}  // namespace

TEST(Keygen, WellFormedAndDeterministic) {
  const auto kp = fresh_keys(23, 1);
  EXPECT_EQ(kp.pub.degree(), 23u);
  EXPECT_EQ(kp.pub.modulus(), 1997);
  for (auto c : kp.secret.coeffs()) EXPECT_TRUE(c == 0 || c == 1);
  const auto again = fresh_keys(23, 1);
  EXPECT_EQ(again.secret, kp.secret);
  EXPECT_EQ(again.pub.A, kp.pub.A);
  EXPECT_EQ(again.pub.b_prime, kp.pub.b_prime);
}

TEST(Encrypt, DegenerateRandomness) {
  const auto kp = fresh_keys(8, 2);
  const auto& ctx = kp.pub.ctx;
  const Plaintext m{{1, 0, 1, 1, 0, 0, 1, 0}};
  const RingElement zero(ctx);
  auto c = encrypt_with(kp.pub, m, EncryptionNoise{zero, zero, zero});
  EXPECT_EQ(c.c0, m.to_element(ctx));
  EXPECT_TRUE(c.c1.is_zero());

  c = encrypt_with(kp.pub, m, EncryptionNoise{RingElement::one(ctx), zero, zero});
  EXPECT_EQ(c.c0, 2 * RingElement(ctx, kp.pub.b) + m.to_element(ctx));
  EXPECT_EQ(c.c1, 2 * element_from_matrix(ctx, kp.pub.A));
}

TEST(Encrypt, DeterministicUnderFixedStream) {
  const auto kp = fresh_keys(16, 3);
  Rng r1 = make_rng(9), r2 = make_rng(9);
  const auto m = sample_plaintext(kp.pub.ctx, r1);
  (void)sample_plaintext(kp.pub.ctx, r2);
  const auto c1 = encrypt(kp.pub, m, r1, GaussianParams());
  const auto c2 = encrypt(kp.pub, m, r2, GaussianParams());
  EXPECT_EQ(c1.c0, c2.c0);
  EXPECT_EQ(c1.c1, c2.c1);
}

TEST(Decrypt, ZeroNoiseCiphertext) {
  const RingContext ctx(4, 1997);
  const Plaintext m{{1, 1, 0, 1}};
  const auto s = elem(ctx, {1, 0, 1, 1});
  EXPECT_EQ(decrypt(s, Ciphertext{m.to_element(ctx), RingElement(ctx)}), m);
}

TEST(Decrypt, NegativeOddDecodesAsOne) {
  const RingContext ctx(3, 17);
  const auto s = elem(ctx, {0, 0, 0});
  EXPECT_EQ(decrypt(s, Ciphertext{elem(ctx, {-3, -4, 7}), RingElement(ctx)}).bits, (std::vector<int>{1, 0, 1}));
}

TEST(Decrypt, WraparoundFlipsBit) {
  // With q odd, a noise term of q (even part crossing q/2) changes parity.
  const RingContext ctx(1, 17);
  const auto s = elem(ctx, {0});
  const Plaintext m{{0}};
  // m + 2*5 = 10 centers to -7: odd, so the bit flips.
  EXPECT_NE(decrypt(s, Ciphertext{elem(ctx, {10}), elem(ctx, {0})}), m);
}

TEST(Crypto, HomomorphicIdentityIsEven) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto kp = fresh_keys(16, seed);
    const auto& ctx = kp.pub.ctx;
    Rng rng = make_rng(seed + 1000);
    const auto m = sample_plaintext(ctx, rng);
    const auto noise = sample_encryption_noise(ctx, rng, GaussianParams());
    const auto c = encrypt_with(kp.pub, m, noise);
    // Recover e from the key pair: e = b - a s.
    const auto a = element_from_matrix(ctx, kp.pub.A);
    const auto e = RingElement(ctx, kp.pub.b) - a * kp.secret;
    const auto expected = m.to_element(ctx) + 2 * (e * noise.v + noise.e0 - kp.secret * noise.e1);
    EXPECT_EQ(c.c0 - kp.secret * c.c1, expected);
    // The noise term is small enough here that no centering happened.
    const auto diff = c.c0 - kp.secret * c.c1 - m.to_element(ctx);
    for (auto x : diff.coeffs()) EXPECT_EQ(x % 2, 0);
  }
}

TEST(Crypto, RoundTripAtSeveralDegrees) {
  for (std::size_t d : {8u, 16u, 32u}) {
    int ok = 0;
    for (std::uint64_t t = 0; t < 500; ++t) {
      const auto kp = fresh_keys(d, t);
      Rng rng = make_rng(t + 7919);
      const auto m = sample_plaintext(kp.pub.ctx, rng);
      ok += decrypt(kp.secret, encrypt(kp.pub, m, rng, GaussianParams())) == m;
    }
    EXPECT_GE(ok, 495) << "d=" << d;
  }
}

TEST(AttackSucceeds, Cases) {
  const auto kp = fresh_keys(16, 11);
  Rng rng = make_rng(12);
  const auto m = sample_plaintext(kp.pub.ctx, rng);
  const auto c = encrypt(kp.pub, m, rng, GaussianParams());

  AttackResult res;
  EXPECT_FALSE(attack_succeeds(kp, m, c, res));

  res.recovered_secret = kp.secret.coeff_vector();
  EXPECT_TRUE(attack_succeeds(kp, m, c, res));

  auto flipped = kp.secret.coeff_vector();
  flipped[3] = 1 - flipped[3];
  res.recovered_secret = flipped;
  EXPECT_FALSE(attack_succeeds(kp, m, c, res));
}

TEST(Plaintext, LengthChecked) {
  const RingContext ctx(4, 17);
  const Plaintext short_msg{{1, 0}};
  EXPECT_THROW(short_msg.to_element(ctx), std::invalid_argument);
}
