#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace stbc;
using namespace stbc::testing;

TEST(Pam, FourQamLevels) {
  const PamAlphabet pam(4);
  ASSERT_EQ(pam.size(), 2);
  EXPECT_EQ(pam.bit_width(), 1);
  EXPECT_NEAR(pam.level(0), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(pam.level(1), 1 / std::sqrt(2.0), 1e-15);
  const Bits zero{0}, one{1};
  EXPECT_NEAR(modulate(zero, pam)(0), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(modulate(one, pam)(0), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Pam, SixteenQamLevelsAndGrayOrder) {
  const PamAlphabet pam(16);
  ASSERT_EQ(pam.size(), 4);
  const double s = 1 / std::sqrt(10.0);
  const double expected[] = {-3 * s, -s, s, 3 * s};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(pam.level(i), expected[i], 1e-15);
  // Labels along increasing level: 00, 01, 11, 10.
  const Bits labels[] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(modulate(labels[i], pam)(0), expected[i], 1e-15);
}

TEST(Pam, EnergyAndSymmetry) {
  for (int m : {4, 16, 64, 256}) {
    const PamAlphabet pam(m);
    double mean = 0, energy = 0;
    for (double v : pam.levels()) {
      mean += v;
      energy += v * v;
    }
    EXPECT_NEAR(mean / pam.size(), 0.0, 1e-12);
    EXPECT_NEAR(energy / pam.size(), 0.5, 1e-12);
    for (int i = 1; i < pam.size(); ++i) EXPECT_GT(pam.level(i), pam.level(i - 1));
  }
}

TEST(Pam, RejectsNonSquare) {
  for (int m : {0, 1, 2, 8, 32, 12}) EXPECT_THROW(PamAlphabet{m}, InfeasibleError) << m;
}

TEST(Pam, NearestIndex) {
  const PamAlphabet pam(16);
  EXPECT_EQ(pam.nearest_index(-100), 0);
  EXPECT_EQ(pam.nearest_index(100), 3);
  EXPECT_EQ(pam.nearest_index(std::nan("")), 0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(pam.nearest_index(pam.level(i)), i);
  EXPECT_EQ(pam.nearest_index(1e-9), 2);
  EXPECT_EQ(pam.nearest_index(-1e-9), 1);
}

TEST(Pam, RoundTrip) {
  std::mt19937_64 rng(31);
  for (int m : {4, 16, 64}) {
    const PamAlphabet pam(m);
    Bits bits(static_cast<size_t>(60 * pam.bit_width()));
    for (auto& b : bits) b = static_cast<uint8_t>(rng() & 1);
    EXPECT_EQ(demap(modulate(bits, pam), pam), bits);
  }
  EXPECT_THROW(modulate(Bits{1, 0, 1}, PamAlphabet(16)), DimensionError);
}

TEST(Pam, ComplexSymbolsHaveUnitEnergy) {
  for (int m : {4, 16, 64}) {
    const PamAlphabet pam(m);
    double e = 0;
    for (double a : pam.levels())
      for (double b : pam.levels()) e += a * a + b * b;
    EXPECT_NEAR(e / (pam.size() * pam.size()), 1.0, 1e-12);
  }
}

TEST(Link, ChannelEnergyAndSnr) {
  std::mt19937_64 rng(32);
  double acc = 0;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) acc += sample_link(3, 2, 1, 0.0, rng).h.squaredNorm();
  EXPECT_NEAR(acc / samples, 6.0, 0.02 * 6.0);
  EXPECT_DOUBLE_EQ(sample_link(1, 1, 1, 0.0, rng).snr, 1.0);
  EXPECT_NEAR(sample_link(1, 1, 1, 20.0, rng).snr, 100.0, 1e-12);
  EXPECT_THROW(sample_link(0, 1, 1, 0.0, rng), DimensionError);
}

TEST(Link, Deterministic) {
  std::mt19937_64 a(99), b(99);
  EXPECT_EQ(sample_link(4, 2, 6, 10, a).h, sample_link(4, 2, 6, 10, b).h);
}

TEST(Transmit, ModelIdentities) {
  std::mt19937_64 rng(33);
  LinkInstance link = sample_link(2, 1, 2, 0.0, rng);
  const CMatrix x = complex_gaussian(2, 2, rng);
  link.snr = 0.0;
  EXPECT_EQ(transmit(x, link), link.w);

  link.snr = 4.0;
  link.w.setZero();
  link.h << 1, 0;
  EXPECT_LE((transmit(x, link) - 2.0 * x.col(0)).norm(), 1e-15);
  EXPECT_THROW(transmit(CMatrix::Zero(3, 2), link), DimensionError);
}

TEST(Transmit, MatchesEquivalentChannel) {
  std::mt19937_64 rng(34);
  const Code code = build_section4(4, 2);
  const Design d = normalize_power(code.design, kRealSymbolEnergy);
  const PamAlphabet pam(16);
  for (int t = 0; t < 50; ++t) {
    const RVector x = random_pam_vector(d.num_symbols(), pam, rng);
    const LinkInstance link = sample_link(4, 2, d.delay(), 7.0, rng);
    const RVector lhs = vec_tilde(transmit(d.assemble(x), link));
    const RVector rhs = std::sqrt(link.snr) * d.equivalent_channel(link.h) * x + vec_tilde(link.w);
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * lhs.norm());
  }
}

TEST(Transmit, LinearInCodeword) {
  std::mt19937_64 rng(35);
  LinkInstance link = sample_link(3, 2, 4, 5.0, rng);
  link.w.setZero();
  const CMatrix a = complex_gaussian(4, 3, rng), b = complex_gaussian(4, 3, rng);
  EXPECT_LE((transmit(2.0 * a + b, link) - 2.0 * transmit(a, link) - transmit(b, link)).norm(), 1e-12);
}

TEST(Transmit, ReceivedSnrMatchesPowerConstraint) {
  std::mt19937_64 rng(36);
  const Design d = normalize_power(build_section3(3, 2, 4).design, kRealSymbolEnergy);
  const PamAlphabet pam(4);
  double signal = 0, noise = 0;
  const double snr_db = 10.0;
  for (int t = 0; t < 20000; ++t) {
    const LinkInstance link = sample_link(3, 1, d.delay(), snr_db, rng);
    const CMatrix x = d.assemble(random_pam_vector(d.num_symbols(), pam, rng));
    signal += (std::sqrt(link.snr) * x * link.h).squaredNorm();
    noise += link.w.squaredNorm();
  }
  // Each receive antenna sees SNR times unit average transmit power per slot.
  EXPECT_NEAR(signal / noise, db_to_linear(snr_db), 0.03 * db_to_linear(snr_db));
}

TEST(Seeds, TrialSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 200; ++b) seen.insert(trial_seed(1, a, b));
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_NE(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
}
