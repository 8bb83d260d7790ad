#include <gtest/gtest.h>

#include <functional>

#include "test_util.hpp"

using namespace stbc;

namespace {

// Direct enumeration of every nonzero integer vector in the box.
double brute_force_delta(const RMatrix& q, int bound) {
  const int n = static_cast<int>(q.rows());
  RVector a(n);
  double best = INFINITY;
  std::function<void(int)> rec = [&](int j) {
    if (j == n) {
      if (a.cwiseAbs().maxCoeff() > 0) best = std::min(best, (q * a).cwiseAbs().minCoeff());
      return;
    }
    for (int v = -bound; v <= bound; ++v) {
      a(j) = v;
      rec(j + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST(Rotation, ScalarCase) {
  const RotationMatrix q = build_rotation(1);
  EXPECT_EQ(q.entries, RMatrix::Ones(1, 1));
  EXPECT_DOUBLE_EQ(q.delta_min, 1.0);
  const auto cert = certify_rotation(RMatrix::Ones(1, 1), 5);
  EXPECT_TRUE(cert.pass);
  EXPECT_DOUBLE_EQ(cert.delta_min, 1.0);
}

TEST(Rotation, IdentityFails) {
  const auto cert = certify_rotation(RMatrix::Identity(2, 2), 1);
  EXPECT_FALSE(cert.pass);
  EXPECT_EQ(cert.delta_min, 0.0);
}

TEST(Rotation, SupportedSet) {
  for (int l : {1, 2, 3, 4, 5, 6, 8}) EXPECT_TRUE(rotation_supported(l)) << l;
  EXPECT_FALSE(rotation_supported(7));
  EXPECT_FALSE(rotation_supported(0));
  EXPECT_THROW(build_rotation(7), InfeasibleError);
}

class RotationDim : public ::testing::TestWithParam<int> {};

TEST_P(RotationDim, OrthogonalUnimodularAndCertified) {
  const int l = GetParam();
  const RotationMatrix q = build_rotation(l);
  ASSERT_EQ(q.entries.rows(), l);
  EXPECT_EQ(q.dimension, l);
  EXPECT_GE(q.certified_bound, 3);
  EXPECT_LE((q.entries * q.entries.transpose() - RMatrix::Identity(l, l)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(std::abs(q.entries.determinant()), 1.0, 1e-10);
  EXPECT_GT(q.delta_min, kDiversityThreshold);
  // The incremental scan agrees with direct enumeration.
  if (l <= 6) {
    EXPECT_NEAR(brute_force_delta(q.entries, 3), q.delta_min, 1e-12);
  }
  // Certification is deterministic.
  EXPECT_EQ(certify_rotation(q.entries, 3).delta_min, q.delta_min);
}

INSTANTIATE_TEST_SUITE_P(All, RotationDim, ::testing::Values(1, 2, 3, 4, 5, 6, 8));

TEST(Rotation, BruteForceMatchesOnRandomMatrices) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RMatrix m = stbc::testing::random_vector(9, rng).reshaped(3, 3);
    EXPECT_NEAR(certify_rotation(m, 2).delta_min, brute_force_delta(m, 2), 1e-12);
  }
}

TEST(Rotation, RejectsBadArguments) {
  EXPECT_THROW(certify_rotation(RMatrix::Identity(2, 2), 0), std::invalid_argument);
  EXPECT_THROW(certify_rotation(RMatrix::Identity(2, 3), 1), DimensionError);
}
