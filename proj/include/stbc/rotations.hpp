#pragma once

// Full-diversity rotations of Z^lambda: real orthogonal Q such that Q a has
// no zero coordinate for any nonzero integer vector a.
//
// Two algebraic families are used, both orthogonal by construction:
//   * lambda = 2^e: the DCT-IV matrix sqrt(2/l) cos((2i-1)(2j-1) pi / 4l),
//     a twisted ideal lattice over the maximal real subfield of the
//     4l-th cyclotomic field;
//   * 2 lambda + 1 = p prime: diag(sqrt(2 - theta_i)) M L / sqrt(p), with
//     theta_i = 2cos(2 pi i / p), M_ij = 2cos(2 pi i j / p) the embedding of
//     the basis zeta^j + zeta^-j, and L the unimodular lower-triangular
//     all-ones matrix.
// Every coordinate of Q a is an embedding of a nonzero algebraic integer
// times a nonzero twist, hence nonzero. certify_rotation re-checks this
// numerically over a finite box.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stbc/types.hpp"

namespace stbc {

struct RotationCertificate {
  bool pass = false;
  double delta_min = 0.0;
};

inline constexpr double kDiversityThreshold = 1e-9;
inline constexpr int kDefaultCertifyBound = 3;

/// Scans every nonzero a in {-bound..bound}^lambda and returns the smallest
/// coordinate magnitude of Q a seen.
inline RotationCertificate certify_rotation(const RMatrix& q, int bound) {
  if (bound < 1) throw std::invalid_argument("certify_rotation: bound must be >= 1");
  if (q.rows() != q.cols() || q.rows() == 0) throw DimensionError("certify_rotation: Q must be square");
  const Eigen::Index n = q.rows();
  std::vector<int> a(static_cast<size_t>(n), -bound);
  RVector qa = RVector::Zero(n);
  // Running Q a, updated incrementally as a odometer advances.
  for (Eigen::Index j = 0; j < n; ++j) qa += -bound * q.col(j);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    bool nonzero = false;
    for (int v : a) nonzero |= v != 0;
    if (nonzero) best = std::min(best, qa.cwiseAbs().minCoeff());
    Eigen::Index j = 0;
    for (; j < n; ++j) {
      auto& d = a[static_cast<size_t>(j)];
      if (d < bound) {
        ++d;
        qa += q.col(j);
        break;
      }
      qa -= 2 * bound * q.col(j);
      d = -bound;
    }
    if (j == n) break;
    // Limit drift from the incremental update.
    if (a[0] == -bound) {
      RVector av(n);
      for (Eigen::Index i = 0; i < n; ++i) av(i) = a[static_cast<size_t>(i)];
      qa = q * av;
    }
  }
  return {best > kDiversityThreshold, best};
}

struct RotationMatrix {
  int dimension = 0;
  RMatrix entries;
  std::string construction_tag;
  int certified_bound = 0;
  double delta_min = 0.0;
};

inline bool rotation_supported(int lambda) {
  if (lambda < 1) return false;
  if ((lambda & (lambda - 1)) == 0) return true;
  const int p = 2 * lambda + 1;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace detail {

inline RMatrix dct4_rotation(int n) {
  RMatrix q(n, n);
  const double scale = std::sqrt(2.0 / n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      q(i - 1, j - 1) = scale * std::cos((2 * i - 1) * (2 * j - 1) * std::numbers::pi / (4.0 * n));
  return q;
}

inline RMatrix prime_cyclotomic_rotation(int n) {
  const int p = 2 * n + 1;
  RMatrix m(n, n);
  RVector twist(n);
  for (int i = 1; i <= n; ++i) {
    twist(i - 1) = std::sqrt(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * i / p));
    for (int j = 1; j <= n; ++j) m(i - 1, j - 1) = 2.0 * std::cos(2.0 * std::numbers::pi * i * j / p);
  }
  const RMatrix lower = RMatrix::Ones(n, n).triangularView<Eigen::Lower>();
  return twist.asDiagonal() * m * lower / std::sqrt(static_cast<double>(p));
}

}  // namespace detail

/// Builds and certifies a full-diversity rotation. Supported dimensions are
/// powers of two and lambda with 2 lambda + 1 prime (1..6 and 8 among the
/// small ones; 7 is not reachable).
inline RotationMatrix build_rotation(int lambda, int bound = kDefaultCertifyBound) {
  if (!rotation_supported(lambda))
    throw InfeasibleError("build_rotation: lambda=" + std::to_string(lambda) +
                          " unsupported; need a power of two or 2*lambda+1 prime "
                          "(e.g. 1, 2, 3, 4, 5, 6, 8)");
  RotationMatrix r;
  r.dimension = lambda;
  if (lambda == 1) {
    r.entries = RMatrix::Ones(1, 1);
    r.construction_tag = "trivial";
  } else if ((lambda & (lambda - 1)) == 0) {
    r.entries = detail::dct4_rotation(lambda);
    r.construction_tag = "cyclotomic-4l-real-subfield";
  } else {
    r.entries = detail::prime_cyclotomic_rotation(lambda);
    r.construction_tag = "cyclotomic-p-real-subfield";
  }
  const auto cert = certify_rotation(r.entries, bound);
  if (!cert.pass)
    throw std::logic_error("build_rotation: certificate failed for lambda=" + std::to_string(lambda));
  r.certified_bound = bound;
  r.delta_min = cert.delta_min;
  return r;
}

/// Identity "rotation": not full diversity for lambda >= 2. Used to build the
/// deliberately broken variants.
inline RotationMatrix identity_rotation(int lambda) {
  RotationMatrix r;
  r.dimension = lambda;
  r.entries = RMatrix::Identity(lambda, lambda);
  r.construction_tag = "identity";
  const auto cert = certify_rotation(r.entries, 1);
  r.certified_bound = cert.pass ? 1 : 0;
  r.delta_min = cert.delta_min;
  return r;
}

}  // namespace stbc
