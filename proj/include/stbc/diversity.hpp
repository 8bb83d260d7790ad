#pragma once

// Full-diversity rank criteria for PIC and PIC-SIC group decoding.
//
// For every group k, every nonzero difference a_k of the group's signal set
// and every real interference vector u, the matrix
//     X_{I_k}(a_k) + X_J(u)
// must have rank N, where J = I_k^c for PIC and J = (groups after k) for
// PIC-SIC. The quantifier over real u cannot be settled by sampling, so this
// header offers two tools:
//   * falsifiers that search for a rank-deficient witness (a witness is a
//     proof of failure, the absence of one proves nothing);
//   * structural certificates for the two code families that check the
//     properties their full-diversity argument consumes: the layer/block
//     placement and a certified full-diversity rotation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stbc/channel.hpp"
#include "stbc/constructions.hpp"
#include "stbc/lindesign.hpp"
#include "stbc/rotations.hpp"
#include "stbc/types.hpp"

namespace stbc {

enum class CriterionMode { kPic, kPicSic };

inline std::string to_string(CriterionMode m) { return m == CriterionMode::kPic ? "pic" : "picsic"; }
inline CriterionMode criterion_from_string(const std::string& s) {
  if (s == "pic") return CriterionMode::kPic;
  if (s == "picsic") return CriterionMode::kPicSic;
  throw std::invalid_argument("unknown criterion mode '" + s + "' (expected pic or picsic)");
}

/// Number of singular values above rel_tol * sigma_max; 0 for the zero matrix.
inline int numerical_rank(const CMatrix& m, double rel_tol = kRankTolerance) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

struct RankWitness {
  CriterionMode mode = CriterionMode::kPic;
  int group = 0;                   // 0-based group index k
  std::vector<int> group_symbols;  // I_k, increasing
  std::vector<int> difference;     // a_k, integer PAM differences (level spacing 2)
  std::vector<int> interference_symbols;  // J, increasing
  std::vector<double> interference;       // u
  int rank = 0;
  double smallest_singular_value = 0.0;
};

struct FalsifyBudget {
  int pam_levels = 4;               // sqrt(M)
  int trials_per_group = 1000;      // random u tried for every difference vector
  std::uint64_t seed = 1;
  std::int64_t enumeration_cap = 10000;  // exhaustive over differences up to this many
};

struct FalsifyReport {
  std::optional<RankWitness> witness;
  std::int64_t matrices_checked = 0;
  bool exhaustive_differences = true;
};

namespace detail {

/// Difference values of integer-scaled L-PAM in search order 0, 2, -2, 4, -4, ...
inline std::vector<int> pam_difference_values(int levels) {
  std::vector<int> v{0};
  for (int j = 1; j < levels; ++j) {
    v.push_back(2 * j);
    v.push_back(-2 * j);
  }
  return v;
}

inline std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace detail

/// Searches for a RankWitness. Differences of each group are enumerated in
/// order (first coordinate fastest, small magnitudes first) when there are at
/// most `enumeration_cap` of them, otherwise sampled. Every difference is
/// paired with u = 0, u = +-e_j for each interference coordinate, and
/// `trials_per_group` standard normal u. The first witness in (group,
/// difference, probe) order is returned.
inline FalsifyReport falsify(const Design& d, const GroupingScheme& s, CriterionMode mode, const FalsifyBudget& budget) {
  if (budget.pam_levels < 2) throw std::invalid_argument("falsify: pam_levels must be >= 2");
  if (budget.trials_per_group < 1) throw std::invalid_argument("falsify: trials_per_group must be >= 1");
  if (s.num_symbols() != d.num_symbols()) throw DimensionError("falsify: grouping and design disagree on K");
  const int n = d.antennas();
  const Eigen::Index t = d.delay();
  const auto values = detail::pam_difference_values(budget.pam_levels);
  const int base = static_cast<int>(values.size());

  FalsifyReport report;
  for (int k = 0; k < s.num_groups(); ++k) {
    const std::vector<int> grp = detail::sorted(s.group(k));
    const std::vector<int> inter = mode == CriterionMode::kPic ? s.complement(k) : s.later(k);
    const Eigen::Index ni = static_cast<Eigen::Index>(inter.size());
    // Real-stacked interference weights: vec_tilde(X_J(u)) = w_inter * u.
    RMatrix w_inter(2 * t * n, ni);
    for (Eigen::Index j = 0; j < ni; ++j) w_inter.col(j) = vec_tilde(d.weight(inter[static_cast<size_t>(j)]));

    std::mt19937_64 rng(trial_seed(budget.seed, static_cast<std::uint64_t>(k), 0x9b1d));
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> pick(0, base - 1);

    double total = 1.0;
    for (size_t j = 0; j < grp.size(); ++j) total *= base;
    const bool exhaustive = total - 1.0 <= static_cast<double>(budget.enumeration_cap);
    report.exhaustive_differences = report.exhaustive_differences && exhaustive;
    const std::int64_t n_diff = exhaustive ? static_cast<std::int64_t>(total) - 1 : budget.enumeration_cap;

    std::vector<int> digit(grp.size(), 0);
    RVector u(ni);
    for (std::int64_t di = 0; di < n_diff; ++di) {
      if (exhaustive) {
        for (size_t j = 0; j < digit.size(); ++j) {
          if (++digit[j] < base) break;
          digit[j] = 0;
        }
      } else {
        do {
          for (auto& dg : digit) dg = pick(rng);
        } while (std::all_of(digit.begin(), digit.end(), [](int v) { return v == 0; }));
      }
      RVector a(static_cast<Eigen::Index>(grp.size()));
      for (size_t j = 0; j < grp.size(); ++j) a(static_cast<Eigen::Index>(j)) = values[static_cast<size_t>(digit[j])];
      const RVector xa = vec_tilde(d.combine_subset(grp, a));

      const Eigen::Index probes = 1 + 2 * ni + budget.trials_per_group;
      for (Eigen::Index p = 0; p < probes; ++p) {
        if (p == 0) {
          u.setZero();
        } else if (p <= 2 * ni) {
          u.setZero();
          u((p - 1) / 2) = (p % 2 == 1) ? 1.0 : -1.0;
        } else {
          for (auto& e : u) e = nd(rng);
        }
        const CMatrix m = unvec_tilde(ni > 0 ? RVector(xa + w_inter * u) : xa, t, n);
        ++report.matrices_checked;
        Eigen::JacobiSVD<CMatrix> svd(m);
        const auto& sv = svd.singularValues();
        const int rank = sv(0) > 0.0 ? static_cast<int>((sv.array() > kRankTolerance * sv(0)).count()) : 0;
        if (rank < n) {
          RankWitness w;
          w.mode = mode;
          w.group = k;
          w.group_symbols = grp;
          for (Eigen::Index j = 0; j < a.size(); ++j) w.difference.push_back(static_cast<int>(a(j)));
          w.interference_symbols = inter;
          w.interference.assign(u.data(), u.data() + u.size());
          w.rank = rank;
          w.smallest_singular_value = sv(sv.size() - 1);
          report.witness = std::move(w);
          return report;
        }
        // Random probes are only worth running when the interference set is nonempty.
        if (ni == 0 && p == 0) break;
      }
    }
  }
  return report;
}

inline FalsifyReport falsify_pic(const Design& d, const GroupingScheme& s, const FalsifyBudget& b) {
  return falsify(d, s, CriterionMode::kPic, b);
}
inline FalsifyReport falsify_picsic(const Design& d, const GroupingScheme& s, const FalsifyBudget& b) {
  return falsify(d, s, CriterionMode::kPicSic, b);
}

/// Recomputes the witness matrix from scratch; its rank under kRankTolerance.
inline int witness_rank(const Design& d, const RankWitness& w) {
  RVector a(static_cast<Eigen::Index>(w.difference.size()));
  for (size_t j = 0; j < w.difference.size(); ++j) a(static_cast<Eigen::Index>(j)) = w.difference[j];
  const RVector u = Eigen::Map<const RVector>(w.interference.data(), static_cast<Eigen::Index>(w.interference.size()));
  return numerical_rank(CMatrix(d.combine_subset(w.group_symbols, a) + d.combine_subset(w.interference_symbols, u)));
}

// ---------------------------------------------------------------------------
// Structural certificates

namespace detail {

inline bool close(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff() <= 1e-12; }

/// Weight matrix a diagonal-layer symbol must have: coefficient q(j mod l, c)
/// at (layer + j, j), real for the even group of the layer, imaginary for
/// the odd one.
inline CMatrix expected_layer_weight(const CodeSpec& spec, const RMatrix& q, int group, int local) {
  const int layer = group / 2;
  const Complex unit = group % 2 == 0 ? Complex(1, 0) : Complex(0, 1);
  CMatrix a = CMatrix::Zero(spec.delay, spec.antennas);
  for (int j = 0; j < spec.antennas; ++j) a(layer + j, j) = unit * q(j % spec.lambda, local);
  return a;
}

inline CMatrix expected_block_weight(const CodeSpec& spec, const RMatrix& q, int group, int local) {
  const int layer = group / 4;
  const int role = group % 4;
  CMatrix a = CMatrix::Zero(spec.delay, spec.antennas);
  for (int l = 0; l < spec.lambda; ++l) {
    const double c = q(l, local);
    const CMatrix blk = alamouti_block(role == 0 ? c : 0, role == 1 ? c : 0, role == 2 ? c : 0, role == 3 ? c : 0);
    a.block(2 * (layer + l), 2 * l, 2, 2) = blk;
  }
  return a;
}

}  // namespace detail

/// Structural full-diversity certificate for the diagonal-layer family.
///
/// PIC-SIC: for group k on layer m, every later group lives on layers >= m,
/// earlier layers vanish, and each diagonal entry of layer m has a nonzero
/// component owned by the group (a row of Q applied to a nonzero integer
/// vector). The N rows starting at row m form a lower-triangular block with
/// nonzero diagonal. PIC additionally needs n <= 2 (the other layer sits on
/// one side of the diagonal) or lambda = 1 (every entry of a layer is the
/// same scalar, so the first nonzero layer is entirely nonzero).
/// Returns false when the argument does not apply; that is not a disproof.
inline bool certify_section3(const Code& code, int bound = kDefaultCertifyBound,
                             CriterionMode mode = CriterionMode::kPicSic) {
  const CodeSpec& spec = code.spec;
  if (spec.family != Family::kDiagonalLayers) throw std::invalid_argument("certify_section3: not a sec3 code");
  if (!certify_rotation(code.rotation.entries, bound).pass) return false;
  if (!(code.grouping == GroupingScheme::contiguous(spec.num_groups, spec.lambda))) return false;
  for (int k = 0; k < spec.num_groups; ++k)
    for (int c = 0; c < spec.lambda; ++c) {
      const CMatrix want = detail::expected_layer_weight(spec, code.rotation.entries, k, c);
      if (!detail::close(code.design.weight(k * spec.lambda + c), want)) return false;
    }
  if (mode == CriterionMode::kPic) return spec.layers <= 2 || spec.lambda == 1;
  return true;
}

inline bool certify_section3(const CodeSpec& spec, const RotationMatrix& q, int bound = kDefaultCertifyBound,
                             CriterionMode mode = CriterionMode::kPicSic) {
  return certify_section3(build_section3(spec.antennas, spec.lambda, spec.layers, q), bound, mode);
}

/// Structural certificate for the Alamouti-block family under its fine
/// grouping. Group k fills one of the four real slots of every block in its
/// layer with a row of Q applied to a nonzero integer vector; later groups
/// sit in the same layer's other slots or in later layers, so the N rows of
/// the layer form a block lower-triangular matrix whose determinant is a
/// product of sums of four squares, each with a nonzero term. PIC needs n <= 2.
inline bool certify_section4(const Code& code, int bound = kDefaultCertifyBound,
                             CriterionMode mode = CriterionMode::kPicSic) {
  const CodeSpec& spec = code.spec;
  if (spec.family != Family::kAlamoutiBlocks) throw std::invalid_argument("certify_section4: not a sec4 code");
  if (spec.variant != GroupingVariant::kFine)
    throw std::invalid_argument(
        "certify_section4: certificate covers the fine grouping; the coarse grouping merges fine groups and "
        "inherits full diversity from it");
  if (!certify_rotation(code.rotation.entries, bound).pass) return false;
  if (!(code.grouping == GroupingScheme::contiguous(spec.num_groups, spec.lambda))) return false;
  for (int k = 0; k < spec.num_groups; ++k)
    for (int c = 0; c < spec.lambda; ++c) {
      const CMatrix want = detail::expected_block_weight(spec, code.rotation.entries, k, c);
      if (!detail::close(code.design.weight(k * spec.lambda + c), want)) return false;
    }
  if (mode == CriterionMode::kPic) return spec.layers <= 2;
  return true;
}

inline bool certify_section4(const CodeSpec& spec, const RotationMatrix& q, int bound = kDefaultCertifyBound,
                             CriterionMode mode = CriterionMode::kPicSic) {
  if (spec.variant != GroupingVariant::kFine)
    throw std::invalid_argument("certify_section4: only the fine grouping is certified");
  return certify_section4(build_section4(spec.antennas, spec.layers, q, spec.variant), bound, mode);
}

}  // namespace stbc
