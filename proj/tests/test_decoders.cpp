#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace stbc;
using namespace stbc::testing;

namespace {

// Independent references: explicit projector from a pseudo-inverse and a
// plain nested enumeration of the product alphabet.

RMatrix reference_projector(const RMatrix& b) {
  const Eigen::Index rows = b.rows();
  if (b.cols() == 0) return RMatrix::Identity(rows, rows);
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod;
  cod.setThreshold(1e-9);
  cod.compute(b);
  return RMatrix::Identity(rows, rows) - b * cod.pseudoInverse();
}

std::vector<int> reference_search(const RVector& y, const RMatrix& g, const PamAlphabet& pam, double sqrt_snr) {
  const int n = static_cast<int>(g.cols());
  std::vector<int> idx(static_cast<size_t>(n), 0), best;
  double best_metric = INFINITY;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= pam.size();
  for (long c = 0; c < total; ++c) {
    long rem = c;
    RVector x(n);
    for (int i = 0; i < n; ++i) {  // symbol 0 varies fastest
      idx[static_cast<size_t>(i)] = static_cast<int>(rem % pam.size());
      rem /= pam.size();
      x(i) = pam.level(idx[static_cast<size_t>(i)]);
    }
    const double m = (y - sqrt_snr * g * x).squaredNorm();
    if (m < best_metric) {
      best_metric = m;
      best = idx;
    }
  }
  return best;
}

std::vector<int> reference_pic(const DecodeProblem& p, const PamAlphabet& pam, bool sic) {
  std::vector<int> out(static_cast<size_t>(p.num_symbols()));
  RVector y = p.y;
  const double rs = std::sqrt(p.snr);
  for (int k = 0; k < p.scheme.num_groups(); ++k) {
    const auto& grp = p.scheme.group(k);
    const auto interf = sic ? p.scheme.later(k) : p.scheme.complement(k);
    const RMatrix proj = reference_projector(detail::gather_columns(p.g, interf));
    const RMatrix gk = detail::gather_columns(p.g, grp);
    const auto d = reference_search(proj * (sic ? y : p.y), proj * gk, pam, rs);
    for (size_t j = 0; j < grp.size(); ++j) {
      out[static_cast<size_t>(grp[j])] = d[j];
      if (sic) y -= rs * pam.level(d[j]) * p.g.col(grp[j]);
    }
  }
  return out;
}

std::vector<int> transmitted_indices(const RVector& x, const PamAlphabet& pam) {
  std::vector<int> out;
  for (double v : x) out.push_back(pam.nearest_index(v));
  return out;
}

Code normalized(Code c) {
  c.design = normalize_power(c.design, kRealSymbolEnergy);
  return c;
}

}  // namespace

TEST(Projector, Identities) {
  EXPECT_EQ(complement_projector(RMatrix(3, 0)), RMatrix::Identity(3, 3));
  RMatrix e1 = RMatrix::Zero(3, 1);
  e1(0) = 1;
  RMatrix expected = RMatrix::Identity(3, 3);
  expected(0, 0) = 0;
  EXPECT_LE((complement_projector(e1) - expected).norm(), 1e-15);

  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    RMatrix b = random_vector(12 * 5, rng).reshaped(12, 5);
    if (t % 2) b.col(4) = b.col(0) + 2 * b.col(1);  // rank-deficient spanning set
    const RMatrix p = complement_projector(b);
    EXPECT_LE((p - p.transpose()).norm(), 1e-9);
    EXPECT_LE((p * p - p).norm(), 1e-9);
    EXPECT_LE((p * b).norm(), 1e-9 * b.norm());
    EXPECT_LE((p - reference_projector(b)).norm(), 1e-9);
  }
}

TEST(Projector, ProjectOutPreservesNorms) {
  std::mt19937_64 rng(42);
  for (int cols : {3, 11, 14}) {
    const RMatrix b = random_vector(12 * cols, rng).reshaped(12, cols);
    const RMatrix g = random_vector(24, rng).reshaped(12, 2);
    const RVector y = random_vector(12, rng);
    const ProjectedGroup pg = project_out(b, g, y);
    const RMatrix p = reference_projector(b);
    EXPECT_NEAR(pg.py.norm(), (p * y).norm(), 1e-9);
    EXPECT_LE(((pg.pg.transpose() * pg.pg) - (p * g).transpose() * (p * g)).norm(), 1e-9);
  }
}

TEST(GroupSearch, SingleSymbolConditionedIsOneEvaluation) {
  const PamAlphabet pam(16);
  std::vector<PamAlphabet> pams{pam};
  RMatrix g(2, 1);
  g << 1, 0.5;
  RVector y = g * pam.level(2) * 3.0;
  const auto d = group_joint_decode(y, g, pams, 3.0, SearchMode::kConditioned);
  EXPECT_EQ(d.evaluations, 1);
  EXPECT_EQ(d.indices, std::vector<int>{2});
  EXPECT_EQ(group_joint_decode(y, g, pams, 3.0, SearchMode::kExhaustive).evaluations, 4);
}

TEST(GroupSearch, NoiselessRecovery) {
  std::mt19937_64 rng(43);
  for (int m : {4, 16}) {
    const PamAlphabet pam(m);
    for (int t = 0; t < 100; ++t) {
      const RMatrix g = random_vector(8 * 3, rng).reshaped(8, 3);
      const RVector x = random_pam_vector(3, pam, rng);
      const std::vector<PamAlphabet> pams(3, pam);
      for (auto mode : {SearchMode::kConditioned, SearchMode::kExhaustive})
        EXPECT_EQ(group_joint_decode(2.0 * g * x, g, pams, 2.0, mode).indices, transmitted_indices(x, pam));
    }
  }
}

TEST(GroupSearch, ConditionedEqualsExhaustive) {
  std::mt19937_64 rng(44);
  for (int m : {4, 16}) {
    const PamAlphabet pam(m);
    for (int t = 0; t < 1000; ++t) {
      const int n = 1 + t % 3;
      const RMatrix g = random_vector(6 * n, rng).reshaped(6, n);
      const RVector y = random_vector(6, rng) * 2.0;
      const std::vector<PamAlphabet> pams(static_cast<size_t>(n), pam);
      const auto a = group_joint_decode(y, g, pams, 1.7, SearchMode::kConditioned);
      const auto b = group_joint_decode(y, g, pams, 1.7, SearchMode::kExhaustive);
      ASSERT_EQ(a.indices, b.indices);
      ASSERT_EQ(b.indices, reference_search(y, g, pam, 1.7));
      long full = 1;
      for (int i = 0; i < n; ++i) full *= pam.size();
      EXPECT_EQ(b.evaluations, full);
      EXPECT_EQ(a.evaluations, full / pam.size());
      EXPECT_LT(a.evaluations, b.evaluations);
    }
  }
}

TEST(GroupSearch, DegeneratePivotFallsBack) {
  const PamAlphabet pam(4);
  const std::vector<PamAlphabet> pams(2, pam);
  RMatrix g = RMatrix::Zero(4, 2);
  g(0, 1) = 1;
  RVector y = RVector::Zero(4);
  y(0) = pam.level(1);
  const auto d = group_joint_decode(y, g, pams, 1.0, SearchMode::kConditioned);
  EXPECT_EQ(d.evaluations, 4);
  EXPECT_EQ(d.indices, (std::vector<int>{0, 1}));  // tie on symbol 0 resolved to index 0
}

TEST(Decoders, SingleGroupEqualsMl) {
  std::mt19937_64 rng(45);
  const PamAlphabet pam(4);
  const std::vector<Design> designs{alamouti_design(), build_section3(2, 2, 1).design};
  for (const auto& raw : designs) {
    const Design d = normalize_power(raw, kRealSymbolEnergy);
    const GroupingScheme one = GroupingScheme::contiguous(1, d.num_symbols());
    for (int t = 0; t < 200; ++t) {
      const DecodeProblem p = random_problem(d, one, pam, 1, 6.0, rng);
      const DecodeResult ml = ml_decode(p);
      EXPECT_EQ(ml.candidate_evaluations, 16);
      EXPECT_EQ(ml.indices, reference_search(p.y, p.g, pam, std::sqrt(p.snr)));
      EXPECT_EQ(pic_decode(p, SearchMode::kExhaustive).indices, ml.indices);
      EXPECT_EQ(picsic_decode(p, SearchMode::kExhaustive).indices, ml.indices);
      EXPECT_EQ(pic_decode(p, SearchMode::kConditioned).indices, ml.indices);
      EXPECT_EQ(picsic_decode(p, SearchMode::kConditioned).indices, ml.indices);
    }
  }
}

TEST(Decoders, AlamoutiMlEqualsZf) {
  std::mt19937_64 rng(46);
  const PamAlphabet pam(4);
  const Design d = normalize_power(alamouti_design(), kRealSymbolEnergy);
  const GroupingScheme one = GroupingScheme::contiguous(1, 4);
  for (int t = 0; t < 200; ++t) {
    const DecodeProblem p = random_problem(d, one, pam, 1, 3.0, rng);
    EXPECT_EQ(ml_decode(p).indices, zf_decode(p).indices);
    // Orthogonal columns: ZF is the per-symbol matched filter.
    const RVector mf = (p.g.transpose() * p.y).cwiseQuotient(std::sqrt(p.snr) * p.g.colwise().squaredNorm().transpose());
    EXPECT_EQ(zf_decode(p).indices, transmitted_indices(mf.unaryExpr([&](double v) { return pam.level(pam.nearest_index(v)); }), pam));
  }
}

TEST(Decoders, LambdaOnePicIsZf) {
  std::mt19937_64 rng(47);
  const Code code = normalized(build_section3(3, 1, 3));
  for (int m : {4, 16}) {
    const PamAlphabet pam(m);
    for (int t = 0; t < 200; ++t) {
      const DecodeProblem p = random_problem(code.design, code.grouping, pam, 1, 5.0, rng);
      const DecodeResult pic = pic_decode(p);
      EXPECT_EQ(pic.indices, zf_decode(p).indices);
      EXPECT_EQ(pic.candidate_evaluations, code.design.num_symbols());
    }
  }
}

TEST(Decoders, NoiselessRecoveryAndZeroResidual) {
  std::mt19937_64 rng(48);
  const PamAlphabet pam(16);
  for (const Code& code : {normalized(build_section3(3, 2, 4)), normalized(build_section4(4, 2)),
                           normalized(build_section3(4, 4, 3))}) {
    for (int nr : {1, 2}) {
      for (int t = 0; t < 20; ++t) {
        const RVector x = random_pam_vector(code.design.num_symbols(), pam, rng);
        const LinkInstance link = sample_link(code.design.antennas(), nr, code.design.delay(), 30.0, rng);
        const RMatrix g = code.design.equivalent_channel(link.h);
        const DecodeProblem p(std::sqrt(link.snr) * g * x, g, code.grouping, pam, link.snr);
        const auto truth = transmitted_indices(x, pam);
        const PicSicTrace tr = picsic_decode_traced(p);
        EXPECT_EQ(tr.result.indices, truth);
        EXPECT_LE(tr.final_residual.norm(), 1e-9 * p.y.norm());
        // With a single receive antenna the other groups can span the whole space.
        if (g.rows() >= g.cols()) {
          EXPECT_EQ(pic_decode(p).indices, truth);
          if (numerical_rank(g) == g.cols()) {
            EXPECT_EQ(zf_decode(p).indices, truth);
          }
        }
      }
    }
  }
}

TEST(Decoders, MatchExplicitProjectorReference) {
  std::mt19937_64 rng(49);
  const PamAlphabet pam(4);
  for (const Code& code : {normalized(build_section3(3, 2, 4)), normalized(build_section4(4, 2))}) {
    for (int nr : {1, 2}) {
      for (int t = 0; t < 100; ++t) {
        const DecodeProblem p = random_problem(code.design, code.grouping, pam, nr, 12.0, rng);
        EXPECT_EQ(picsic_decode(p).indices, reference_pic(p, pam, true));
        EXPECT_EQ(picsic_decode(p, SearchMode::kExhaustive).indices, reference_pic(p, pam, true));
        if (nr > 1) {
          EXPECT_EQ(pic_decode(p).indices, reference_pic(p, pam, false));
        }
      }
    }
  }
}

TEST(Decoders, ConditionedEqualsExhaustiveOnCodes) {
  std::mt19937_64 rng(50);
  for (int m : {4, 16}) {
    const PamAlphabet pam(m);
    for (const Code& code : {normalized(build_section3(3, 2, 4)), normalized(build_section4(4, 2))}) {
      for (int t = 0; t < 100; ++t) {
        const DecodeProblem p = random_problem(code.design, code.grouping, pam, 1, 10.0, rng);
        EXPECT_EQ(picsic_decode(p, SearchMode::kConditioned).indices,
                  picsic_decode(p, SearchMode::kExhaustive).indices);
        const DecodeProblem p2 = random_problem(code.design, code.grouping, pam, 2, 10.0, rng);
        EXPECT_EQ(pic_decode(p2, SearchMode::kConditioned).indices, pic_decode(p2, SearchMode::kExhaustive).indices);
      }
    }
  }
}

TEST(Decoders, EvaluationCounters) {
  std::mt19937_64 rng(51);
  for (int m : {4, 16}) {
    const PamAlphabet pam(m);
    const long sqrt_m = pam.size();
    // Diagonal layers, lambda = 2, g = 8: 8 * sqrt(M) evaluations per frame.
    const Code c3 = normalized(build_section3(3, 2, 4));
    const DecodeProblem p3 = random_problem(c3.design, c3.grouping, pam, 1, 10.0, rng);
    const DecodeResult r3 = picsic_decode(p3);
    EXPECT_EQ(r3.candidate_evaluations, 8 * sqrt_m);
    for (auto c : r3.per_group_counts) EXPECT_EQ(c, sqrt_m);
    EXPECT_EQ(picsic_decode(p3, SearchMode::kExhaustive).candidate_evaluations, 8 * sqrt_m * sqrt_m);

    // N = lambda = 4, n = 3: 6 groups of sqrt(M)^3.
    const Code c2 = normalized(build_section3(4, 4, 3));
    const DecodeProblem p2 = random_problem(c2.design, c2.grouping, pam, 1, 10.0, rng);
    const DecodeResult r2 = picsic_decode(p2);
    for (auto c : r2.per_group_counts) EXPECT_EQ(c, sqrt_m * sqrt_m * sqrt_m);
    EXPECT_EQ(r2.candidate_evaluations, 6 * sqrt_m * sqrt_m * sqrt_m);
  }
}

TEST(Decoders, DecisionsLieInAlphabet) {
  std::mt19937_64 rng(52);
  const PamAlphabet pam(16);
  const Code code = normalized(build_section4(4, 2));
  for (int t = 0; t < 50; ++t) {
    const DecodeProblem p = random_problem(code.design, code.grouping, pam, 1, -5.0, rng);
    for (auto kind : {DecoderKind::kZf, DecoderKind::kPic, DecoderKind::kPicSic}) {
      const DecodeResult r = decode(p, kind);
      for (int i = 0; i < p.num_symbols(); ++i) EXPECT_EQ(r.x(i), pam.level(r.indices[static_cast<size_t>(i)]));
    }
  }
}

TEST(Decoders, MlCapAndNames) {
  std::mt19937_64 rng(53);
  const PamAlphabet pam(16);
  const Code code = normalized(build_section4(4, 2));
  const DecodeProblem p = random_problem(code.design, code.grouping, pam, 1, 10.0, rng);
  EXPECT_THROW(ml_decode(p), InfeasibleError);
  EXPECT_EQ(decoder_from_string("picsic"), DecoderKind::kPicSic);
  EXPECT_EQ(to_string(DecoderKind::kZf), "zf");
  EXPECT_EQ(search_mode_from_string("exhaustive"), SearchMode::kExhaustive);
  EXPECT_THROW(decoder_from_string("mmse"), std::invalid_argument);
}

TEST(Decoders, ProblemValidation) {
  const GroupingScheme s = GroupingScheme::contiguous(2, 2);
  EXPECT_THROW(DecodeProblem(RVector::Zero(3), RMatrix::Zero(4, 4), s, PamAlphabet(4), 1.0), DimensionError);
  EXPECT_THROW(DecodeProblem(RVector::Zero(4), RMatrix::Zero(4, 3), s, PamAlphabet(4), 1.0), DimensionError);
  EXPECT_THROW(DecodeProblem(RVector::Zero(4), RMatrix::Zero(4, 4), s, PamAlphabet(4), -1.0),
               std::invalid_argument);
}
