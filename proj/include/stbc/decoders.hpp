#pragma once

// ML, ZF, PIC and PIC-SIC group decoders over the real equivalent channel
//   y = sqrt(snr) G x + vec_tilde(W).
//
// Group metrics only ever need P y and P G_k up to an orthogonal change of
// coordinates, so projections are carried out in the coordinates of an
// orthonormal frame of the complement subspace. The frame comes from a
// Householder QR when the interference columns are well conditioned and
// from a full SVD otherwise.
//
// Enumeration order inside a group is lexicographic over alphabet indices
// with the group's first symbol varying fastest; ties keep the earliest
// candidate. The conditioned search walks the same order over the remaining
// symbols and solves the first one by scale-round-clamp, so both searches
// return identical decisions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stbc/channel.hpp"
#include "stbc/lindesign.hpp"
#include "stbc/types.hpp"

namespace stbc {

enum class SearchMode { kExhaustive, kConditioned };
enum class DecoderKind { kMl, kZf, kPic, kPicSic };

inline SearchMode search_mode_from_string(const std::string& s) {
  if (s == "exhaustive") return SearchMode::kExhaustive;
  if (s == "conditioned") return SearchMode::kConditioned;
  throw std::invalid_argument("unknown search mode '" + s + "' (expected exhaustive or conditioned)");
}
inline std::string to_string(SearchMode m) { return m == SearchMode::kExhaustive ? "exhaustive" : "conditioned"; }

inline DecoderKind decoder_from_string(const std::string& s) {
  if (s == "ml") return DecoderKind::kMl;
  if (s == "zf") return DecoderKind::kZf;
  if (s == "pic") return DecoderKind::kPic;
  if (s == "picsic") return DecoderKind::kPicSic;
  throw std::invalid_argument("unknown decoder '" + s + "' (expected ml, zf, pic or picsic)");
}
inline std::string to_string(DecoderKind d) {
  switch (d) {
    case DecoderKind::kMl: return "ml";
    case DecoderKind::kZf: return "zf";
    case DecoderKind::kPic: return "pic";
    case DecoderKind::kPicSic: return "picsic";
  }
  return "?";
}

struct DecodeProblem {
  RVector y;
  RMatrix g;
  GroupingScheme scheme;
  std::vector<PamAlphabet> alphabets;  // one per real symbol
  double snr = 1.0;

  DecodeProblem(RVector y_, RMatrix g_, GroupingScheme scheme_, std::vector<PamAlphabet> alphabets_, double snr_)
      : y(std::move(y_)), g(std::move(g_)), scheme(std::move(scheme_)), alphabets(std::move(alphabets_)), snr(snr_) {
    if (y.size() != g.rows())
      throw DimensionError("DecodeProblem: y has length " + std::to_string(y.size()) + ", G has " +
                           std::to_string(g.rows()) + " rows");
    if (g.cols() != scheme.num_symbols())
      throw DimensionError("DecodeProblem: G has " + std::to_string(g.cols()) + " columns, grouping covers K=" +
                           std::to_string(scheme.num_symbols()));
    if (static_cast<Eigen::Index>(alphabets.size()) != g.cols())
      throw DimensionError("DecodeProblem: need one alphabet per symbol");
    if (!(snr >= 0.0)) throw std::invalid_argument("DecodeProblem: snr must be non-negative");
  }

  DecodeProblem(RVector y_, RMatrix g_, GroupingScheme scheme_, const PamAlphabet& pam, double snr_)
      : DecodeProblem(std::move(y_), g_, std::move(scheme_),
                      std::vector<PamAlphabet>(static_cast<size_t>(g_.cols()), pam), snr_) {}

  [[nodiscard]] int num_symbols() const { return static_cast<int>(g.cols()); }
};

struct DecodeResult {
  RVector x;                          // decided levels
  std::vector<int> indices;           // decided alphabet indices
  std::int64_t candidate_evaluations = 0;
  std::vector<std::int64_t> per_group_counts;
};

struct GroupDecision {
  std::vector<int> indices;
  std::int64_t evaluations = 0;
};

// ---------------------------------------------------------------------------
// Projections

/// Orthonormal basis (columns) of the column space of b, numerical rank at
/// kRankTolerance relative to the largest singular value.
inline RMatrix orthonormal_basis(const RMatrix& b) {
  if (b.cols() == 0 || b.rows() == 0) return RMatrix(b.rows(), 0);
  Eigen::JacobiSVD<RMatrix> svd(b, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) r = (s.array() > kRankTolerance * s(0)).count();
  return svd.matrixU().leftCols(r);
}

/// P = I - U U^T, the orthogonal projector onto the complement of span(b).
inline RMatrix complement_projector(const RMatrix& b) {
  const RMatrix u = orthonormal_basis(b);
  return RMatrix::Identity(b.rows(), b.rows()) - u * u.transpose();
}

/// Orthonormal frame (columns) of the orthogonal complement of span(b).
inline RMatrix complement_frame(const RMatrix& b) {
  const Eigen::Index rows = b.rows();
  if (b.cols() == 0) return RMatrix::Identity(rows, rows);
  Eigen::JacobiSVD<RMatrix> svd(b, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) r = (s.array() > kRankTolerance * s(0)).count();
  return svd.matrixU().rightCols(rows - r);
}

struct ProjectedGroup {
  RVector py;  // P y in frame coordinates
  RMatrix pg;  // P G_k in frame coordinates
};

namespace detail {

inline RMatrix gather_columns(const RMatrix& g, std::span<const int> idx) {
  RMatrix out(g.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = g.col(idx[j]);
  return out;
}

/// True when the leading `count` diagonal entries of R are all clearly
/// nonzero, i.e. the first `count` columns are numerically independent.
inline bool leading_columns_independent(const RMatrix& r, Eigen::Index count) {
  if (count == 0) return true;
  const RVector d = r.diagonal().head(count).cwiseAbs();
  const double top = d.maxCoeff();
  return top > 0.0 && d.minCoeff() > 1e-7 * top;
}

}  // namespace detail

/// Projects y and the group columns onto the complement of span(interference).
inline ProjectedGroup project_out(const RMatrix& interference, const RMatrix& group_cols, const RVector& y) {
  const Eigen::Index m = interference.cols();
  if (m == 0) return {y, group_cols};
  if (m < interference.rows()) {
    Eigen::HouseholderQR<RMatrix> qr(interference);
    const RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    if (detail::leading_columns_independent(r, m)) {
      const auto qt = qr.householderQ().transpose();
      const RVector cy = qt * y;
      const RMatrix cg = qt * group_cols;
      return {cy.tail(y.size() - m), cg.bottomRows(y.size() - m)};
    }
  }
  const RMatrix frame = complement_frame(interference);
  return {frame.transpose() * y, frame.transpose() * group_cols};
}

// ---------------------------------------------------------------------------
// Group search

namespace detail {

/// py - sum_{j>=1} s_j x_j, accumulated from the last symbol down.
inline RVector rest_residual(const RVector& py, const RMatrix& s, std::span<const PamAlphabet> pams,
                             const std::vector<int>& idx) {
  RVector r = py;
  for (Eigen::Index j = s.cols() - 1; j >= 1; --j)
    r.noalias() -= s.col(j) * pams[static_cast<size_t>(j)].level(idx[static_cast<size_t>(j)]);
  return r;
}

/// Advances digits [first, n) of an odometer; false after the last state.
inline bool advance(std::vector<int>& idx, std::span<const PamAlphabet> pams, size_t first) {
  for (size_t j = first; j < idx.size(); ++j) {
    if (++idx[j] < pams[j].size()) return true;
    idx[j] = 0;
  }
  return false;
}

}  // namespace detail

/// argmin over the group's product alphabet of ||py - sqrt(snr) pg x||^2.
inline GroupDecision group_joint_decode(const RVector& py, const RMatrix& pg, std::span<const PamAlphabet> pams,
                                        double sqrt_snr, SearchMode mode) {
  const size_t n = static_cast<size_t>(pg.cols());
  if (pams.size() != n) throw DimensionError("group_joint_decode: need one alphabet per group column");
  if (py.size() != pg.rows()) throw DimensionError("group_joint_decode: py / pg row mismatch");
  GroupDecision best;
  if (n == 0) return best;
  const RMatrix s = sqrt_snr * pg;
  const double pivot_norm2 = pg.col(0).squaredNorm();
  if (mode == SearchMode::kConditioned && !(pivot_norm2 < 1e-24)) {
    const double s0n2 = s.col(0).squaredNorm();
    const PamAlphabet& pivot = pams[0];
    std::vector<int> idx(n, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    do {
      const RVector r = detail::rest_residual(py, s, pams, idx);
      const double t = s0n2 > 0.0 ? r.dot(s.col(0)) / s0n2 : 0.0;
      idx[0] = pivot.nearest_index(t);
      const double metric = (r - s.col(0) * pivot.level(idx[0])).squaredNorm();
      ++best.evaluations;
      if (metric < best_metric) {
        best_metric = metric;
        best.indices = idx;
      }
      idx[0] = 0;
    } while (detail::advance(idx, pams, 1));
    return best;
  }
  // Exhaustive (also the fallback for a degenerate pivot column).
  std::vector<int> idx(n, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  do {
    const RVector r = detail::rest_residual(py, s, pams, idx);
    for (int i0 = 0; i0 < pams[0].size(); ++i0) {
      idx[0] = i0;
      const double metric = (r - s.col(0) * pams[0].level(i0)).squaredNorm();
      ++best.evaluations;
      if (metric < best_metric) {
        best_metric = metric;
        best.indices = idx;
      }
    }
    idx[0] = 0;
  } while (detail::advance(idx, pams, 1));
  return best;
}

// ---------------------------------------------------------------------------
// Decoders

namespace detail {

inline std::vector<PamAlphabet> group_alphabets(const DecodeProblem& p, const std::vector<int>& grp) {
  std::vector<PamAlphabet> out;
  out.reserve(grp.size());
  for (int i : grp) out.push_back(p.alphabets[static_cast<size_t>(i)]);
  return out;
}

inline DecodeResult empty_result(const DecodeProblem& p) {
  DecodeResult r;
  r.x = RVector::Zero(p.num_symbols());
  r.indices.assign(static_cast<size_t>(p.num_symbols()), 0);
  r.per_group_counts.assign(static_cast<size_t>(p.scheme.num_groups()), 0);
  return r;
}

inline void store_group(DecodeResult& res, const DecodeProblem& p, int k, const std::vector<int>& grp,
                        const GroupDecision& d) {
  for (size_t j = 0; j < grp.size(); ++j) {
    const int i = grp[j];
    res.indices[static_cast<size_t>(i)] = d.indices[j];
    res.x(i) = p.alphabets[static_cast<size_t>(i)].level(d.indices[j]);
  }
  res.per_group_counts[static_cast<size_t>(k)] = d.evaluations;
  res.candidate_evaluations += d.evaluations;
}

}  // namespace detail

/// Each group decoded on its own after projecting out every other group.
inline DecodeResult pic_decode(const DecodeProblem& p, SearchMode mode = SearchMode::kConditioned) {
  DecodeResult res = detail::empty_result(p);
  const double sqrt_snr = std::sqrt(p.snr);
  for (int k = 0; k < p.scheme.num_groups(); ++k) {
    const auto& grp = p.scheme.group(k);
    const auto others = p.scheme.complement(k);
    const ProjectedGroup proj =
        project_out(detail::gather_columns(p.g, others), detail::gather_columns(p.g, grp), p.y);
    const auto pams = detail::group_alphabets(p, grp);
    detail::store_group(res, p, k, grp, group_joint_decode(proj.py, proj.pg, pams, sqrt_snr, mode));
  }
  return res;
}

/// Residual left after the last PIC-SIC cancellation step, y_{g+1}.
struct PicSicTrace {
  DecodeResult result;
  RVector final_residual;
};

/// Sequential group decoding: project out later groups, decide, cancel.
inline PicSicTrace picsic_decode_traced(const DecodeProblem& p, SearchMode mode = SearchMode::kConditioned) {
  DecodeResult res = detail::empty_result(p);
  const double sqrt_snr = std::sqrt(p.snr);
  const int g = p.scheme.num_groups();
  const Eigen::Index rows = p.g.rows();

  // One QR of [G_{I_g} ... G_{I_1}] serves every stage: the later groups of
  // stage k are exactly its leading columns.
  std::vector<int> order;
  std::vector<Eigen::Index> offset(static_cast<size_t>(g));
  for (int k = g - 1; k >= 0; --k) {
    offset[static_cast<size_t>(k)] = static_cast<Eigen::Index>(order.size());
    const auto& grp = p.scheme.group(k);
    order.insert(order.end(), grp.begin(), grp.end());
  }
  const RMatrix ordered = detail::gather_columns(p.g, order);
  const Eigen::Index interference_max = static_cast<Eigen::Index>(order.size() - p.scheme.group(0).size());
  bool shared_qr = interference_max < rows;
  Eigen::HouseholderQR<RMatrix> qr;
  if (shared_qr) {
    qr.compute(ordered);
    const RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    shared_qr = detail::leading_columns_independent(r, interference_max);
  }

  RVector y = p.y;
  if (shared_qr) {
    RMatrix r = qr.householderQ().transpose() * ordered;
    RVector c = qr.householderQ().transpose() * y;
    for (int k = 0; k < g; ++k) {
      const auto& grp = p.scheme.group(k);
      const Eigen::Index m = offset[static_cast<size_t>(k)];
      const Eigen::Index nk = static_cast<Eigen::Index>(grp.size());
      const auto pams = detail::group_alphabets(p, grp);
      const GroupDecision d = group_joint_decode(c.tail(rows - m), r.block(m, m, rows - m, nk), pams, sqrt_snr, mode);
      detail::store_group(res, p, k, grp, d);
      for (Eigen::Index j = 0; j < nk; ++j) {
        const int i = grp[static_cast<size_t>(j)];
        c.noalias() -= sqrt_snr * res.x(i) * r.col(m + j);
        y.noalias() -= sqrt_snr * res.x(i) * p.g.col(i);
      }
    }
    return {std::move(res), std::move(y)};
  }

  for (int k = 0; k < g; ++k) {
    const auto& grp = p.scheme.group(k);
    const ProjectedGroup proj =
        project_out(detail::gather_columns(p.g, p.scheme.later(k)), detail::gather_columns(p.g, grp), y);
    const auto pams = detail::group_alphabets(p, grp);
    detail::store_group(res, p, k, grp, group_joint_decode(proj.py, proj.pg, pams, sqrt_snr, mode));
    for (int i : grp) y.noalias() -= sqrt_snr * res.x(i) * p.g.col(i);
  }
  return {std::move(res), std::move(y)};
}

inline DecodeResult picsic_decode(const DecodeProblem& p, SearchMode mode = SearchMode::kConditioned) {
  return picsic_decode_traced(p, mode).result;
}

inline constexpr double kDefaultMlCap = 1 << 20;

/// Exhaustive search over the whole product alphabet.
inline DecodeResult ml_decode(const DecodeProblem& p, double search_cap = kDefaultMlCap) {
  double space = 1.0;
  for (const auto& a : p.alphabets) space *= a.size();
  if (space > search_cap)
    throw InfeasibleError("ml_decode: search space " + std::to_string(static_cast<long long>(space)) +
                          " exceeds cap " + std::to_string(static_cast<long long>(search_cap)));
  const GroupDecision d = group_joint_decode(p.y, p.g, p.alphabets, std::sqrt(p.snr), SearchMode::kExhaustive);
  DecodeResult res;
  res.indices = d.indices;
  res.x.resize(p.num_symbols());
  for (int i = 0; i < p.num_symbols(); ++i) res.x(i) = p.alphabets[static_cast<size_t>(i)].level(d.indices[static_cast<size_t>(i)]);
  res.candidate_evaluations = d.evaluations;
  res.per_group_counts = {d.evaluations};
  return res;
}

/// Pseudo-inverse equalization followed by per-symbol quantization. A
/// rank-deficient G is handled by the rank-revealing pseudo-inverse.
inline DecodeResult zf_decode(const DecodeProblem& p) {
  const RMatrix a = std::sqrt(p.snr) * p.g;
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod;
  cod.setThreshold(kRankTolerance);
  cod.compute(a);
  const RVector est = cod.solve(p.y);
  DecodeResult res;
  res.x.resize(p.num_symbols());
  res.indices.resize(static_cast<size_t>(p.num_symbols()));
  for (int i = 0; i < p.num_symbols(); ++i) {
    const auto& pam = p.alphabets[static_cast<size_t>(i)];
    const int idx = pam.nearest_index(est(i));
    res.indices[static_cast<size_t>(i)] = idx;
    res.x(i) = pam.level(idx);
  }
  res.candidate_evaluations = p.num_symbols();
  res.per_group_counts.assign(static_cast<size_t>(p.num_symbols()), 1);
  return res;
}

inline DecodeResult decode(const DecodeProblem& p, DecoderKind kind, SearchMode mode = SearchMode::kConditioned) {
  switch (kind) {
    case DecoderKind::kMl: return ml_decode(p);
    case DecoderKind::kZf: return zf_decode(p);
    case DecoderKind::kPic: return pic_decode(p, mode);
    case DecoderKind::kPicSic: return picsic_decode(p, mode);
  }
  throw std::invalid_argument("decode: unknown decoder");
}

}  // namespace stbc
