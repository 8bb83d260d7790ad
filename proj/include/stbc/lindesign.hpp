#pragma once

// Linear-dispersion designs X = s * sum_i x_i A_i, the real equivalent
// channel, and grouping schemes.
//
// Conventions used throughout the library:
//   * symbol indices are 0-based in code, 1-based in JSON documents;
//   * vec_tilde stacks vec(Re A) over vec(Im A), each half column-major.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stbc/types.hpp"

namespace stbc {

/// Number of singular values above rel_tol * sigma_max.
inline int numerical_rank(const RMatrix& m, double rel_tol = kRankTolerance) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

inline RVector vec_tilde(const CMatrix& a) {
  const Eigen::Index n = a.size();
  RVector v(2 * n);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r) v(k++) = a(r, c).real();
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r) v(k++) = a(r, c).imag();
  return v;
}

/// Inverse of vec_tilde for a rows x cols target.
inline CMatrix unvec_tilde(const RVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != 2 * rows * cols)
    throw DimensionError("unvec_tilde: length " + std::to_string(v.size()) +
                         " does not match 2*" + std::to_string(rows) + "*" +
                         std::to_string(cols));
  CMatrix a(rows, cols);
  const Eigen::Index half = rows * cols;
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r, ++k) a(r, c) = Complex(v(k), v(k + half));
  return a;
}

class Design {
 public:
  Design(std::vector<CMatrix> weights, double power_scale = 1.0)
      : weights_(std::move(weights)), power_scale_(power_scale) {
    if (weights_.empty()) throw std::invalid_argument("Design: no weight matrices");
    if (!(power_scale_ > 0.0) || !std::isfinite(power_scale_))
      throw std::invalid_argument("Design: power_scale must be positive");
    delay_ = static_cast<int>(weights_.front().rows());
    antennas_ = static_cast<int>(weights_.front().cols());
    if (delay_ < 1 || antennas_ < 1) throw DimensionError("Design: empty weight matrix");
    for (const auto& a : weights_)
      if (a.rows() != delay_ || a.cols() != antennas_)
        throw DimensionError("Design: weight matrices differ in shape");
    const int k = num_symbols();
    if (k > 2 * delay_ * antennas_)
      throw std::invalid_argument("Design: K exceeds 2TN, weights cannot be independent");
    if (const int r = numerical_rank(stacked()); r != k)
      throw std::invalid_argument("Design: weight matrices are linearly dependent (rank " +
                                  std::to_string(r) + " < K=" + std::to_string(k) + ")");
  }

  [[nodiscard]] int num_symbols() const { return static_cast<int>(weights_.size()); }
  [[nodiscard]] int delay() const { return delay_; }
  [[nodiscard]] int antennas() const { return antennas_; }
  [[nodiscard]] double power_scale() const { return power_scale_; }
  [[nodiscard]] const std::vector<CMatrix>& weights() const { return weights_; }
  [[nodiscard]] const CMatrix& weight(int i) const { return weights_.at(static_cast<size_t>(i)); }

  [[nodiscard]] Design with_power_scale(double s) const { return Design(weights_, s); }

  /// 2TN x K matrix whose columns are vec_tilde(A_i).
  [[nodiscard]] RMatrix stacked() const {
    RMatrix m(2 * delay_ * antennas_, num_symbols());
    for (int i = 0; i < num_symbols(); ++i) m.col(i) = vec_tilde(weights_[static_cast<size_t>(i)]);
    return m;
  }

  /// power_scale * sum_i x_i A_i.
  [[nodiscard]] CMatrix assemble(const RVector& x) const {
    if (x.size() != num_symbols())
      throw DimensionError("assemble: symbol vector has length " + std::to_string(x.size()) +
                           ", design has K=" + std::to_string(num_symbols()));
    CMatrix out = CMatrix::Zero(delay_, antennas_);
    for (int i = 0; i < num_symbols(); ++i)
      if (x(i) != 0.0) out += x(i) * weights_[static_cast<size_t>(i)];
    return out * power_scale_;
  }

  /// Unscaled sum_i u_i A_{subset[i]}; subset is taken in increasing order.
  /// The empty subset gives the zero matrix.
  [[nodiscard]] CMatrix combine_subset(std::vector<int> subset, const RVector& u) const {
    if (static_cast<Eigen::Index>(subset.size()) != u.size())
      throw DimensionError("combine_subset: |subset| != |u|");
    std::vector<int> order(subset.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return subset[static_cast<size_t>(a)] < subset[static_cast<size_t>(b)]; });
    CMatrix out = CMatrix::Zero(delay_, antennas_);
    for (size_t j = 0; j < order.size(); ++j) {
      const int idx = subset[static_cast<size_t>(order[j])];
      if (idx < 0 || idx >= num_symbols())
        throw std::out_of_range("combine_subset: symbol index " + std::to_string(idx) + " out of range");
      out += u(static_cast<Eigen::Index>(j)) * weights_[static_cast<size_t>(idx)];
    }
    return out;
  }

  /// Real equivalent channel G(H): 2 N_r T x K, column i = vec_tilde(s A_i H),
  /// so that vec_tilde(assemble(x) H) = G x.
  [[nodiscard]] RMatrix equivalent_channel(const CMatrix& h) const {
    if (h.rows() != antennas_)
      throw DimensionError("equivalent_channel: H has " + std::to_string(h.rows()) +
                           " rows, design has N=" + std::to_string(antennas_));
    RMatrix g(2 * delay_ * h.cols(), num_symbols());
    for (int i = 0; i < num_symbols(); ++i)
      g.col(i) = vec_tilde(power_scale_ * (weights_[static_cast<size_t>(i)] * h));
    return g;
  }

 private:
  std::vector<CMatrix> weights_;
  double power_scale_;
  int delay_ = 0;
  int antennas_ = 0;
};

/// Ordered partition I_1..I_g of {0..K-1}. Order matters for SIC.
class GroupingScheme {
 public:
  GroupingScheme(std::vector<std::vector<int>> groups, int num_symbols)
      : groups_(std::move(groups)), num_symbols_(num_symbols) {
    if (groups_.empty()) throw std::invalid_argument("GroupingScheme: no groups");
    std::vector<int> seen(static_cast<size_t>(num_symbols_), 0);
    for (const auto& grp : groups_) {
      if (grp.empty()) throw std::invalid_argument("GroupingScheme: empty group");
      for (int i : grp) {
        if (i < 0 || i >= num_symbols_)
          throw std::out_of_range("GroupingScheme: index " + std::to_string(i) + " outside 0.." +
                                  std::to_string(num_symbols_ - 1));
        if (seen[static_cast<size_t>(i)]++)
          throw std::invalid_argument("GroupingScheme: index " + std::to_string(i) + " repeated");
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw std::invalid_argument("GroupingScheme: groups do not cover every symbol");
  }

  /// g groups of `size` consecutive indices.
  static GroupingScheme contiguous(int num_groups, int size) {
    std::vector<std::vector<int>> g(static_cast<size_t>(num_groups));
    for (int k = 0; k < num_groups; ++k)
      for (int j = 0; j < size; ++j) g[static_cast<size_t>(k)].push_back(k * size + j);
    return {std::move(g), num_groups * size};
  }

  [[nodiscard]] int num_groups() const { return static_cast<int>(groups_.size()); }
  [[nodiscard]] int num_symbols() const { return num_symbols_; }
  [[nodiscard]] const std::vector<std::vector<int>>& groups() const { return groups_; }
  [[nodiscard]] const std::vector<int>& group(int k) const { return groups_.at(static_cast<size_t>(k)); }

  [[nodiscard]] int max_group_size() const {
    size_t n = 0;
    for (const auto& grp : groups_) n = std::max(n, grp.size());
    return static_cast<int>(n);
  }

  /// I_k^c.
  [[nodiscard]] std::vector<int> complement(int k) const {
    std::vector<int> out;
    for (int j = 0; j < num_groups(); ++j)
      if (j != k) out.insert(out.end(), groups_[static_cast<size_t>(j)].begin(), groups_[static_cast<size_t>(j)].end());
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Union of the groups after k (the SIC interference set).
  [[nodiscard]] std::vector<int> later(int k) const {
    std::vector<int> out;
    for (int j = k + 1; j < num_groups(); ++j)
      out.insert(out.end(), groups_[static_cast<size_t>(j)].begin(), groups_[static_cast<size_t>(j)].end());
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const GroupingScheme&, const GroupingScheme&) = default;

 private:
  std::vector<std::vector<int>> groups_;
  int num_symbols_;
};

/// Coordinate permutation listing group 1's symbols first, then group 2's...
/// target_of[i] is the position symbol i moves to.
struct Permutation {
  std::vector<int> target_of;

  [[nodiscard]] RVector apply(const RVector& x) const {
    RVector out(x.size());
    for (size_t i = 0; i < target_of.size(); ++i) out(target_of[i]) = x(static_cast<Eigen::Index>(i));
    return out;
  }
  [[nodiscard]] Permutation inverse() const {
    Permutation inv{std::vector<int>(target_of.size())};
    for (size_t i = 0; i < target_of.size(); ++i) inv.target_of[static_cast<size_t>(target_of[i])] = static_cast<int>(i);
    return inv;
  }
  [[nodiscard]] bool is_identity() const {
    for (size_t i = 0; i < target_of.size(); ++i)
      if (target_of[i] != static_cast<int>(i)) return false;
    return true;
  }
};

inline Permutation grouping_permutation(const GroupingScheme& s) {
  Permutation p{std::vector<int>(static_cast<size_t>(s.num_symbols()))};
  int pos = 0;
  for (const auto& grp : s.groups())
    for (int i : grp) p.target_of[static_cast<size_t>(i)] = pos++;
  return p;
}

using Encoder = std::function<CMatrix(const RVector&)>;

/// Turns a real-linear encoder into explicit weight matrices by probing the
/// standard basis. Linearity is spot-checked on random pairs first.
inline Design extract_design(const Encoder& encoder, int num_symbols, int linearity_checks = 50) {
  if (num_symbols < 1) throw std::invalid_argument("extract_design: K must be positive");
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> nd;
  auto rand_vec = [&] {
    RVector v(num_symbols);
    for (auto& e : v) e = nd(rng);
    return v;
  };
  for (int t = 0; t < linearity_checks; ++t) {
    const RVector x = rand_vec(), y = rand_vec();
    const double a = nd(rng), b = nd(rng);
    const CMatrix lhs = encoder(a * x + b * y);
    const CMatrix rhs = a * encoder(x) + b * encoder(y);
    if ((lhs - rhs).norm() > 1e-10 * std::max(1.0, rhs.norm()))
      throw std::invalid_argument("extract_design: encoder is not real-linear");
  }
  std::vector<CMatrix> w;
  w.reserve(static_cast<size_t>(num_symbols));
  for (int i = 0; i < num_symbols; ++i) w.push_back(encoder(RVector::Unit(num_symbols, i)));
  return Design(std::move(w));
}

}  // namespace stbc
