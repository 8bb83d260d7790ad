#pragma once

// The two code families:
//   * diagonal-layer codes: n layers of N-vectors v_m built from rotated
//     groups, v_m(j) placed at (row m + j, column j), 0-based;
//   * Alamouti-block codes: n layers of N/2 Alamouti blocks, block (m, l)
//     at block-row m + l, block-column l, 0-based.
// Both encoders are real-linear in x and are turned into weight matrices by
// extract_design.

#include <cmath>
#include <string>
#include <vector>

#include "stbc/lindesign.hpp"
#include "stbc/rotations.hpp"
#include "stbc/types.hpp"

namespace stbc {

enum class Family { kDiagonalLayers, kAlamoutiBlocks };
enum class GroupingVariant { kFine, kCoarse };

inline std::string to_string(Family f) {
  return f == Family::kDiagonalLayers ? "sec3" : "sec4";
}

inline Family family_from_string(const std::string& s) {
  if (s == "sec3") return Family::kDiagonalLayers;
  if (s == "sec4") return Family::kAlamoutiBlocks;
  throw InfeasibleError("unknown code family '" + s + "' (expected sec3 or sec4)");
}

struct CodeSpec {
  Family family = Family::kDiagonalLayers;
  int antennas = 0;        // N
  int lambda = 0;          // reals per fine group
  int layers = 0;          // n
  GroupingVariant variant = GroupingVariant::kFine;

  int num_symbols = 0;     // K
  int delay = 0;           // T
  int num_groups = 0;      // g
  Fraction rate;           // complex symbols per channel use, K / 2T
  Fraction worst_case_exponent;  // decoding complexity is M^exponent

  friend bool operator==(const CodeSpec&, const CodeSpec&) = default;
};

inline CodeSpec section3_spec(int antennas, int lambda, int layers) {
  if (antennas < 1 || lambda < 1 || layers < 1)
    throw InfeasibleError("sec3: N, lambda and n must be positive");
  if (lambda > antennas)
    throw InfeasibleError("sec3: lambda=" + std::to_string(lambda) + " exceeds N=" + std::to_string(antennas));
  CodeSpec s;
  s.family = Family::kDiagonalLayers;
  s.antennas = antennas;
  s.lambda = lambda;
  s.layers = layers;
  s.num_symbols = 2 * layers * lambda;
  s.delay = antennas + layers - 1;
  s.num_groups = 2 * layers;
  s.rate = Fraction(layers * lambda, antennas + layers - 1);
  s.worst_case_exponent = Fraction(lambda - 1, 2);
  return s;
}

inline CodeSpec section4_spec(int antennas, int layers, GroupingVariant variant = GroupingVariant::kFine) {
  if (antennas < 2 || antennas % 2 != 0)
    throw InfeasibleError("sec4: N must be even and >= 2 (got " + std::to_string(antennas) + ")");
  if (layers < 1) throw InfeasibleError("sec4: n must be positive");
  CodeSpec s;
  s.family = Family::kAlamoutiBlocks;
  s.antennas = antennas;
  s.lambda = antennas / 2;
  s.layers = layers;
  s.variant = variant;
  s.num_symbols = 2 * layers * antennas;
  s.delay = antennas + 2 * (layers - 1);
  s.num_groups = variant == GroupingVariant::kFine ? 4 * layers : 2 * layers;
  s.rate = Fraction(layers * antennas, antennas + 2 * (layers - 1));
  s.worst_case_exponent = variant == GroupingVariant::kFine ? Fraction(antennas - 2, 4) : Fraction(antennas, 2);
  return s;
}

struct Code {
  CodeSpec spec;
  Design design;
  GroupingScheme grouping;
  RotationMatrix rotation;
};

namespace detail {

inline RVector rotated(const RVector& x, const RMatrix& q) {
  const Eigen::Index lambda = q.rows();
  RVector z(x.size());
  for (Eigen::Index k = 0; k < x.size() / lambda; ++k)
    z.segment(k * lambda, lambda) = q * x.segment(k * lambda, lambda);
  return z;
}

inline CMatrix encode_diagonal_layers(const RVector& x, int antennas, int lambda, int layers, const RMatrix& q) {
  const RVector z = rotated(x, q);
  CMatrix out = CMatrix::Zero(antennas + layers - 1, antennas);
  for (int m = 0; m < layers; ++m) {
    // v_m(j) = w_m(j mod lambda): d full copies of w_m, then its first r entries.
    for (int j = 0; j < antennas; ++j) {
      const int l = j % lambda;
      out(m + j, j) = Complex(z(2 * m * lambda + l), z((2 * m + 1) * lambda + l));
    }
  }
  return out;
}

inline CMatrix encode_alamouti_blocks(const RVector& x, int antennas, int layers, const RMatrix& q) {
  const int lambda = antennas / 2;
  const RVector z = rotated(x, q);
  CMatrix out = CMatrix::Zero(antennas + 2 * (layers - 1), antennas);
  for (int m = 0; m < layers; ++m) {
    for (int l = 0; l < lambda; ++l) {
      const double a = z(4 * m * lambda + l);
      const double b = z((4 * m + 1) * lambda + l);
      const double c = z((4 * m + 2) * lambda + l);
      const double d = z((4 * m + 3) * lambda + l);
      const int r0 = 2 * (m + l), c0 = 2 * l;
      out(r0, c0) = Complex(a, b);
      out(r0, c0 + 1) = Complex(c, d);
      out(r0 + 1, c0) = Complex(-c, d);
      out(r0 + 1, c0 + 1) = Complex(a, -b);
    }
  }
  return out;
}

inline void require_rotation(const RotationMatrix& q, int lambda) {
  if (q.dimension != lambda || q.entries.rows() != lambda || q.entries.cols() != lambda)
    throw DimensionError("rotation has dimension " + std::to_string(q.dimension) + ", code needs " +
                         std::to_string(lambda));
}

}  // namespace detail

/// Alamouti block in four reals: [[a+ib, c+id], [-c+id, a-ib]].
inline CMatrix alamouti_block(double a, double b, double c, double d) {
  CMatrix blk(2, 2);
  blk << Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b);
  return blk;
}

inline Code build_section3(int antennas, int lambda, int layers, const RotationMatrix& q) {
  CodeSpec spec = section3_spec(antennas, lambda, layers);
  detail::require_rotation(q, lambda);
  const RMatrix rot = q.entries;
  Design design = extract_design(
      [=](const RVector& x) { return detail::encode_diagonal_layers(x, antennas, lambda, layers, rot); },
      spec.num_symbols);
  return {spec, std::move(design), GroupingScheme::contiguous(spec.num_groups, lambda), q};
}

inline Code build_section3(int antennas, int lambda, int layers) {
  return build_section3(antennas, lambda, layers, build_rotation(lambda));
}

inline Code build_section4(int antennas, int layers, const RotationMatrix& q,
                           GroupingVariant variant = GroupingVariant::kFine) {
  CodeSpec spec = section4_spec(antennas, layers, variant);
  detail::require_rotation(q, spec.lambda);
  const RMatrix rot = q.entries;
  Design design = extract_design(
      [=](const RVector& x) { return detail::encode_alamouti_blocks(x, antennas, layers, rot); },
      spec.num_symbols);
  const int lambda = spec.lambda;
  GroupingScheme grouping = variant == GroupingVariant::kFine
                                ? GroupingScheme::contiguous(4 * layers, lambda)
                                : GroupingScheme::contiguous(2 * layers, 2 * lambda);
  return {spec, std::move(design), std::move(grouping), q};
}

inline Code build_section4(int antennas, int layers, GroupingVariant variant = GroupingVariant::kFine) {
  if (antennas < 2 || antennas % 2 != 0)
    throw InfeasibleError("sec4: N must be even and >= 2 (got " + std::to_string(antennas) + ")");
  return build_section4(antennas, layers, build_rotation(antennas / 2), variant);
}

/// Scales the design so that E ||X||_F^2 / T = 1 for independent zero-mean
/// symbols of common energy per_symbol_energy.
inline Design normalize_power(const Design& d, double per_symbol_energy) {
  if (!(per_symbol_energy > 0.0)) throw std::invalid_argument("normalize_power: energy must be positive");
  double total = 0.0;
  for (const auto& a : d.weights()) total += a.squaredNorm();
  if (total <= 0.0) throw std::invalid_argument("normalize_power: all-zero design");
  return d.with_power_scale(std::sqrt(d.delay() / (per_symbol_energy * total)));
}

/// Each real PAM symbol carries half of a unit-energy complex symbol.
inline constexpr double kRealSymbolEnergy = 0.5;

// ---------------------------------------------------------------------------
// Rate / complexity comparison table.

enum class TableFamily { kToeplitz, kC1, kZhangXu, kSection3, kC2, kZhangShi, kSection4 };

inline std::string to_string(TableFamily f) {
  switch (f) {
    case TableFamily::kToeplitz: return "toeplitz";
    case TableFamily::kC1: return "c1";
    case TableFamily::kZhangXu: return "zhang-xu";
    case TableFamily::kSection3: return "sec3";
    case TableFamily::kC2: return "c2";
    case TableFamily::kZhangShi: return "zhang-shi";
    case TableFamily::kSection4: return "sec4";
  }
  return "?";
}

inline const std::vector<TableFamily>& all_table_families() {
  static const std::vector<TableFamily> all = {TableFamily::kToeplitz, TableFamily::kC1,      TableFamily::kZhangXu,
                                               TableFamily::kSection3, TableFamily::kC2,      TableFamily::kZhangShi,
                                               TableFamily::kSection4};
  return all;
}

struct TradeoffRow {
  TableFamily family;
  int antennas = 0;
  int delay = 0;
  int num_groups = 0;
  int reals_per_group = 0;
  bool pic_full_diversity = false;  // full diversity with plain PIC (not only PIC-SIC)
  Fraction rate;
  Fraction exponent;
};

inline bool table_family_feasible(TableFamily f, int n, int t) {
  switch (f) {
    case TableFamily::kToeplitz:
    case TableFamily::kZhangXu:
    case TableFamily::kSection3: return n >= 1 && t >= n;
    case TableFamily::kC1: return n == 2 && t == 3;
    case TableFamily::kC2: return n == 4 && t == 6;
    case TableFamily::kZhangShi:
    case TableFamily::kSection4: return n >= 2 && n % 2 == 0 && t % 2 == 0 && t >= n;
  }
  return false;
}

/// Closed-form rate and worst-case exponent for each requested family at
/// (N, T). The diagonal-layer family contributes one row per lambda = 1..N.
/// An empty family list means "every feasible family".
inline std::vector<TradeoffRow> tabulate_tradeoff(int n, int t, std::vector<TableFamily> families = {}) {
  const bool explicit_request = !families.empty();
  if (!explicit_request) families = all_table_families();
  std::vector<TradeoffRow> rows;
  for (TableFamily f : families) {
    if (!table_family_feasible(f, n, t)) {
      if (explicit_request)
        throw InfeasibleError("tradeoff: family " + to_string(f) + " infeasible at N=" + std::to_string(n) +
                              ", T=" + std::to_string(t));
      continue;
    }
    switch (f) {
      case TableFamily::kToeplitz:
        rows.push_back({f, n, t, 2 * (t - n + 1), 1, true, Fraction(t - n + 1, t), Fraction(0)});
        break;
      case TableFamily::kC1:
        rows.push_back({f, 2, 3, 4, 2, true, Fraction(4, 3), Fraction(1, 2)});
        break;
      case TableFamily::kC2:
        rows.push_back({f, 4, 6, 8, 2, true, Fraction(4, 3), Fraction(1, 2)});
        break;
      case TableFamily::kZhangXu:
        rows.push_back({f, n, t, t - n + 1, 2 * n, t <= n + 1, Fraction(n * (t - n + 1), t), Fraction(n)});
        break;
      case TableFamily::kSection3:
        for (int lambda = 1; lambda <= n; ++lambda)
          rows.push_back({f, n, t, 2 * (t - n + 1), lambda, t <= n + 1, Fraction(lambda * (t - n + 1), t),
                          Fraction(lambda - 1, 2)});
        break;
      case TableFamily::kZhangShi:
        rows.push_back({f, n, t, t - n + 2, n, t <= n + 2, Fraction(n * (t - n + 2), 2 * t), Fraction(n, 2)});
        break;
      case TableFamily::kSection4:
        rows.push_back({f, n, t, 2 * (t - n + 2), n / 2, t <= n + 2, Fraction(n * (t - n + 2), 2 * t),
                        Fraction(n - 2, 4)});
        break;
    }
  }
  if (rows.empty())
    throw InfeasibleError("tradeoff: no family is feasible at N=" + std::to_string(n) + ", T=" + std::to_string(t));
  return rows;
}

}  // namespace stbc
