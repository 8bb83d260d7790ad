#pragma once

// Quasi-static Rayleigh flat fading: Y = sqrt(snr) X H + W, with H and W
// i.i.d. CN(0, 1). Real symbols come from Gray-mapped sqrt(M)-PAM scaled to
// energy 1/2, so a pair of them forms a unit-energy square-QAM symbol.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stbc/types.hpp"

namespace stbc {

class PamAlphabet {
 public:
  /// qam_order is the complex constellation size M (4, 16, 64, ...).
  explicit PamAlphabet(int qam_order) : qam_order_(qam_order) {
    int bits = 0;
    while ((1 << (2 * bits)) < qam_order) ++bits;
    if (qam_order < 4 || (1 << (2 * bits)) != qam_order)
      throw InfeasibleError("PamAlphabet: M=" + std::to_string(qam_order) + " is not a power of 4 (square QAM only)");
    bits_ = bits;
    const int size = 1 << bits;
    const double scale = std::sqrt(0.5 * 3.0 / (size * size - 1.0));
    levels_.resize(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) levels_[static_cast<size_t>(i)] = (2 * i - (size - 1)) * scale;
    spacing_ = 2 * scale;
  }

  [[nodiscard]] int qam_order() const { return qam_order_; }
  [[nodiscard]] int size() const { return static_cast<int>(levels_.size()); }
  [[nodiscard]] int bit_width() const { return bits_; }
  [[nodiscard]] const std::vector<double>& levels() const { return levels_; }
  [[nodiscard]] double level(int i) const { return levels_[static_cast<size_t>(i)]; }
  [[nodiscard]] double spacing() const { return spacing_; }

  /// Index of the nearest level; ties go to the lower index.
  [[nodiscard]] int nearest_index(double v) const {
    const double t = (v - levels_.front()) / spacing_;
    if (!(t > 0.0)) return 0;  // also catches NaN
    const double f = std::floor(t);
    int i = static_cast<int>(f) + (t - f > 0.5 ? 1 : 0);
    return std::min(i, size() - 1);
  }

  /// Gray label of level i (bit pattern, MSB first when serialized).
  [[nodiscard]] static unsigned gray(unsigned i) { return i ^ (i >> 1); }
  [[nodiscard]] unsigned index_of_gray(unsigned g) const {
    unsigned i = 0;
    for (; g; g >>= 1) i ^= g;
    return i;
  }

  friend bool operator==(const PamAlphabet& a, const PamAlphabet& b) { return a.qam_order_ == b.qam_order_; }

 private:
  int qam_order_;
  int bits_ = 0;
  double spacing_ = 0.0;
  std::vector<double> levels_;
};

using Bits = std::vector<std::uint8_t>;

inline RVector modulate(const Bits& bits, const PamAlphabet& pam) {
  const int w = pam.bit_width();
  if (bits.size() % static_cast<size_t>(w) != 0)
    throw DimensionError("modulate: " + std::to_string(bits.size()) + " bits not divisible by " + std::to_string(w));
  RVector x(static_cast<Eigen::Index>(bits.size()) / w);
  for (Eigen::Index s = 0; s < x.size(); ++s) {
    unsigned g = 0;
    for (int b = 0; b < w; ++b) g = (g << 1) | (bits[static_cast<size_t>(s * w + b)] & 1u);
    x(s) = pam.level(static_cast<int>(pam.index_of_gray(g)));
  }
  return x;
}

inline Bits demap(const RVector& x, const PamAlphabet& pam) {
  const int w = pam.bit_width();
  Bits out;
  out.reserve(static_cast<size_t>(x.size() * w));
  for (double v : x) {
    const unsigned g = PamAlphabet::gray(static_cast<unsigned>(pam.nearest_index(v)));
    for (int b = w - 1; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((g >> b) & 1u));
  }
  return out;
}

struct LinkInstance {
  CMatrix h;  // N x N_r
  CMatrix w;  // T x N_r
  double snr = 0.0;
  [[nodiscard]] int receive_antennas() const { return static_cast<int>(h.cols()); }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Entries with independent N(0, 1/2) real and imaginary parts.
template <class Rng>
CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = nd(rng);
      m(r, c) = Complex(re, nd(rng));
    }
  return m;
}

template <class Rng>
LinkInstance sample_link(int antennas, int receive_antennas, int delay, double snr_db, Rng& rng) {
  if (antennas < 1 || receive_antennas < 1 || delay < 1) throw DimensionError("sample_link: dimensions must be >= 1");
  LinkInstance link;
  link.h = complex_gaussian(antennas, receive_antennas, rng);
  link.w = complex_gaussian(delay, receive_antennas, rng);
  link.snr = db_to_linear(snr_db);
  return link;
}

inline CMatrix transmit(const CMatrix& x, const LinkInstance& link) {
  if (x.cols() != link.h.rows() || x.rows() != link.w.rows())
    throw DimensionError("transmit: codeword is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                         ", link expects " + std::to_string(link.w.rows()) + "x" + std::to_string(link.h.rows()));
  return std::sqrt(link.snr) * (x * link.h) + link.w;
}

/// splitmix64 finalizer; used to derive independent per-trial streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(master) ^ a) ^ b);
}

}  // namespace stbc
