#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stbc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTolerance = 1e-9;

/// Parameters that cannot produce a code (odd N for the Alamouti family,
/// lambda > N, unsupported rotation dimension, ...). The CLI maps this to
/// exit status 1.
class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shapes or lengths that do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact rational used for rates and complexity exponents so that table
/// comparisons are exact.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Fraction() = default;
  constexpr Fraction(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  [[nodiscard]] constexpr double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend constexpr bool operator==(const Fraction&, const Fraction&) = default;

  friend constexpr Fraction operator*(const Fraction& a, const Fraction& b) {
    return {a.num * b.num, a.den * b.den};
  }
  friend constexpr Fraction operator-(const Fraction& a, const Fraction& b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }

  [[nodiscard]] std::string str() const {
    return den == 1 ? std::to_string(num)
                    : std::to_string(num) + "/" + std::to_string(den);
  }
  friend std::ostream& operator<<(std::ostream& os, const Fraction& f) {
    return os << f.str();
  }
};

}  // namespace stbc
