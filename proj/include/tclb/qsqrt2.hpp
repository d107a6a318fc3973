#pragma once

#include <string>

#include "tclb/rational.hpp"

namespace tclb {

// Element a + b*sqrt(2) of the field Q(sqrt(2)). The distortion constants
// (2-sqrt(2))/4 and (1-2^{-1/2})^{-1} = 2+sqrt(2) live here, so certificates
// can store and compare bounds without any rounding.
struct QSqrt2 {
  Rational a;  // rational part
  Rational b;  // coefficient of sqrt(2)

  QSqrt2() : a(0), b(0) {}
  QSqrt2(Rational ra) : a(std::move(ra)), b(0) {}  // NOLINT(google-explicit-constructor)
  QSqrt2(Rational ra, Rational rb) : a(std::move(ra)), b(std::move(rb)) {}

  bool is_rational() const { return b == 0; }

  QSqrt2 operator+(const QSqrt2& o) const { return {a + o.a, b + o.b}; }
  QSqrt2 operator-(const QSqrt2& o) const { return {a - o.a, b - o.b}; }
  QSqrt2 operator-() const { return {-a, -b}; }
  QSqrt2 operator*(const QSqrt2& o) const {
    return {a * o.a + 2 * b * o.b, a * o.b + b * o.a};
  }

  // (a + b sqrt2)^{-1} = (a - b sqrt2) / (a^2 - 2 b^2)
  QSqrt2 inverse() const {
    Rational norm = a * a - 2 * b * b;
    if (norm == 0) throw std::domain_error("inverse of zero in Q(sqrt2)");
    return {a / norm, -b / norm};
  }
  QSqrt2 operator/(const QSqrt2& o) const { return *this * o.inverse(); }

  // sign of a + b*sqrt(2): decided exactly by comparing a^2 with 2 b^2.
  int sign() const {
    int sa = sgn(a), sb = sgn(b);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: |a| vs |b| sqrt2  <=>  a^2 vs 2 b^2
    Rational lhs = a * a, rhs = 2 * b * b;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
  }

  bool operator==(const QSqrt2& o) const { return a == o.a && b == o.b; }
  bool operator!=(const QSqrt2& o) const { return !(*this == o); }
  bool operator<(const QSqrt2& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const QSqrt2& o) const { return (*this - o).sign() <= 0; }
  bool operator>(const QSqrt2& o) const { return (*this - o).sign() > 0; }
  bool operator>=(const QSqrt2& o) const { return (*this - o).sign() >= 0; }

  double to_double() const { return a.get_d() + b.get_d() * 1.4142135623730950488; }

  std::string str() const {
    if (b == 0) return a.get_str();
    return a.get_str() + " + (" + b.get_str() + ")*sqrt(2)";
  }

 private:
  static int sgn(const Rational& q) { return mpq_sgn(q.get_mpq_t()); }
};

inline QSqrt2 sqrt2() { return {Rational(0), Rational(1)}; }

// (2 - sqrt 2)/4, the constant of the development distortion bound.
inline QSqrt2 two_minus_sqrt2_over_4() { return {Rational(1, 2), Rational(-1, 4)}; }

// (1 - 2^{-1/2})^{-1} = 2 + sqrt 2, the development Sobolev constant.
inline QSqrt2 sobolev_dev_constant() { return {Rational(2), Rational(1)}; }

}  // namespace tclb
