#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "tclb/qsqrt2.hpp"
#include "tclb/rational.hpp"

namespace tclb {

// A finite sum  sum_i c_i * sqrt(r_i)  with c_i >= 0 and r_i >= 0 rational.
// Comparisons against Q(sqrt2) values are certified exactly: terms whose
// radicand has square-free part 1 or 2 are folded into Q(sqrt2); any residue
// is handled by interval refinement with integer square roots, which
// terminates because a nonempty residue makes the two sides provably unequal
// (square roots of distinct square-free integers are linearly independent
// over Q).
class SqrtSum {
 public:
  void add_sqrt(const Rational& coef, const Rational& radicand) {
    if (coef < 0) throw std::invalid_argument("SqrtSum: negative coefficient");
    if (radicand < 0) throw std::invalid_argument("SqrtSum: negative radicand");
    if (coef == 0 || radicand == 0) return;
    // sqrt(p/q) = sqrt(p*q)/q
    mpz_class m = radicand.get_num() * radicand.get_den();
    Rational c = coef / Rational(radicand.get_den());
    mpz_class root, squarefree;
    split_square(m, root, squarefree);
    c *= Rational(root);
    terms_[squarefree] += c;
  }

  bool empty() const { return terms_.empty(); }

  // True iff  this <= rhs  as real numbers; exact.
  bool le(const QSqrt2& rhs) const { return compare(rhs) <= 0; }
  bool ge(const QSqrt2& rhs) const { return compare(rhs) >= 0; }

  // -1, 0, +1 for this < rhs, == rhs, > rhs.
  int compare(const QSqrt2& rhs) const {
    QSqrt2 in_field(Rational(0), Rational(0));
    std::vector<std::pair<mpz_class, Rational>> residue;
    for (const auto& [sf, c] : terms_) {
      if (c == 0) continue;
      if (sf == 1) {
        in_field.a += c;
      } else if (sf == 2) {
        in_field.b += c;
      } else {
        residue.emplace_back(sf, c);
      }
    }
    QSqrt2 diff = rhs - in_field;  // compare residue vs diff
    if (residue.empty()) return -diff.sign();
    // residue > 0 strictly; if diff <= 0 the sum exceeds rhs.
    if (diff.sign() <= 0) return 1;
    // Both sides positive and provably unequal: refine intervals until split.
    for (unsigned long prec = 16;; prec *= 2) {
      if (prec > 1u << 16)
        throw std::logic_error("SqrtSum::compare: undecided at precision cap");
      Rational lo(0), hi(0);
      for (const auto& [sf, c] : residue) {
        auto [slo, shi] = sqrt_bounds(sf, prec);
        lo += c * slo;
        hi += c * shi;
      }
      auto [rlo, rhi] = qsqrt2_bounds(diff, prec);
      if (hi < rlo) return -1;
      if (lo > rhi) return 1;
    }
  }

  // Decimal rendering for reports (not used in any exact decision).
  double to_double() const {
    double v = 0;
    for (const auto& [sf, c] : terms_) v += c.get_d() * std::sqrt(sf.get_d());
    return v;
  }

 private:
  // Pulls the largest square divisor found by small-prime trial division
  // plus a perfect-square test out of m:  m = root^2 * squarefree.
  static void split_square(mpz_class m, mpz_class& root, mpz_class& squarefree) {
    root = 1;
    if (m == 0) {
      squarefree = 0;
      return;
    }
    for (long p : {2L, 3L, 5L, 7L, 11L, 13L, 17L, 19L, 23L, 29L, 31L, 37L}) {
      mpz_class p2 = mpz_class(p) * p;
      while (mpz_divisible_p(m.get_mpz_t(), p2.get_mpz_t())) {
        m /= p2;
        root *= p;
      }
    }
    if (mpz_perfect_square_p(m.get_mpz_t())) {
      mpz_class s;
      mpz_sqrt(s.get_mpz_t(), m.get_mpz_t());
      root *= s;
      m = 1;
    }
    squarefree = m;
  }

  // [lo, hi] rational enclosure of sqrt(n) with 2^-prec resolution.
  static std::pair<Rational, Rational> sqrt_bounds(const mpz_class& n, unsigned long prec) {
    mpz_class scaled = n;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 2 * prec);
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
    mpz_class den(1);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), prec);
    Rational lo(s, den), hi(s + 1, den);
    lo.canonicalize();
    hi.canonicalize();
    return {lo, hi};
  }

  static std::pair<Rational, Rational> qsqrt2_bounds(const QSqrt2& v, unsigned long prec) {
    auto [slo, shi] = sqrt_bounds(mpz_class(2), prec);
    if (v.b >= 0) return {v.a + v.b * slo, v.a + v.b * shi};
    return {v.a + v.b * shi, v.a + v.b * slo};
  }

  std::map<mpz_class, Rational> terms_;  // square-free radicand -> coefficient
};

}  // namespace tclb
