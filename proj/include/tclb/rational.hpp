#pragma once

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>

namespace tclb {

// All quantities in this library are exact rationals. GMP's canonical form
// (lowest terms, positive denominator) is maintained by mpq_class.
using Rational = mpq_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

// Parses "p/q" or "p" with optional leading '-'. Rejects empty parts,
// stray characters, and zero denominators before GMP ever sees the value,
// since mpq canonicalization aborts on q == 0.
inline Rational parse_rational(const std::string& s) {
  auto bad = [&]() -> Rational {
    throw std::invalid_argument("malformed rational: \"" + s + "\"");
  };
  if (s.empty()) return bad();
  std::size_t i = 0;
  if (s[i] == '-') ++i;
  std::size_t num_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == num_begin) return bad();
  mpz_class num(s.substr(0, i));
  mpz_class den(1);
  if (i < s.size()) {
    if (s[i] != '/') return bad();
    ++i;
    std::size_t den_begin = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == den_begin || i != s.size()) return bad();
    den = mpz_class(s.substr(den_begin));
    if (den == 0) throw std::invalid_argument("zero denominator in rational: \"" + s + "\"");
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// mpq_class(num, den) keeps the fraction as written; GMP arithmetic and
// comparisons require canonical form, so every fraction built from parts
// that may share a factor must go through here.
inline Rational make_rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// 2^k for k of either sign.
inline Rational rational_pow2(long k) {
  Rational q;
  if (k >= 0) {
    mpz_class n(1);
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(k));
    q = Rational(n);
  } else {
    mpz_class d(1);
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(-k));
    q = Rational(1, d);
  }
  return q;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace tclb
