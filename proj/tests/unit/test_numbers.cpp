#include <catch2/catch_amalgamated.hpp>

#include "tclb/qsqrt2.hpp"
#include "tclb/rational.hpp"
#include "tclb/sqrtcert.hpp"

using namespace tclb;

TEST_CASE("rational parsing accepts canonical forms") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("0") == 0);
  CHECK(to_string(Rational(3, 4)) == "3/4");
  CHECK(to_string(Rational(-2)) == "-2");
}

TEST_CASE("rational parsing rejects malformed input") {
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("/2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/2/3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1 /2"), std::invalid_argument);
}

TEST_CASE("rational_pow2") {
  CHECK(rational_pow2(0) == 1);
  CHECK(rational_pow2(5) == 32);
  CHECK(rational_pow2(-3) == Rational(1, 8));
}

TEST_CASE("Q(sqrt2) arithmetic and ordering") {
  QSqrt2 r2 = sqrt2();
  CHECK((r2 * r2) == QSqrt2(Rational(2)));
  // (2 - sqrt2)/4 * (2 + sqrt2) = (4 - 2)/4 = 1/2
  CHECK((two_minus_sqrt2_over_4() * sobolev_dev_constant()) == QSqrt2(Rational(1, 2)));
  CHECK(sobolev_dev_constant().inverse() == QSqrt2(Rational(1), Rational(-1, 2)));

  CHECK(QSqrt2(Rational(3, 2)) > r2);       // 1.5 > 1.414...
  CHECK(QSqrt2(Rational(7, 5)) < r2);       // 1.4 < sqrt2
  CHECK(QSqrt2(Rational(0)) < r2);
  CHECK((QSqrt2(Rational(-3), Rational(2)) < QSqrt2(Rational(0))));  // 2 sqrt2 < 3
  CHECK((QSqrt2(Rational(3), Rational(-2)) > QSqrt2(Rational(0))));
  CHECK((QSqrt2(Rational(-5), Rational(4)) > QSqrt2(Rational(0))));  // 4 sqrt2 > 5
  CHECK((r2 - r2).sign() == 0);
}

TEST_CASE("sqrt sum folds perfect and 2x-perfect squares into the field") {
  SqrtSum s;
  s.add_sqrt(Rational(1), Rational(9, 4));  // = 3/2
  s.add_sqrt(Rational(1, 2), Rational(2));  // = sqrt2/2
  CHECK(s.compare(QSqrt2(Rational(3, 2), Rational(1, 2))) == 0);
  CHECK(s.le(QSqrt2(Rational(3, 2), Rational(1, 2))));
  CHECK(!s.le(QSqrt2(Rational(3, 2), Rational(499, 1000))));
}

TEST_CASE("sqrt sum decides strict comparisons outside the field") {
  SqrtSum s;
  s.add_sqrt(Rational(1), Rational(3));  // sqrt3 = 1.732...
  CHECK(s.le(QSqrt2(Rational(7, 4))));   // 1.75
  CHECK(!s.le(QSqrt2(Rational(173, 100))));
  SqrtSum t;
  t.add_sqrt(Rational(1), Rational(3));
  t.add_sqrt(Rational(1), Rational(5));  // sqrt3 + sqrt5 = 3.9681...
  CHECK(!t.le(sqrt2() * QSqrt2(Rational(14, 5))));  // 2.8 sqrt2 = 3.9597...
  CHECK(t.compare(sqrt2() * QSqrt2(Rational(14, 5))) > 0);
  CHECK(t.le(sqrt2() * QSqrt2(Rational(141, 50))));  // 2.82 sqrt2 = 3.9881...
}

TEST_CASE("sqrt sum against zero and empty") {
  SqrtSum s;
  CHECK(s.le(QSqrt2(Rational(0))));
  CHECK(s.compare(QSqrt2(Rational(0))) == 0);
  s.add_sqrt(Rational(1, 3), Rational(0));
  s.add_sqrt(Rational(0), Rational(5));
  CHECK(s.compare(QSqrt2(Rational(0))) == 0);
}
