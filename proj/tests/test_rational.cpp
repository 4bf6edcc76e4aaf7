#include <gtest/gtest.h>

#include <random>

#include "wmds/rational.hpp"

using wmds::Rational;

TEST(Rational, CanonicalForm) {
  Rational a(6, -4);
  EXPECT_EQ(a.str(), "-3/2");
  EXPECT_EQ(Rational(0, 5), Rational(0));
  EXPECT_TRUE(Rational(10, 5).is_integer());
  EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, Parse) {
  EXPECT_EQ(Rational::parse("7/21"), Rational(1, 3));
  EXPECT_EQ(Rational::parse("-5"), Rational(-5));
}

TEST(Rational, OverflowFallsBackToGmp) {
  Rational big(INT64_MAX);
  Rational s = big + big;
  EXPECT_FALSE(s.is_small());
  EXPECT_EQ(s.numerator(), mpz_class(INT64_MAX) * 2);
  s -= big;
  EXPECT_TRUE(s.is_small());
  EXPECT_EQ(s, big);
}

TEST(Rational, PowAndInverse) {
  EXPECT_EQ(Rational::pow(Rational(2, 3), 3), Rational(8, 27));
  EXPECT_EQ(Rational::pow(Rational(2, 3), -2), Rational(9, 4));
  EXPECT_EQ(Rational(13).inverse() * Rational(13), Rational(1));
  EXPECT_THROW(Rational(0).inverse(), std::domain_error);
}

TEST(Rational, AgreesWithMpqOnRandomArithmetic) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> small(-50, 50);
  std::uniform_int_distribution<std::int64_t> huge(INT64_MIN / 2, INT64_MAX / 2);
  Rational acc(1);
  mpq_class ref(1);
  for (int it = 0; it < 2000; ++it) {
    std::int64_t n = (it % 7 == 0) ? huge(rng) : small(rng);
    std::int64_t d = small(rng);
    if (d == 0) d = 3;
    Rational r(n, d);
    mpq_class rq(mpz_class(std::to_string(n)), mpz_class(std::to_string(d)));
    rq.canonicalize();
    switch (it % 4) {
      case 0: acc += r; ref += rq; break;
      case 1: acc -= r; ref -= rq; break;
      case 2: acc *= r; ref *= rq; break;
      default:
        if (!r.is_zero()) {
          acc /= r;
          ref /= rq;
        }
    }
    if (it % 50 == 0) {
      acc = Rational(1);
      ref = 1;
    }
    ASSERT_EQ(acc.to_mpq(), ref) << "step " << it;
  }
}

TEST(Rational, AddProduct) {
  Rational a(1, 2);
  a.add_product(Rational(3, 4), Rational(2, 3));
  EXPECT_EQ(a, Rational(1));
}
