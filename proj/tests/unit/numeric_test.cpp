#include <gtest/gtest.h>

#include "boxlab/errors.hpp"
#include "boxlab/numeric.hpp"

using namespace boxlab;

TEST(ParseRational, Fractions) {
  EXPECT_EQ(parse_rational("3/8"), Rational(3, 8));
  EXPECT_EQ(parse_rational(" -2/4 "), Rational(-1, 2));
  EXPECT_EQ(parse_rational("7"), Rational(7));
}

TEST(ParseRational, DecimalsAreExact) {
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("0.015625"), Rational(1, 64));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5E2"), Rational(250));
  EXPECT_EQ(parse_rational("0.1"), Rational(1, 10));
}

TEST(ParseRational, LeadingZerosAreDecimal) {
  EXPECT_EQ(parse_rational("010"), Rational(10));
  EXPECT_EQ(parse_rational("0.0078"), Rational(78, 10000));
  EXPECT_EQ(parse_rational("000"), Rational(0));
}

TEST(ParseRational, RejectsGarbage) {
  EXPECT_THROW(parse_rational(""), InvalidArgument);
  EXPECT_THROW(parse_rational("abc"), InvalidArgument);
  EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
  EXPECT_THROW(parse_rational("1e"), InvalidArgument);
}

TEST(Scalar, FromDoubleRoundTrips) {
  EXPECT_EQ(from_double<Rational>(0.25), Rational(1, 4));
  EXPECT_EQ(to_double(from_double<Rational>(0.1)), 0.1);
}

TEST(Scalar, ToleranceOnlyForFloat) {
  EXPECT_TRUE(approx_equal(1.0, 1.0 + 1e-12));
  EXPECT_FALSE(approx_equal(1.0, 1.0 + 1e-6));
  EXPECT_FALSE(approx_equal(Rational(1), Rational(1) + Rational(1, 1000000000000LL)));
  EXPECT_TRUE(approx_zero(Rational(0)));
}

TEST(Scalar, ToStringIsLocaleFreeAndShortest) {
  EXPECT_EQ(to_string(0.5), "0.5");
  EXPECT_EQ(to_string(Rational(-3, 9)), "-1/3");
  EXPECT_EQ(to_string(1.0), "1");
}
