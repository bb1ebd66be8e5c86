#include <gtest/gtest.h>

#include "qtk/parser.hpp"
#include "qtk/qtorus.hpp"
#include "support/random.hpp"

using namespace qtk;
using qtk::testing::Gen;

TEST(Parser, Basics) {
  EXPECT_EQ(parse_tpoly("-t^-18 + t^-10 + t^-6 + t^-2"), t_pow(-18, Integer(-1)) + t_pow(-10) + t_pow(-6) + t_pow(-2));
  EXPECT_EQ(parse_tpoly("0"), TPoly());
  EXPECT_EQ(parse_tpoly("t^(-2)"), t_pow(-2));
  EXPECT_EQ(parse_tpoly("(t - t^-1)^2"), t_pow(2) - TPoly(2L) + t_pow(-2));
  EXPECT_EQ(parse_tpoly("3*t*t"), t_pow(2, Integer(3)));
  EXPECT_EQ(parse_mlpoly("(L-1)*(L^2*M^24-1)"),
            ml_monomial(24, 3) - ml_monomial(24, 2) - ml_monomial(0, 1) + MLPoly(1));
  EXPECT_EQ(parse_mlpoly("M^-1"), ml_monomial(-1, 0));
  EXPECT_EQ(parse_tmpoly("t^2*M - M^-1"), tm_monomial(2, 1) - tm_monomial(0, -1));
}

TEST(Parser, PrecedenceAndUnaryMinus) {
  EXPECT_EQ(parse_tpoly("-t^2"), t_pow(2, Integer(-1)));
  EXPECT_EQ(parse_tpoly("2 - 3*t"), TPoly(2L) - t_pow(1, Integer(3)));
  EXPECT_EQ(parse_tpoly("-(t + 1)*t"), -(t_pow(2) + t_pow(1)));
}

TEST(Parser, NegativePowerOnlyForUnits) {
  EXPECT_EQ(parse_mlpoly("(M^2*L)^-2"), ml_monomial(-4, -2));
  EXPECT_EQ(parse_tpoly("(-t)^-1"), t_pow(-1, Integer(-1)));
  EXPECT_THROW(parse_tpoly("(1 + t)^-1"), SyntaxError);
  EXPECT_THROW(parse_tpoly("2^-1"), SyntaxError);
}

TEST(Parser, ErrorsCarryPositions) {
  try {
    parse_tpoly("t + * t");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  try {
    parse_tpoly("t^");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 2u);
  }
  EXPECT_THROW(parse_tpoly("M"), SyntaxError);
  EXPECT_THROW(parse_tpoly("(t + 1"), SyntaxError);
  EXPECT_THROW(parse_tpoly("t t"), SyntaxError);
  EXPECT_THROW(parse_mlpoly(""), SyntaxError);
}

TEST(Parser, RoundTripTPoly) {
  Gen g(31);
  for (int i = 0; i < 200; ++i) {
    const TPoly x = g.tpoly(6, 30);
    EXPECT_EQ(parse_tpoly(x.to_string()), x) << x.to_string();
  }
}

TEST(Parser, RoundTripMLPoly) {
  Gen g(37);
  for (int i = 0; i < 200; ++i) {
    const MLPoly x = g.mlpoly(6, 8);
    EXPECT_EQ(parse_mlpoly(x.to_string()), x) << x.to_string();
  }
}

TEST(Parser, RoundTripQTElem) {
  Gen g(41);
  for (int i = 0; i < 200; ++i) {
    const QTElem x = g.qtelem(5, 4);
    EXPECT_EQ(parse_qtelem(x.to_string()), x) << x.to_string();
  }
}

TEST(Parser, QuantumTorusWrittenOrder) {
  EXPECT_EQ(parse_qtelem("L*M").to_string(), "t^2*M*L");
  EXPECT_EQ(parse_qtelem("M*L"), QTElem::monomial(TPoly(1L), 1, 1));
  EXPECT_EQ(parse_qtelem("(M*L)^-1"), QTElem::monomial(t_pow(2), -1, -1));
  EXPECT_EQ(qt_mul(parse_qtelem("(M*L)^-1"), parse_qtelem("M*L")), QTElem(1L));
  EXPECT_THROW(parse_qtelem("(M + L)^-1"), SyntaxError);
}
