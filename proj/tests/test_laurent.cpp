#include <gtest/gtest.h>

#include "qtk/laurent.hpp"
#include "qtk/parser.hpp"
#include "support/random.hpp"

using namespace qtk;
using qtk::testing::Gen;

TEST(Laurent, ZeroAndConstants) {
  EXPECT_TRUE(TPoly().is_zero());
  EXPECT_TRUE(TPoly(0L).is_zero());
  EXPECT_EQ(TPoly().to_string(), "0");
  EXPECT_EQ(TPoly(1L).to_string(), "1");
  EXPECT_EQ(TPoly(-7L).to_string(), "-7");
  EXPECT_TRUE(TPoly(-1L).is_unit());
  EXPECT_FALSE(TPoly(2L).is_unit());
  EXPECT_TRUE(t_pow(-5, Integer(-1)).is_unit());
}

TEST(Laurent, CanonicalText) {
  const TPoly x = t_pow(-2) + t_pow(-18, Integer(-1)) + t_pow(-6) + t_pow(-10);
  EXPECT_EQ(x.to_string(), "-t^-18 + t^-10 + t^-6 + t^-2");
  const MLPoly y = ml_monomial(6, 2) - ml_monomial(6, 1) + ml_monomial(0, 1) - MLPoly(1);
  EXPECT_EQ(y.to_string(), "-1 + L - M^6*L + M^6*L^2");
  EXPECT_EQ((ml_monomial(-1, 1, Integer(3))).to_string(), "3*M^-1*L");
  EXPECT_EQ(t_pow(1).to_string(), "t");
}

TEST(Laurent, CancellationRemovesTerms) {
  const TPoly x = t_pow(3) + t_pow(-1);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_EQ((x + t_pow(3, Integer(-1))).to_string(), "t^-1");
  EXPECT_EQ((x + t_pow(3, Integer(-1))).size(), 1u);
}

TEST(Laurent, KnownProduct) {
  // (t^2 - t^-2)(t^2 + t^-2) = t^4 - t^-4
  EXPECT_EQ((t_pow(2) - t_pow(-2)) * (t_pow(2) + t_pow(-2)), t_pow(4) - t_pow(-4));
  EXPECT_EQ((ml_monomial(0, 1) - MLPoly(1)).pow(2), ml_monomial(0, 2) - ml_monomial(0, 1, Integer(2)) + MLPoly(1));
}

TEST(Laurent, RingAxiomsTPoly) {
  Gen g;
  for (int i = 0; i < 200; ++i) {
    const TPoly x = g.tpoly(), y = g.tpoly(), z = g.tpoly();
    EXPECT_EQ(x + y, y + x);
    EXPECT_EQ(x * y, y * x);
    EXPECT_EQ((x + y) + z, x + (y + z));
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ(x * TPoly(1L), x);
    EXPECT_EQ(x + TPoly(), x);
    EXPECT_TRUE((x + (-x)).is_zero());
  }
}

TEST(Laurent, RingAxiomsMLPoly) {
  Gen g(7);
  for (int i = 0; i < 200; ++i) {
    const MLPoly x = g.mlpoly(), y = g.mlpoly(), z = g.mlpoly();
    EXPECT_EQ(x * y, y * x);
    EXPECT_EQ((x * y) * z, x * (y * z));
    EXPECT_EQ((x + y) * z, x * z + y * z);
    EXPECT_EQ(x - y, -(y - x));
  }
}

TEST(Laurent, PowMatchesRepeatedProduct) {
  Gen g(11);
  for (int i = 0; i < 40; ++i) {
    const TPoly x = g.tpoly(3, 4);
    TPoly acc(1L);
    for (unsigned k = 0; k <= 5; ++k) {
      EXPECT_EQ(x.pow(k), acc);
      acc *= x;
    }
  }
}

TEST(Laurent, ExactDivisionOfProducts) {
  Gen g(13);
  for (int i = 0; i < 100; ++i) {
    const MLPoly x = g.mlpoly(4, 3), y = g.mlpoly(3, 3);
    if (y.is_zero()) continue;
    const auto q = try_divide(x * y, y);
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(*q, x);
  }
  for (int i = 0; i < 100; ++i) {
    const TPoly x = g.tpoly(4, 6), y = g.tpoly(3, 6);
    if (y.is_zero()) continue;
    EXPECT_EQ(divide_exact(x * y, y), x);
  }
}

TEST(Laurent, DivisionByUnitShiftsExponents) {
  EXPECT_EQ(divide_exact(t_pow(5) + t_pow(1), t_pow(2, Integer(-1))), -(t_pow(3) + t_pow(-1)));
}

TEST(Laurent, NonDivisibleThrowsWithWitness) {
  const TPoly num = t_pow(2) + TPoly(1L);
  const TPoly den = t_pow(1) + TPoly(1L);
  EXPECT_FALSE(try_divide(num, den).has_value());
  try {
    divide_exact(num, den);
    FAIL() << "expected NotDivisible";
  } catch (const NotDivisible& e) {
    EXPECT_FALSE(e.witness().empty());
    EXPECT_NE(e.witness(), "0");
  }
  EXPECT_THROW(divide_exact(num, TPoly()), DivisionByZero);
  // 2 does not divide 3 over the integers
  EXPECT_FALSE(try_divide(TPoly(3L), TPoly(2L)).has_value());
  EXPECT_FALSE(try_divide(ml_monomial(0, 1) + MLPoly(1), ml_monomial(1, 0) + MLPoly(1)).has_value());
}

TEST(Laurent, QuantumIntegerOracle) {
  // [k] (t^2 - t^-2) = t^{2k} - t^{-2k}
  const TPoly d = t_pow(2) - t_pow(-2);
  for (std::int64_t k = -20; k <= 20; ++k) {
    EXPECT_EQ(quantum_integer(k) * d, t_pow(2 * k) - t_pow(-2 * k)) << "k=" << k;
    EXPECT_EQ(quantum_integer(-k), -quantum_integer(k));
  }
  EXPECT_TRUE(quantum_integer(0).is_zero());
  EXPECT_EQ(quantum_integer(1), TPoly(1L));
  EXPECT_EQ(quantum_integer(2), t_pow(2) + t_pow(-2));
}

TEST(Laurent, QuantumIntegerAtMinusOne) {
  for (std::int64_t k = -12; k <= 12; ++k) EXPECT_EQ(value_at_minus_one(quantum_integer(k)), Integer(static_cast<long>(k)));
}

TEST(Laurent, BracketIdentity) {
  Gen g(17);
  for (int i = 0; i < 300; ++i) {
    const std::int64_t k = g.uniform(-20, 20), l = g.uniform(-20, 20);
    EXPECT_EQ(quantum_integer(k + l) + quantum_integer(k - l), lambda_poly(l) * quantum_integer(k))
        << "k=" << k << " l=" << l;
  }
}

TEST(Laurent, LambdaIdentity) {
  Gen g(19);
  for (int i = 0; i < 300; ++i) {
    const std::int64_t k = g.uniform(-20, 20), l = g.uniform(-20, 20);
    EXPECT_EQ(lambda_poly(k + l) + lambda_poly(k - l), lambda_poly(k) * lambda_poly(l)) << "k=" << k << " l=" << l;
  }
  EXPECT_EQ(lambda_poly(0), TPoly(2L));
}

TEST(Laurent, Degrees) {
  const TPoly x = t_pow(-7) + t_pow(3, Integer(4));
  EXPECT_EQ(lowest_degree(x), -7);
  EXPECT_EQ(highest_degree(x), 3);
  EXPECT_THROW(lowest_degree(TPoly()), ZeroPolynomial);
  EXPECT_EQ(x.min_exponents()[0], -7);
  EXPECT_EQ(x.coefficient({3}), Integer(4));
  EXPECT_EQ(x.coefficient({0}), Integer(0));
}

TEST(Laurent, EvalM) {
  // t^2 M^3 - M^-1 at M = t^{2n}, n = 2: t^14 - t^-4
  const TMPoly c = tm_monomial(2, 3) - tm_monomial(0, -1);
  EXPECT_EQ(eval_M(c, 2), t_pow(14) - t_pow(-4));
}

TEST(Laurent, JsonRoundTrip) {
  Gen g(23);
  for (int i = 0; i < 50; ++i) {
    const MLPoly x = g.mlpoly();
    EXPECT_EQ(MLPoly::from_json(x.to_json()), x);
  }
  Integer big("123456789012345678901234567890");
  const TPoly y = t_pow(-3, big) + t_pow(2);
  const auto j = y.to_json();
  EXPECT_EQ(TPoly::from_json(j), y);
  EXPECT_TRUE(j.dump().find("\"123456789012345678901234567890\"") != std::string::npos);
}

TEST(Laurent, BigCoefficientsStayExact) {
  const TPoly x = t_pow(1) + TPoly(1L);
  const TPoly p = x.pow(80);
  EXPECT_EQ(p.coefficient({40}), Integer("107507208733336176461620"));  // binomial(80, 40)
  EXPECT_EQ(divide_exact(p, x.pow(79)), x);
}
