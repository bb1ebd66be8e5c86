#include <gtest/gtest.h>

#include <json.hpp>

#include "qtk/operators.hpp"
#include "qtk/parser.hpp"

using namespace qtk;

namespace {

const std::vector<TorusKnot> kGeneric{{3, 4}, {3, 5}, {4, 5}, {5, 7}};
const std::vector<TorusKnot> kTwoBridge{{2, 3}, {2, 5}, {2, 7}};

/// F with the inner sign of the L^2 coefficient taken as plus.
QTElem literal_F(std::int64_t a, std::int64_t b) {
  using namespace ops;
  const std::int64_t s = a + b, d = a - b, ab = a * b;
  QTElem c3 = T(2) * (T(2 * s) * M(s) + T(-2 * s) * M(-s)) - T(-2) * (T(2 * d) * M(d) + T(-2 * d) * M(-d));
  QTElem c2 = -(T(-2 * ab) * (T(2) * (T(4 * s) * M(s) + T(-4 * s) * M(-s)) +
                              T(-2) * (T(4 * d) * M(d) + T(-4 * d) * M(-d))));
  QTElem c1 = -(T(-8 * ab) * M(-2 * ab) * c3);
  QTElem c0 = -(T(-4 * ab) * M(-2 * ab) * c2);
  return c3 * L(3) + c2 * L(2) + c1 * L(1) + c0;
}

}  // namespace

TEST(Operators, FLeadingCoefficient) {
  const QTElem F = build_F(3, 4).element;
  const TMPoly c3 = F.l_coefficient(3);
  EXPECT_EQ(c3, parse_tmpoly("t^2*(t^14*M^7 + t^-14*M^-7) - t^-2*(t^-2*M^-1 + t^2*M)"));
  EXPECT_EQ(F.l_range(), (std::pair<std::int64_t, std::int64_t>{0, 3}));
}

TEST(Operators, FCoefficientRelations) {
  for (const auto& K : kGeneric) {
    const std::int64_t ab = K.a() * K.b();
    const QTElem F = build_F(K.a(), K.b()).element;
    const TMPoly shift8 = tm_monomial(-8 * ab, -2 * ab), shift4 = tm_monomial(-4 * ab, -2 * ab);
    EXPECT_EQ(F.l_coefficient(1), -(shift8 * F.l_coefficient(3)));
    EXPECT_EQ(F.l_coefficient(0), -(shift4 * F.l_coefficient(2)));
  }
}

TEST(Operators, GConstantCoefficient) {
  const QTElem G = build_G(3).element;
  EXPECT_EQ(G.l_coefficient(0), parse_tmpoly("-t^-12*M^-6*(t^6*M^2 - t^-6*M^-2)"));
  EXPECT_EQ(G.l_coefficient(2), parse_tmpoly("t^2*M^2 - t^-2*M^-2"));
}

TEST(Operators, Guards) {
  EXPECT_THROW(build_F(2, 3), BadParams);
  EXPECT_THROW(build_F(3, 6), BadParams);
  EXPECT_THROW(build_F(5, 4), BadParams);
  EXPECT_THROW(build_G(4), BadParams);
  EXPECT_THROW(build_G(1), BadParams);
  EXPECT_THROW(build_R(6), BadParams);
  EXPECT_THROW(build_P(2, 5), BadParams);
  EXPECT_THROW(build_operator(OperatorName::F, TorusKnot(2, 3)), BadParams);
  EXPECT_THROW(build_operator(OperatorName::G, TorusKnot(3, 4)), BadParams);
  EXPECT_EQ(operator_from_string("PQ"), OperatorName::PQ);
  EXPECT_FALSE(operator_from_string("X").has_value());
  EXPECT_EQ(build_F(3, 4).label(), "F_{3,4}");
}

TEST(Operators, FAnnihilates) {
  for (const auto& K : kGeneric) {
    const auto r = verify_annihilation(build_F(K.a(), K.b()), jones_sequence(K), 1, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, GAnnihilates) {
  for (const auto& K : kTwoBridge) {
    const auto r = verify_annihilation(build_G(K.b()), jones_sequence(K), 1, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, AnnihilationOnNegativeColors) {
  EXPECT_TRUE(verify_annihilation(build_F(3, 4), jones_sequence(TorusKnot(3, 4)), -20, 0).passed);
  EXPECT_TRUE(verify_annihilation(build_G(3), jones_sequence(TorusKnot(2, 3)), -20, 0).passed);
}

TEST(Operators, PQAnnihilatesOnFullRange) {
  for (const TorusKnot K : {TorusKnot(3, 4), TorusKnot(3, 5)}) {
    const auto r = verify_annihilation(build_PQ(K.a(), K.b()), jones_sequence(K), -20, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, RAnnihilatesOnFullRange) {
  for (const TorusKnot K : {TorusKnot(2, 3), TorusKnot(2, 5)}) {
    const auto r = verify_annihilation(build_R(K.b()), jones_sequence(K), -20, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, PQFactorsInWrittenOrder) {
  EXPECT_EQ(build_PQ(3, 4).element, build_P(3, 4).element * build_Q(3, 4).element);
  EXPECT_NE(build_PQ(3, 4).element, build_Q(3, 4).element * build_P(3, 4).element);
}

TEST(Operators, LiteralLSquaredSignFails) {
  const TorusKnot K(3, 4);
  const auto r = verify_annihilation(literal_F(3, 4), jones_sequence(K), 1, 20, "F-literal", 3, 4);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness_n.has_value());
  EXPECT_EQ(*r.witness_n, 1);
}

TEST(Operators, PerturbedGFailsAtFirstColor) {
  const QTElem G1 = build_G(3).element + QTElem(1L);
  const auto r = verify_annihilation(G1, jones_sequence(TorusKnot(2, 3)), 1, 20, "G+1", 2, 3);
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.witness_n, 1);
  EXPECT_EQ(r.residual, "1");
}

TEST(Operators, WorkersAgree) {
  const TorusKnot K(3, 5);
  const auto J = jones_sequence(K);
  const auto one = verify_annihilation(build_F(3, 5), J, 1, 30, VerifyOptions{1});
  const auto many = verify_annihilation(build_F(3, 5), J, 1, 30, VerifyOptions{6});
  EXPECT_EQ(one.to_json().dump(), many.to_json().dump());
  // first failing n wins regardless of sharding
  const QTElem bad = build_F(3, 5).element + QTElem::L(-1) * QTElem::M(1);
  for (unsigned w : {1U, 3U, 8U}) {
    const auto r = verify_annihilation(bad, J, 2, 30, "bad", 3, 5, VerifyOptions{w});
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.witness_n, 2);
  }
}

TEST(Operators, ThreeTermRecurrence) {
  for (const auto& K : kGeneric) {
    const auto r = verify_recurrence(K, Recurrence::three_term, 1, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
    EXPECT_EQ(r.identity, "recurrence3");
  }
  EXPECT_THROW(verify_recurrence(TorusKnot(2, 3), Recurrence::three_term, 1, 5), WrongCase);
}

TEST(Operators, TwoTermRecurrence) {
  for (const auto& K : kTwoBridge) {
    const auto r = verify_recurrence(K, Recurrence::two_term, 1, 20);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
  EXPECT_THROW(verify_recurrence(TorusKnot(3, 4), Recurrence::two_term, 1, 5), WrongCase);
}

TEST(Operators, LemmaQ) {
  for (const TorusKnot K : {TorusKnot(3, 4), TorusKnot(4, 5), TorusKnot(3, 5), TorusKnot(5, 7)}) {
    const auto r = verify_lemma_Q(K, -5, 15);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, LemmaQWithOtherPrefactorFailsAwayFromZero) {
  for (const TorusKnot K : {TorusKnot(3, 4), TorusKnot(4, 5)}) {
    const std::int64_t ab = K.a() * K.b();
    for (std::int64_t n = -5; n <= 15; ++n) {
      const auto r = verify_lemma_Q(K, n, n, {}, 4 * ab - 2);
      EXPECT_EQ(r.passed, n == 0) << K.label() << " n=" << n;
    }
  }
}

TEST(Operators, LemmaP) {
  for (const TorusKnot K : {TorusKnot(3, 4), TorusKnot(4, 5), TorusKnot(3, 5)}) {
    const auto r = verify_lemma_P(K, -5, 15);
    EXPECT_TRUE(r.passed) << r.to_text();
  }
}

TEST(Operators, SigmaInvariance) {
  for (const auto& K : kGeneric) {
    EXPECT_EQ(sigma(build_P(K.a(), K.b()).element), build_P(K.a(), K.b()).element);
    EXPECT_EQ(sigma(build_Q(K.a(), K.b()).element), build_Q(K.a(), K.b()).element);
    EXPECT_EQ(sigma(build_PQ(K.a(), K.b()).element), build_PQ(K.a(), K.b()).element);
  }
  for (const auto& K : kTwoBridge) EXPECT_EQ(sigma(build_R(K.b()).element), build_R(K.b()).element);
  EXPECT_NE(sigma(build_F(3, 4).element), build_F(3, 4).element);
}

TEST(Operators, DefaultWindows) {
  EXPECT_EQ(default_annihilation_start(OperatorName::PQ, false), 4);
  EXPECT_EQ(default_annihilation_start(OperatorName::R, false), 3);
  EXPECT_EQ(default_annihilation_start(OperatorName::F, false), 1);
  EXPECT_EQ(default_annihilation_start(OperatorName::PQ, true), 1);
}

TEST(Operators, ReportJson) {
  const auto r = verify_annihilation(build_F(3, 4), jones_sequence(TorusKnot(3, 4)), 1, 5);
  EXPECT_EQ(r.to_json().dump(), R"({"identity":"F","status":"pass","a":3,"b":4,"n_from":1,"n_to":5})");
  EXPECT_EQ(r.to_text(), "F a=3 b=4 n=1..5: pass");
  VerifyReport bad;
  bad.identity = "x";
  bad.passed = false;
  bad.witness_n = 2;
  bad.residual = "t";
  const auto j = nlohmann::json::parse(bad.to_json().dump());
  EXPECT_EQ(j["status"], "fail");
  EXPECT_TRUE(j["n_from"].is_null());
  EXPECT_EQ(j["witness_n"], 2);
  EXPECT_EQ(j["residual"], "t");
}
