#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtk/jones.hpp"
#include "qtk/laurent.hpp"
#include "qtk/operators.hpp"
#include "qtk/parser.hpp"
#include "qtk/qtorus.hpp"
#include "qtk/report.hpp"

namespace qtk {

struct APoly {
  TorusKnot K;
  MLPoly element;
};

/// (L-1)(L^2 M^{2ab} - 1) for a > 2 and (L-1)(L M^{2b} + 1) for a = 2.
inline APoly a_polynomial(const TorusKnot& K) {
  const std::int64_t ab = K.a() * K.b();
  const MLPoly Lm1 = ml_monomial(0, 1) - MLPoly(1);
  if (K.two_bridge()) return {K, Lm1 * (ml_monomial(2 * K.b(), 1) + MLPoly(1))};
  return {K, Lm1 * (ml_monomial(2 * ab, 2) - MLPoly(1))};
}

/// A' = L^{-1} M^{-ab} A for a > 2, L^{-1} M^{-b} A for a = 2.
inline MLPoly a_prime(const TorusKnot& K) {
  const std::int64_t m = K.two_bridge() ? K.b() : K.a() * K.b();
  return ml_monomial(-m, -1) * a_polynomial(K).element;
}

inline MLPoly sigma_comm(const MLPoly& x) {
  return x.map_exponents([](const MLPoly::Exponent& e) { return MLPoly::Exponent{-e[0], -e[1]}; });
}

/// Embeds a commutative polynomial as the quantum-torus element with the
/// same normal-form coefficients; epsilon(lift(x)) = x.
inline QTElem lift_normal_form(const MLPoly& x) {
  QTElem r;
  for (const auto& t : x.terms()) r.add_term({t.exp[0], t.exp[1]}, TPoly(t.coeff));
  return r;
}

/// A right-hand side of an epsilon display: its text and its value.
struct FactorizationForm {
  std::string display;
  MLPoly value;
};

namespace detail {
inline std::string pw(const std::string& var, std::int64_t e) {
  if (e == 1) return var;
  return var + "^" + std::to_string(e);
}
inline FactorizationForm form(std::string display) {
  MLPoly v = parse_mlpoly(display);
  return {std::move(display), std::move(v)};
}
}  // namespace detail

/// The displayed factorizations of epsilon(op) for each operator family.
inline std::vector<FactorizationForm> epsilon_forms(const NamedOperator& op) {
  using detail::form;
  using detail::pw;
  const std::int64_t a = op.a, b = op.b, ab = a * b;
  const std::string A_ab = "(L-1)*(L^2*" + pw("M", 2 * ab) + "-1)";
  const std::string A_2b = "(L-1)*(L*" + pw("M", 2 * b) + "+1)";
  const std::string pair_ab = "(L^2*" + pw("M", 2 * ab) + "+L^-2*" + pw("M", -2 * ab) + "-2)";
  switch (op.name) {
    case OperatorName::F:
      return {form(pw("M", -2 * ab) + "*(" + pw("M", a) + "-" + pw("M", -a) + ")*(" + pw("M", b) + "-" +
                   pw("M", -b) + ")*" + A_ab)};
    case OperatorName::G:
      return {form(pw("M", -2 * b) + "*(M^2-M^-2)*" + A_2b)};
    case OperatorName::P:
    case OperatorName::Q:
      return {form("(L+L^-1-2)*" + pair_ab)};
    case OperatorName::PQ:
      return {form("(L+L^-1-2)^2*" + pair_ab + "^2"),
              form("L^-2*(L^-1*" + pw("M", -ab) + "*" + A_ab + ")^4")};
    case OperatorName::R:
      return {form("(L+L^-1-2)*(L*" + pw("M", 2 * b) + "+L^-1*" + pw("M", -2 * b) + "+2)"),
              form("(L^-1*" + pw("M", -b) + "*" + A_2b + ")^2")};
  }
  return {};
}

/// epsilon(op) equals every displayed form; the residual is epsilon(op) - form.
inline VerifyReport check_epsilon_factorization(const NamedOperator& op) {
  VerifyReport r;
  r.identity = "epsilon:" + to_string(op.name);
  r.a = op.a;
  r.b = op.b;
  const MLPoly e = epsilon(op.element);
  for (const auto& f : epsilon_forms(op)) {
    MLPoly diff = e - f.value;
    if (!diff.is_zero()) {
      r.passed = false;
      r.residual = diff.to_string();
      break;
    }
  }
  return r;
}

struct DivisionResult {
  bool divisible = false;
  std::optional<MLPoly> quotient;    ///< x / d exactly
  MLPoly unit;                       ///< monomial M^i L^j
  std::optional<MLPoly> normalized;  ///< quotient = unit * normalized, lowest exponents 0
};

/// Divisibility of x by d in Z[M^{±1}, L^{±1}].
inline DivisionResult divides(const MLPoly& d, const MLPoly& x) {
  DivisionResult r;
  r.quotient = try_divide(x, d);
  r.divisible = r.quotient.has_value();
  r.unit = MLPoly(1);
  if (r.quotient && !r.quotient->is_zero()) {
    const auto lo = r.quotient->min_exponents();
    r.unit = ml_monomial(lo[0], lo[1]);
    r.normalized = r.quotient->shifted({-lo[0], -lo[1]});
  } else if (r.quotient) {
    r.normalized = MLPoly();
  }
  return r;
}

/// epsilon(PQ) = L^{-2} A'^4 (a > 2), epsilon(R) = A'^2 (a = 2).
inline VerifyReport check_p_membership_powers(const TorusKnot& K) {
  VerifyReport r;
  r.identity = "p-membership";
  r.a = K.a();
  r.b = K.b();
  const MLPoly Ap = a_prime(K);
  MLPoly lhs, rhs;
  if (K.two_bridge()) {
    lhs = epsilon(build_R(K.b()).element);
    rhs = Ap.pow(2);
  } else {
    lhs = epsilon(build_PQ(K.a(), K.b()).element);
    rhs = ml_monomial(0, -2) * Ap.pow(4);
  }
  MLPoly diff = lhs - rhs;
  if (!diff.is_zero()) {
    r.passed = false;
    r.residual = diff.to_string();
  }
  return r;
}

/// Operational membership in the sigma-invariant part of the ideal A_K t:
/// u must be sigma-fixed and divisible by A_K.
inline bool in_p_ideal(const TorusKnot& K, const MLPoly& u) {
  return sigma_comm(u) == u && divides(a_polynomial(K).element, u).divisible;
}

/// For u in the ideal, writes u = v A' and checks the power identity
/// u^4 = epsilon(lift(v^4 L^2) PQ) (a > 2) or u^2 = epsilon(lift(v^2) R)
/// (a = 2). The lifted multiplier's epsilon-image is sigma-fixed, which is
/// what places the power in the image of the sigma-invariant ideal.
inline VerifyReport check_p_power_witness(const TorusKnot& K, const MLPoly& u) {
  VerifyReport r;
  r.identity = "p-power-witness";
  r.a = K.a();
  r.b = K.b();
  auto fail = [&](std::string why) {
    r.passed = false;
    r.residual = std::move(why);
    return r;
  };
  if (!in_p_ideal(K, u)) return fail("not in the sigma-invariant ideal: " + u.to_string());
  const auto v = try_divide(u, a_prime(K));
  if (!v) return fail("A' does not divide " + u.to_string());
  MLPoly multiplier, power;
  QTElem op;
  if (K.two_bridge()) {
    multiplier = v->pow(2);
    power = u.pow(2);
    op = build_R(K.b()).element;
  } else {
    multiplier = ml_monomial(0, 2) * v->pow(4);
    power = u.pow(4);
    op = build_PQ(K.a(), K.b()).element;
  }
  if (sigma_comm(multiplier) != multiplier) return fail("multiplier not sigma-fixed: " + multiplier.to_string());
  MLPoly diff = power - epsilon(lift_normal_form(multiplier) * op);
  if (!diff.is_zero()) return fail(diff.to_string());
  return r;
}

/// sigma(op) = op as an exact quantum-torus equality.
inline VerifyReport check_sigma_invariance(const NamedOperator& op) {
  VerifyReport r;
  r.identity = "sigma:" + to_string(op.name);
  r.a = op.a;
  r.b = op.b;
  const QTElem diff = sigma(op.element) - op.element;
  if (!diff.is_zero()) {
    r.passed = false;
    r.residual = diff.to_string();
  }
  return r;
}

/// sigma(A') = L^{-1} A' for a > 2 and sigma(A') = -A' for a = 2.
inline VerifyReport check_sigma_a_prime(const TorusKnot& K) {
  VerifyReport r;
  r.identity = "sigma:A'";
  r.a = K.a();
  r.b = K.b();
  const MLPoly Ap = a_prime(K);
  const MLPoly expected = K.two_bridge() ? -Ap : ml_monomial(0, -1) * Ap;
  const MLPoly diff = sigma_comm(Ap) - expected;
  if (!diff.is_zero()) {
    r.passed = false;
    r.residual = diff.to_string();
  }
  return r;
}

/// A sigma-fixed multiple of A': (1 + L^{-1}) A' for a > 2, (M - M^{-1}) A'
/// for a = 2.
inline MLPoly sample_p_element(const TorusKnot& K) {
  const MLPoly v = K.two_bridge() ? ml_monomial(1, 0) - ml_monomial(-1, 0) : MLPoly(1) + ml_monomial(0, -1);
  return v * a_prime(K);
}

}  // namespace qtk
