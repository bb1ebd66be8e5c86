#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/jones.hpp"
#include "qtk/qtorus.hpp"
#include "qtk/report.hpp"

namespace qtk {

enum class OperatorName { F, G, P, Q, PQ, R };

inline std::string to_string(OperatorName n) {
  switch (n) {
    case OperatorName::F: return "F";
    case OperatorName::G: return "G";
    case OperatorName::P: return "P";
    case OperatorName::Q: return "Q";
    case OperatorName::PQ: return "PQ";
    case OperatorName::R: return "R";
  }
  return "?";
}

inline std::optional<OperatorName> operator_from_string(const std::string& s) {
  for (auto n : {OperatorName::F, OperatorName::G, OperatorName::P, OperatorName::Q, OperatorName::PQ,
                 OperatorName::R})
    if (to_string(n) == s) return n;
  return std::nullopt;
}

struct NamedOperator {
  OperatorName name;
  std::int64_t a;
  std::int64_t b;
  QTElem element;

  std::string label() const { return to_string(name) + "_{" + std::to_string(a) + "," + std::to_string(b) + "}"; }
};

namespace ops {
inline QTElem T(std::int64_t e) { return QTElem::t(e); }
inline QTElem M(std::int64_t k) { return QTElem::M(k); }
inline QTElem L(std::int64_t l) { return QTElem::L(l); }
}  // namespace ops

namespace detail {
inline void require_generic_pair(std::int64_t a, std::int64_t b) {
  if (a <= 2) throw BadParams("operator requires a > 2");
  TorusKnot check(a, b);
}
inline void require_odd_b(std::int64_t b) {
  if (b < 3 || b % 2 == 0) throw BadParams("operator requires odd b >= 3");
}
}  // namespace detail

/// F_{a,b} = c_3 L^3 + c_2 L^2 + c_1 L + c_0. The inner sign of c_2 is minus:
/// that is the sign for which F annihilates the colored Jones function.
inline NamedOperator build_F(std::int64_t a, std::int64_t b) {
  using namespace ops;
  detail::require_generic_pair(a, b);
  const std::int64_t s = a + b, d = a - b, ab = a * b;
  QTElem c3 = T(2) * (T(2 * s) * M(s) + T(-2 * s) * M(-s)) - T(-2) * (T(2 * d) * M(d) + T(-2 * d) * M(-d));
  QTElem c2 = -(T(-2 * ab) * (T(2) * (T(4 * s) * M(s) + T(-4 * s) * M(-s)) -
                              T(-2) * (T(4 * d) * M(d) + T(-4 * d) * M(-d))));
  QTElem c1 = -(T(-8 * ab) * M(-2 * ab) * c3);
  QTElem c0 = -(T(-4 * ab) * M(-2 * ab) * c2);
  return {OperatorName::F, a, b, c3 * L(3) + c2 * L(2) + c1 * L(1) + c0};
}

/// G_{2,b} = d_2 L^2 + d_1 L + d_0.
inline NamedOperator build_G(std::int64_t b) {
  using namespace ops;
  detail::require_odd_b(b);
  QTElem d2 = T(2) * M(2) - T(-2) * M(-2);
  QTElem d1 = T(-2 * b) * (T(-4 * b) * M(-2 * b) * (T(2) * M(2) - T(-2) * M(-2)) - (T(6) * M(2) - T(-6) * M(-2)));
  QTElem d0 = -(T(-4 * b) * M(-2 * b) * (T(6) * M(2) - T(-6) * M(-2)));
  return {OperatorName::G, 2, b, d2 * L(2) + d1 * L(1) + d0};
}

inline NamedOperator build_P(std::int64_t a, std::int64_t b) {
  using namespace ops;
  detail::require_generic_pair(a, b);
  const std::int64_t ab = a * b;
  QTElem e = T(-10 * ab) * (L(3) * M(2 * ab) + L(-3) * M(-2 * ab)) -
             (T(2 * (a - b)) + T(2 * (b - a))) * T(-4 * ab) * (L(2) * M(2 * ab) + L(-2) * M(-2 * ab)) +
             T(2 * ab) * (L(1) * M(2 * ab) + L(-1) * M(-2 * ab)) - (T(2 * ab) + T(-2 * ab)) * (L(1) + L(-1)) +
             (T(2 * (a - b)) + T(2 * (b - a))) * (T(4 * ab) + T(-4 * ab));
  return {OperatorName::P, a, b, e};
}

/// The second coefficient's q^{-ab} is read as t^{-4ab} (q = t^4).
inline NamedOperator build_Q(std::int64_t a, std::int64_t b) {
  using namespace ops;
  detail::require_generic_pair(a, b);
  const std::int64_t ab = a * b;
  QTElem e = T(-6 * ab) * (L(3) * M(2 * ab) + L(-3) * M(-2 * ab)) -
             (T(2 * (a + b)) + T(-2 * (a + b))) * T(-4 * ab) * (L(2) * M(2 * ab) + L(-2) * M(-2 * ab)) +
             T(-2 * ab) * (L(1) * M(2 * ab) + L(-1) * M(-2 * ab)) - (T(2 * ab) + T(-2 * ab)) * (L(1) + L(-1)) +
             QTElem(2L) * (T(2 * (a + b)) + T(-2 * (a + b)));
  return {OperatorName::Q, a, b, e};
}

inline NamedOperator build_PQ(std::int64_t a, std::int64_t b) {
  return {OperatorName::PQ, a, b, qt_mul(build_P(a, b).element, build_Q(a, b).element)};
}

inline NamedOperator build_R(std::int64_t b) {
  using namespace ops;
  detail::require_odd_b(b);
  QTElem e = T(-4 * b) * (L(2) * M(2 * b) + L(-2) * M(-2 * b)) + (T(2 * b) + T(-2 * b)) * (L(1) + L(-1)) -
             (T(4) + T(-4)) * T(-2 * b) * (L(1) * M(2 * b) + L(-1) * M(-2 * b)) + (M(2 * b) + M(-2 * b)) -
             QTElem(2L) * (T(4) + T(-4));
  return {OperatorName::R, 2, b, e};
}

/// Builds the named operator for K, checking that the family matches.
inline NamedOperator build_operator(OperatorName name, const TorusKnot& K) {
  const bool two = K.two_bridge();
  switch (name) {
    case OperatorName::F:
      if (two) throw BadParams("F requires a > 2");
      return build_F(K.a(), K.b());
    case OperatorName::G:
      if (!two) throw BadParams("G requires a = 2");
      return build_G(K.b());
    case OperatorName::P: return build_P(K.a(), K.b());
    case OperatorName::Q: return build_Q(K.a(), K.b());
    case OperatorName::PQ: return build_PQ(K.a(), K.b());
    case OperatorName::R:
      if (!two) throw BadParams("R requires a = 2");
      return build_R(K.b());
  }
  throw BadParams("unknown operator");
}

/// The recurrence polynomial of K: F_{a,b} for a > 2, G_{2,b} for a = 2.
inline NamedOperator named_alpha(const TorusKnot& K) {
  return K.two_bridge() ? build_G(K.b()) : build_F(K.a(), K.b());
}

// ---------------------------------------------------------------------------
// Verification harness

struct VerifyOptions {
  unsigned workers = 1;
};

namespace detail {

/// Evaluates residual(n) for n in [from, to], sharded across workers by
/// interleaving. Returns the smallest n with a nonzero residual.
template <class Residual>
std::optional<std::pair<std::int64_t, TPoly>> first_failure(std::int64_t from, std::int64_t to,
                                                            const Residual& residual, unsigned workers) {
  if (from > to) return std::nullopt;
  const std::int64_t count = to - from + 1;
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::int64_t>(count, 64))));
  std::atomic<std::int64_t> first{std::numeric_limits<std::int64_t>::max()};
  auto run = [&](unsigned w) {
    for (std::int64_t n = from + w; n <= to; n += workers) {
      if (n >= first.load()) return;
      if (!residual(n).is_zero()) {
        std::int64_t cur = first.load();
        while (n < cur && !first.compare_exchange_weak(cur, n)) {
        }
        return;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  const std::int64_t n = first.load();
  if (n == std::numeric_limits<std::int64_t>::max()) return std::nullopt;
  return std::make_pair(n, residual(n));
}

template <class Residual>
VerifyReport run_indexed(std::string identity, std::int64_t a, std::int64_t b, std::int64_t from,
                         std::int64_t to, const Residual& residual, const VerifyOptions& opt) {
  VerifyReport r;
  r.identity = std::move(identity);
  r.a = a;
  r.b = b;
  r.n_from = from;
  r.n_to = to;
  if (auto fail = first_failure(from, to, residual, opt.workers)) {
    r.passed = false;
    r.witness_n = fail->first;
    r.residual = fail->second.to_string();
  }
  return r;
}

}  // namespace detail

inline VerifyReport verify_annihilation(const QTElem& op, const DiscreteSeq& f, std::int64_t n_from,
                                        std::int64_t n_to, std::string identity = "annihilation",
                                        std::int64_t a = 0, std::int64_t b = 0, const VerifyOptions& opt = {}) {
  return detail::run_indexed(std::move(identity), a, b, n_from, n_to,
                             [&](std::int64_t n) { return apply(op, f, n); }, opt);
}

inline VerifyReport verify_annihilation(const NamedOperator& op, const DiscreteSeq& f, std::int64_t n_from,
                                        std::int64_t n_to, const VerifyOptions& opt = {}) {
  return verify_annihilation(op.element, f, n_from, n_to, to_string(op.name), op.a, op.b, opt);
}

/// Default window start for annihilation runs: operators with L^{-2} (R) or
/// L^{-3} (P, Q, PQ) terms start at 3 and 4 unless the full-Z window is
/// requested.
inline std::int64_t default_annihilation_start(OperatorName name, bool full_z) {
  if (full_z) return 1;
  switch (name) {
    case OperatorName::R: return 3;
    case OperatorName::P:
    case OperatorName::Q:
    case OperatorName::PQ: return 4;
    default: return 1;
  }
}

enum class Recurrence { three_term, two_term };

/// Three-term: J(n+2) = t^{-4ab(n+1)} J(n) + g(n+1)   (a > 2).
/// Two-term:   J(n+1) = -t^{-(4n+2)b} J(n) + t^{-2nb} [2n+1]   (a = 2).
inline VerifyReport verify_recurrence(const TorusKnot& K, Recurrence which, std::int64_t n_from,
                                      std::int64_t n_to, const VerifyOptions& opt = {}) {
  const std::int64_t a = K.a(), b = K.b(), ab = a * b;
  DiscreteSeq J = jones_sequence(K);
  if (which == Recurrence::three_term) {
    if (K.two_bridge()) throw WrongCase("the three-term recurrence requires a, b > 2");
    return detail::run_indexed("recurrence3", a, b, n_from, n_to, [&](std::int64_t n) {
      return J(n + 2) - t_pow(-4 * ab * (n + 1)) * J(n) - g_seq(K, n + 1);
    }, opt);
  }
  if (!K.two_bridge()) throw WrongCase("the two-term recurrence requires a = 2");
  return detail::run_indexed("recurrence2", a, b, n_from, n_to, [&](std::int64_t n) {
    return J(n + 1) + t_pow(-(4 * n + 2) * b) * J(n) - t_pow(-2 * n * b) * quantum_integer(2 * n + 1);
  }, opt);
}

/// (t^2 - t^{-2}) Q J(n) = t^{2ab-2} (lambda_{a+b} - lambda_{a-b}) h(n).
/// `prefactor_exponent` overrides 2ab-2 (used to exhibit that other
/// normalizations of the identity fail).
inline VerifyReport verify_lemma_Q(const TorusKnot& K, std::int64_t n_from, std::int64_t n_to,
                                   const VerifyOptions& opt = {},
                                   std::optional<std::int64_t> prefactor_exponent = std::nullopt) {
  if (K.two_bridge()) throw WrongCase("the Q identity requires a, b > 2");
  const std::int64_t a = K.a(), b = K.b();
  const QTElem Q = build_Q(a, b).element;
  DiscreteSeq J = jones_sequence(K);
  const TPoly lhs_factor = t_pow(2) - t_pow(-2);
  const TPoly rhs_factor = t_pow(prefactor_exponent.value_or(2 * a * b - 2)) * (lambda_poly(a + b) - lambda_poly(a - b));
  return detail::run_indexed("lemmaQ", a, b, n_from, n_to, [&](std::int64_t n) {
    return lhs_factor * apply(Q, J, n) - rhs_factor * h_seq(K, n);
  }, opt);
}

/// P h(n) = 0.
inline VerifyReport verify_lemma_P(const TorusKnot& K, std::int64_t n_from, std::int64_t n_to,
                                   const VerifyOptions& opt = {}) {
  if (K.two_bridge()) throw WrongCase("the P identity requires a, b > 2");
  VerifyReport r = verify_annihilation(build_P(K.a(), K.b()).element, h_sequence(K), n_from, n_to, "lemmaP",
                                       K.a(), K.b(), opt);
  return r;
}

}  // namespace qtk
