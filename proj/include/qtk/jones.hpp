#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/laurent.hpp"
#include "qtk/qtorus.hpp"

namespace qtk {

/// The (a,b) torus knot with gcd(a,b) = 1 and 2 <= a < b.
class TorusKnot {
 public:
  TorusKnot(std::int64_t a, std::int64_t b) : a_(a), b_(b) {
    if (a < 2 || b < 2) throw BadParams("torus knot parameters must satisfy a, b >= 2");
    if (std::gcd(a, b) != 1) throw BadParams("torus knot parameters must be coprime");
    if (a >= b) throw BadParams("torus knot parameters must satisfy a < b");
  }
  std::int64_t a() const noexcept { return a_; }
  std::int64_t b() const noexcept { return b_; }
  bool two_bridge() const noexcept { return a_ == 2; }
  std::string label() const { return "T(" + std::to_string(a_) + "," + std::to_string(b_) + ")"; }
  bool operator==(const TorusKnot&) const = default;

 private:
  std::int64_t a_, b_;
};

inline std::vector<TorusKnot> suite_knots() {
  return {{2, 3}, {2, 5}, {2, 7}, {3, 4}, {3, 5}, {4, 5}, {5, 7}};
}

/// Dense coefficient array: coeff[i] is the coefficient of t^{lo + i}.
/// Colored Jones coefficients are bounded by n in absolute value, so 64-bit
/// storage is exact.
struct DenseJones {
  std::int64_t lo = 0;
  std::vector<std::int64_t> coeff;
  bool is_zero() const { return coeff.empty(); }
  std::int64_t hi() const { return lo + static_cast<std::int64_t>(coeff.size()) - 1; }
};

/// Colored Jones polynomial as a dense array, J(1) = 1, J(-n) = -J(n).
/// For n >= 1 the doubled index m = 2j runs over -(n-1), -(n-1)+2, ..., n-1:
///   J(n) = t^{-ab(n^2-1)} sum_m t^{ab m^2 + 2bm} [am + 1].
inline DenseJones colored_jones_dense(const TorusKnot& K, std::int64_t n) {
  DenseJones out;
  if (n == 0) return out;
  const bool negate = n < 0;
  if (negate) n = -n;
  const std::int64_t a = K.a(), b = K.b(), ab = a * b;
  std::int64_t lo = 0, hi = 0;
  for (std::int64_t m = -(n - 1); m <= n - 1; m += 2) {
    const std::int64_t base = ab * m * m + 2 * b * m, w = 2 * (std::llabs(a * m + 1) - 1);
    if (m == -(n - 1) || base - w < lo) lo = base - w;
    if (m == -(n - 1) || base + w > hi) hi = base + w;
  }
  std::vector<std::int64_t> dense(static_cast<std::size_t>(hi - lo + 1), 0);
  for (std::int64_t m = -(n - 1); m <= n - 1; m += 2) {
    const std::int64_t k = a * m + 1, base = ab * m * m + 2 * b * m;
    const std::int64_t s = (k > 0) != negate ? 1 : -1, kk = std::llabs(k);
    for (std::int64_t e = -2 * (kk - 1); e <= 2 * (kk - 1); e += 4)
      dense[static_cast<std::size_t>(base + e - lo)] += s;
  }
  std::size_t first = 0, last = dense.size();
  while (first < last && dense[first] == 0) ++first;
  while (last > first && dense[last - 1] == 0) --last;
  out.lo = lo + static_cast<std::int64_t>(first) - ab * (n * n - 1);
  out.coeff.assign(dense.begin() + static_cast<std::ptrdiff_t>(first), dense.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

inline TPoly colored_jones(const TorusKnot& K, std::int64_t n) {
  const DenseJones d = colored_jones_dense(K, n);
  std::vector<TPoly::Term> terms;
  for (std::size_t i = 0; i < d.coeff.size(); ++i)
    if (d.coeff[i] != 0)
      terms.push_back({{d.lo + static_cast<std::int64_t>(i)}, Integer(static_cast<long>(d.coeff[i]))});
  return TPoly::from_terms(std::move(terms));
}

/// Closed form for the lowest t-degree of J(n), n >= 1.
inline std::int64_t lowest_degree_formula(const TorusKnot& K, std::int64_t n) {
  if (n < 1) throw BadParams("lowest_degree_formula requires n >= 1");
  const std::int64_t a = K.a(), b = K.b();
  std::int64_t l = -a * b * n * n + a * b;
  if (n % 2 == 0) l += (a - 2) * (b - 2);
  return l;
}

/// g(n) = t^{-2abn} (t^2 lambda_{(a+b)n} - t^{-2} lambda_{(a-b)n}) / (t^2 - t^{-2}).
inline TPoly g_seq(const TorusKnot& K, std::int64_t n) {
  const std::int64_t a = K.a(), b = K.b();
  TPoly num = t_pow(2) * lambda_poly((a + b) * n) - t_pow(-2) * lambda_poly((a - b) * n);
  return t_pow(-2 * a * b * n) * divide_exact(num, t_pow(2) - t_pow(-2));
}

/// h(n) = t^{2abn} lambda_{(a-b)(n+1)} - t^{-2abn} lambda_{(a-b)(n-1)}.
inline TPoly h_seq(const TorusKnot& K, std::int64_t n) {
  const std::int64_t a = K.a(), b = K.b(), c = a - b;
  return t_pow(2 * a * b * n) * lambda_poly(c * (n + 1)) - t_pow(-2 * a * b * n) * lambda_poly(c * (n - 1));
}

inline DiscreteSeq jones_sequence(const TorusKnot& K, std::size_t cache_limit = DiscreteSeq::kUnbounded) {
  return DiscreteSeq("J_" + K.label(), [K](std::int64_t n) { return colored_jones(K, n); }, cache_limit);
}
inline DiscreteSeq g_sequence(const TorusKnot& K) {
  return DiscreteSeq("g_" + K.label(), [K](std::int64_t n) { return g_seq(K, n); });
}
inline DiscreteSeq h_sequence(const TorusKnot& K) {
  return DiscreteSeq("h_" + K.label(), [K](std::int64_t n) { return h_seq(K, n); });
}

}  // namespace qtk
