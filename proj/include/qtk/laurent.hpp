#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtk/errors.hpp"
#include "qtk/integer.hpp"

namespace qtk {

/// Variable names for each Laurent ring. The exponent array of a term is
/// indexed in the same order as `names`.
struct TVars {
  static constexpr std::array<std::string_view, 1> names{"t"};
};
struct MVars {
  static constexpr std::array<std::string_view, 1> names{"M"};
};
struct MLVars {
  static constexpr std::array<std::string_view, 2> names{"M", "L"};
};
struct TMVars {
  static constexpr std::array<std::string_view, 2> names{"t", "M"};
};

/// Sparse Laurent polynomial in N commuting variables with integer
/// coefficients. Terms are kept sorted by exponent (lexicographic) with no
/// zero coefficients, so structural equality is mathematical equality.
template <std::size_t N, class Vars>
class Laurent {
  static_assert(Vars::names.size() == N);

 public:
  using Exponent = std::array<std::int64_t, N>;
  struct Term {
    Exponent exp;
    Integer coeff;
    bool operator==(const Term&) const = default;
  };

  Laurent() = default;
  Laurent(long c) {  // NOLINT(google-explicit-constructor): integer literals
    if (c != 0) terms_.push_back({Exponent{}, Integer(c)});
  }
  explicit Laurent(const Integer& c) {
    if (c != 0) terms_.push_back({Exponent{}, c});
  }

  static Laurent monomial(const Integer& c, const Exponent& e) {
    Laurent r;
    if (c != 0) r.terms_.push_back({e, c});
    return r;
  }
  static Laurent monomial(const Exponent& e) { return monomial(Integer(1), e); }

  /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
  static Laurent from_terms(std::vector<Term> terms) {
    Laurent r;
    r.terms_ = std::move(terms);
    r.normalize();
    return r;
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  Integer coefficient(const Exponent& e) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                               [](const Term& t, const Exponent& x) { return t.exp < x; });
    if (it != terms_.end() && it->exp == e) return it->coeff;
    return Integer(0);
  }

  bool is_monomial() const noexcept { return terms_.size() == 1; }
  /// True for ±(monomial), the units of the ring.
  bool is_unit() const {
    return terms_.size() == 1 && (terms_[0].coeff == 1 || terms_[0].coeff == -1);
  }

  /// Componentwise minimum / maximum exponent; requires a nonzero polynomial.
  Exponent min_exponents() const {
    if (is_zero()) throw ZeroPolynomial("min_exponents");
    Exponent m = terms_.front().exp;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < N; ++i) m[i] = std::min(m[i], t.exp[i]);
    return m;
  }
  Exponent max_exponents() const {
    if (is_zero()) throw ZeroPolynomial("max_exponents");
    Exponent m = terms_.front().exp;
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < N; ++i) m[i] = std::max(m[i], t.exp[i]);
    return m;
  }

  /// Multiplication by the monomial x^delta.
  Laurent shifted(const Exponent& delta) const {
    Laurent r = *this;
    for (auto& t : r.terms_)
      for (std::size_t i = 0; i < N; ++i) t.exp[i] += delta[i];
    return r;  // lexicographic order is translation invariant
  }

  /// Applies an exponent map; the result is re-sorted and combined.
  template <class F>
  Laurent map_exponents(F&& f) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({f(t.exp), t.coeff});
    return from_terms(std::move(out));
  }

  Laurent operator-() const {
    Laurent r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  Laurent& operator+=(const Laurent& o) { return *this = combine(*this, o, false); }
  Laurent& operator-=(const Laurent& o) { return *this = combine(*this, o, true); }
  Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
  Laurent& operator*=(const Integer& c) {
    if (c == 0) {
      terms_.clear();
    } else {
      for (auto& t : terms_) t.coeff *= c;
    }
    return *this;
  }

  friend Laurent operator+(const Laurent& x, const Laurent& y) { return combine(x, y, false); }
  friend Laurent operator-(const Laurent& x, const Laurent& y) { return combine(x, y, true); }
  friend Laurent operator*(Laurent x, const Integer& c) { return x *= c; }
  friend Laurent operator*(const Integer& c, Laurent x) { return x *= c; }

  friend Laurent operator*(const Laurent& x, const Laurent& y) {
    if (x.is_zero() || y.is_zero()) return Laurent();
    const Laurent& small = x.size() <= y.size() ? x : y;
    const Laurent& large = x.size() <= y.size() ? y : x;
    if (small.size() == 1) {
      Laurent r = large.shifted(small.terms_[0].exp);
      if (small.terms_[0].coeff != 1) r *= small.terms_[0].coeff;
      return r;
    }
    std::vector<Term> out;
    out.reserve(small.size() * large.size());
    for (const auto& a : small.terms_)
      for (const auto& b : large.terms_) {
        Exponent e;
        for (std::size_t i = 0; i < N; ++i) e[i] = a.exp[i] + b.exp[i];
        out.push_back({e, a.coeff * b.coeff});
      }
    return from_terms(std::move(out));
  }

  Laurent pow(unsigned k) const {
    Laurent result(1L), base = *this;
    while (k) {
      if (k & 1U) result *= base;
      k >>= 1U;
      if (k) base *= base;
    }
    return result;
  }

  bool operator==(const Laurent& o) const = default;

  /// Canonical text, e.g. `-t^-18 + t^-10 + t^-6 + t^-2` or `3*M^2*L^-1`.
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
      const bool negative = t.coeff < 0;
      if (first) {
        if (negative) out += '-';
      } else {
        out += negative ? " - " : " + ";
      }
      first = false;
      Integer mag = abs(t.coeff);
      std::string mono = monomial_text(t.exp);
      if (mono.empty()) {
        out += mag.get_str();
      } else {
        if (mag != 1) out += mag.get_str() + "*";
        out += mono;
      }
    }
    return out;
  }

  /// Text of x^e without coefficient; empty for the unit monomial.
  static std::string monomial_text(const Exponent& e) {
    std::string out;
    for (std::size_t i = 0; i < N; ++i) {
      if (e[i] == 0) continue;
      if (!out.empty()) out += '*';
      out += Vars::names[i];
      if (e[i] != 1) out += "^" + std::to_string(e[i]);
    }
    return out;
  }

  /// JSON form: array of `[coeff, e_0, ..., e_{N-1}]`, same order as text.
  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms_) {
      nlohmann::json row = nlohmann::json::array();
      if (auto v = to_int64(t.coeff))
        row.push_back(*v);
      else
        row.push_back(t.coeff.get_str());
      for (auto x : t.exp) row.push_back(x);
      arr.push_back(std::move(row));
    }
    return arr;
  }

  static Laurent from_json(const nlohmann::json& j) {
    std::vector<Term> terms;
    for (const auto& row : j) {
      if (!row.is_array() || row.size() != N + 1) throw Error("malformed polynomial JSON");
      Term t;
      t.coeff = row[0].is_string() ? Integer(row[0].get<std::string>())
                                   : from_int64(row[0].get<std::int64_t>());
      for (std::size_t i = 0; i < N; ++i) t.exp[i] = row[i + 1].get<std::int64_t>();
      terms.push_back(std::move(t));
    }
    return from_terms(std::move(terms));
  }

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.exp < b.exp; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size();) {
      Term acc = std::move(terms_[r]);
      std::size_t s = r + 1;
      while (s < terms_.size() && terms_[s].exp == acc.exp) acc.coeff += terms_[s++].coeff;
      if (acc.coeff != 0) terms_[w++] = std::move(acc);
      r = s;
    }
    terms_.resize(w);
  }

  static Laurent combine(const Laurent& x, const Laurent& y, bool subtract) {
    Laurent r;
    r.terms_.reserve(x.size() + y.size());
    auto i = x.terms_.begin(), j = y.terms_.begin();
    while (i != x.terms_.end() || j != y.terms_.end()) {
      if (j == y.terms_.end() || (i != x.terms_.end() && i->exp < j->exp)) {
        r.terms_.push_back(*i++);
      } else if (i == x.terms_.end() || j->exp < i->exp) {
        r.terms_.push_back({j->exp, subtract ? Integer(-j->coeff) : j->coeff});
        ++j;
      } else {
        Integer c = subtract ? Integer(i->coeff - j->coeff) : Integer(i->coeff + j->coeff);
        if (c != 0) r.terms_.push_back({i->exp, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::vector<Term> terms_;
};

template <std::size_t N, class V>
std::ostream& operator<<(std::ostream& os, const Laurent<N, V>& x) {
  return os << x.to_string();
}

using TPoly = Laurent<1, TVars>;
using MPoly = Laurent<1, MVars>;
using MLPoly = Laurent<2, MLVars>;
using TMPoly = Laurent<2, TMVars>;

// ---------------------------------------------------------------------------
// Small constructors

inline TPoly t_pow(std::int64_t e, const Integer& c = Integer(1)) {
  return TPoly::monomial(c, {e});
}

inline MLPoly ml_monomial(std::int64_t m, std::int64_t l, const Integer& c = Integer(1)) {
  return MLPoly::monomial(c, {m, l});
}

inline TMPoly tm_monomial(std::int64_t t, std::int64_t m, const Integer& c = Integer(1)) {
  return TMPoly::monomial(c, {t, m});
}

/// [k] = (t^{2k} - t^{-2k}) / (t^2 - t^{-2}).
inline TPoly quantum_integer(std::int64_t k) {
  if (k == 0) return TPoly();
  if (k < 0) return -quantum_integer(-k);
  std::vector<TPoly::Term> terms;
  terms.reserve(static_cast<std::size_t>(k));
  for (std::int64_t e = -2 * (k - 1); e <= 2 * (k - 1); e += 4) terms.push_back({{e}, Integer(1)});
  return TPoly::from_terms(std::move(terms));
}

/// lambda_k = t^{2k} + t^{-2k}.
inline TPoly lambda_poly(std::int64_t k) { return t_pow(2 * k) + t_pow(-2 * k); }

inline std::int64_t lowest_degree(const TPoly& x) {
  if (x.is_zero()) throw ZeroPolynomial("lowest_degree");
  return x.terms().front().exp[0];
}

inline std::int64_t highest_degree(const TPoly& x) {
  if (x.is_zero()) throw ZeroPolynomial("highest_degree");
  return x.terms().back().exp[0];
}

/// Value of x at t = -1.
inline Integer value_at_minus_one(const TPoly& x) {
  Integer s = 0;
  for (const auto& t : x.terms()) {
    if (t.exp[0] % 2 == 0)
      s += t.coeff;
    else
      s -= t.coeff;
  }
  return s;
}

/// Substitutes M -> t^{2n} in a Laurent polynomial in (t, M).
inline TPoly eval_M(const TMPoly& c, std::int64_t n) {
  std::vector<TPoly::Term> out;
  out.reserve(c.size());
  for (const auto& t : c.terms()) out.push_back({{t.exp[0] + 2 * n * t.exp[1]}, t.coeff});
  return TPoly::from_terms(std::move(out));
}

// ---------------------------------------------------------------------------
// Exact division

namespace detail {

/// Recursive view of a Laurent polynomial: the last variable is the main
/// variable, coefficients live in the ring of the remaining variables.
template <std::size_t N>
struct DivisionTraits;

template <>
struct DivisionTraits<1> {
  using Coeff = Integer;
  static std::optional<Integer> divide(const Integer& a, const Integer& b) {
    if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t())) return std::nullopt;
    Integer q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
  }
  static bool zero(const Integer& a) { return a == 0; }
};

struct CoeffVars {
  static constexpr std::array<std::string_view, 1> names{"x"};
};

template <std::size_t N, class V>
std::optional<Laurent<N, V>> try_divide_impl(const Laurent<N, V>& num, const Laurent<N, V>& den,
                                             std::string* witness);

template <>
struct DivisionTraits<2> {
  using Coeff = Laurent<1, CoeffVars>;
  static std::optional<Coeff> divide(const Coeff& a, const Coeff& b) {
    return try_divide_impl(a, b, nullptr);
  }
  static bool zero(const Coeff& a) { return a.is_zero(); }
};

/// Dense coefficient list in the main (last) variable, starting at degree 0.
template <std::size_t N, class V>
std::vector<typename DivisionTraits<N>::Coeff> split_main(const Laurent<N, V>& x) {
  using C = typename DivisionTraits<N>::Coeff;
  std::int64_t top = 0;
  for (const auto& t : x.terms()) top = std::max(top, t.exp[N - 1]);
  std::vector<C> out(static_cast<std::size_t>(top + 1));
  if constexpr (N == 1) {
    for (const auto& t : x.terms()) out[static_cast<std::size_t>(t.exp[0])] = t.coeff;
  } else {
    std::vector<std::vector<typename C::Term>> buckets(out.size());
    for (const auto& t : x.terms())
      buckets[static_cast<std::size_t>(t.exp[1])].push_back({{t.exp[0]}, t.coeff});
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = C::from_terms(std::move(buckets[i]));
  }
  return out;
}

template <std::size_t N, class V>
Laurent<N, V> join_main(const std::vector<typename DivisionTraits<N>::Coeff>& parts) {
  std::vector<typename Laurent<N, V>::Term> terms;
  for (std::size_t d = 0; d < parts.size(); ++d) {
    if constexpr (N == 1) {
      if (parts[d] != 0) terms.push_back({{static_cast<std::int64_t>(d)}, parts[d]});
    } else {
      for (const auto& t : parts[d].terms())
        terms.push_back({{t.exp[0], static_cast<std::int64_t>(d)}, t.coeff});
    }
  }
  return Laurent<N, V>::from_terms(std::move(terms));
}

template <std::size_t N, class V>
std::optional<Laurent<N, V>> try_divide_impl(const Laurent<N, V>& num, const Laurent<N, V>& den,
                                             std::string* witness) {
  using Tr = DivisionTraits<N>;
  using L = Laurent<N, V>;
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) return L();
  typename L::Exponent lo_n = num.min_exponents(), lo_d = den.min_exponents(), neg_n, neg_d, shift;
  for (std::size_t i = 0; i < N; ++i) {
    neg_n[i] = -lo_n[i];
    neg_d[i] = -lo_d[i];
    shift[i] = lo_n[i] - lo_d[i];
  }
  auto rem = split_main(num.shifted(neg_n));
  const auto dv = split_main(den.shifted(neg_d));
  const std::size_t dd = dv.size() - 1;
  if (rem.size() < dv.size()) {
    if (witness) *witness = num.to_string();
    return std::nullopt;
  }
  std::vector<typename Tr::Coeff> quot(rem.size() - dd);
  for (std::size_t k = rem.size(); k-- > dd;) {
    if (Tr::zero(rem[k])) continue;
    auto c = Tr::divide(rem[k], dv[dd]);
    if (!c) {
      if (witness) *witness = join_main<N, V>(rem).shifted(lo_n).to_string();
      return std::nullopt;
    }
    const std::size_t q = k - dd;
    for (std::size_t i = 0; i <= dd; ++i) rem[q + i] -= *c * dv[i];
    quot[q] = std::move(*c);
  }
  for (const auto& r : rem)
    if (!Tr::zero(r)) {
      if (witness) *witness = join_main<N, V>(rem).shifted(lo_n).to_string();
      return std::nullopt;
    }
  return join_main<N, V>(quot).shifted(shift);
}

}  // namespace detail

/// Exact quotient if `den` divides `num` in the Laurent ring, else nullopt.
template <std::size_t N, class V>
std::optional<Laurent<N, V>> try_divide(const Laurent<N, V>& num, const Laurent<N, V>& den) {
  return detail::try_divide_impl(num, den, nullptr);
}

/// Exact quotient; throws NotDivisible (with the stuck remainder as witness)
/// or DivisionByZero.
template <std::size_t N, class V>
Laurent<N, V> divide_exact(const Laurent<N, V>& num, const Laurent<N, V>& den) {
  std::string witness;
  auto q = detail::try_divide_impl(num, den, &witness);
  if (!q) throw NotDivisible("(" + num.to_string() + ") is not divisible by (" + den.to_string() + ")",
                             witness);
  return *q;
}

}  // namespace qtk
