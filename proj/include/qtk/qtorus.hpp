#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qtk/laurent.hpp"
#include "qtk/parser.hpp"

namespace qtk {

/// Element of the quantum torus Z[t^{±1}]<M^{±1}, L^{±1}> / (LM - t^2 ML),
/// stored in normal form: sum of a_{k,l}(t) M^k L^l with M to the left.
class QTElem {
 public:
  using Key = std::array<std::int64_t, 2>;  // (power of M, power of L)

  QTElem() = default;
  QTElem(long c) : QTElem(TPoly(c)) {}  // NOLINT(google-explicit-constructor)
  explicit QTElem(const TPoly& scalar) {
    if (!scalar.is_zero()) terms_.emplace(Key{0, 0}, scalar);
  }

  static QTElem monomial(const TPoly& coeff, std::int64_t k, std::int64_t l) {
    QTElem r;
    if (!coeff.is_zero()) r.terms_.emplace(Key{k, l}, coeff);
    return r;
  }
  static QTElem M(std::int64_t k = 1) { return monomial(TPoly(1), k, 0); }
  static QTElem L(std::int64_t l = 1) { return monomial(TPoly(1), 0, l); }
  static QTElem t(std::int64_t e = 1) { return monomial(t_pow(e), 0, 0); }

  /// Builds from (key, coefficient) pairs, summing repeated keys.
  static QTElem from_terms(const std::vector<std::pair<Key, TPoly>>& terms) {
    QTElem r;
    for (const auto& [key, c] : terms) r.add_term(key, c);
    return r;
  }

  const std::map<Key, TPoly>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  TPoly coefficient(std::int64_t k, std::int64_t l) const {
    auto it = terms_.find(Key{k, l});
    return it == terms_.end() ? TPoly() : it->second;
  }

  /// Sum over k of a_{k,l}(t) M^k, as a polynomial in (t, M).
  TMPoly l_coefficient(std::int64_t l) const {
    std::vector<TMPoly::Term> out;
    for (const auto& [key, c] : terms_)
      if (key[1] == l)
        for (const auto& tt : c.terms()) out.push_back({{tt.exp[0], key[0]}, tt.coeff});
    return TMPoly::from_terms(std::move(out));
  }

  /// Inclusive (min, max) of the L exponents; requires a nonzero element.
  std::pair<std::int64_t, std::int64_t> l_range() const {
    if (is_zero()) throw ZeroPolynomial("l_range");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& kv : terms_) {
      lo = std::min(lo, kv.first[1]);
      hi = std::max(hi, kv.first[1]);
    }
    return {lo, hi};
  }
  std::pair<std::int64_t, std::int64_t> m_range() const {
    if (is_zero()) throw ZeroPolynomial("m_range");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& kv : terms_) {
      lo = std::min(lo, kv.first[0]);
      hi = std::max(hi, kv.first[0]);
    }
    return {lo, hi};
  }
  std::pair<std::int64_t, std::int64_t> t_range() const {
    if (is_zero()) throw ZeroPolynomial("t_range");
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (const auto& kv : terms_) {
      lo = std::min(lo, lowest_degree(kv.second));
      hi = std::max(hi, highest_degree(kv.second));
    }
    return {lo, hi};
  }

  QTElem operator-() const {
    QTElem r = *this;
    for (auto& kv : r.terms_) kv.second = -kv.second;
    return r;
  }
  QTElem& operator+=(const QTElem& o) {
    for (const auto& [key, c] : o.terms_) add_term(key, c);
    return *this;
  }
  QTElem& operator-=(const QTElem& o) {
    for (const auto& [key, c] : o.terms_) add_term(key, -c);
    return *this;
  }
  friend QTElem operator+(QTElem x, const QTElem& y) { return x += y; }
  friend QTElem operator-(QTElem x, const QTElem& y) { return x -= y; }

  /// Multiplication by a central scalar in Z[t^{±1}].
  friend QTElem operator*(const TPoly& s, const QTElem& x) {
    QTElem r;
    if (s.is_zero()) return r;
    for (const auto& [key, c] : x.terms_) r.terms_.emplace(key, s * c);
    return r;
  }

  friend QTElem operator*(const QTElem& x, const QTElem& y);

  bool operator==(const QTElem& o) const = default;

  std::string to_string() const;

  /// Adds c * M^k L^l (normal-form monomial) in place.
  void add_term(const Key& key, const TPoly& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

 private:
  std::map<Key, TPoly> terms_;
};

/// Normal-form product: (M^k L^l)(M^k' L^l') = t^{2 l k'} M^{k+k'} L^{l+l'}.
inline QTElem qt_mul(const QTElem& x, const QTElem& y) {
  QTElem r;
  for (const auto& [kx, cx] : x.terms())
    for (const auto& [ky, cy] : y.terms()) {
      TPoly c = (cx * cy).shifted({2 * kx[1] * ky[0]});
      r.add_term({kx[0] + ky[0], kx[1] + ky[1]}, c);
    }
  return r;
}

inline QTElem operator*(const QTElem& x, const QTElem& y) { return qt_mul(x, y); }

inline QTElem qt_pow(const QTElem& x, unsigned k) {
  QTElem r(1L);
  for (unsigned i = 0; i < k; ++i) r = r * x;
  return r;
}

/// sigma(a(t) M^k L^l) = a(t) M^{-k} L^{-l} on normal-form terms.
inline QTElem sigma(const QTElem& x) {
  QTElem r;
  for (const auto& [key, c] : x.terms()) r.add_term({-key[0], -key[1]}, c);
  return r;
}

/// Reduction t -> -1 into the commutative ring Z[M^{±1}, L^{±1}].
inline MLPoly epsilon(const QTElem& x) {
  std::vector<MLPoly::Term> out;
  for (const auto& [key, c] : x.terms()) {
    Integer v = value_at_minus_one(c);
    if (v != 0) out.push_back({{key[0], key[1]}, std::move(v)});
  }
  return MLPoly::from_terms(std::move(out));
}

inline std::string QTElem::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    std::string mono = MLPoly::monomial_text({key[0], key[1]});
    if (c.is_monomial()) {
      const auto& tt = c.terms().front();
      const bool negative = tt.coeff < 0;
      out += first ? (negative ? "-" : "") : (negative ? " - " : " + ");
      const Integer mag = abs(tt.coeff);
      std::string body;
      if (mag != 1) body = mag.get_str();
      std::string tpart = TPoly::monomial_text(tt.exp);
      for (const std::string* part : {&tpart, &mono})
        if (!part->empty()) body += (body.empty() ? "" : "*") + *part;
      if (body.empty()) body = "1";
      out += body;
    } else if (mono.empty() && terms_.size() == 1) {
      out += c.to_string();
    } else {
      out += first ? "" : " + ";
      out += "(" + c.to_string() + ")";
      if (!mono.empty()) out += "*" + mono;
    }
    first = false;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const QTElem& x) { return os << x.to_string(); }

/// Parser adaptor: t, M, L generate the torus; products follow written order.
struct QTAlgebra {
  using Value = QTElem;
  Value integer(const Integer& c) const { return QTElem(TPoly(c)); }
  std::optional<Value> variable(std::string_view name) const {
    if (name == "t") return QTElem::t();
    if (name == "M") return QTElem::M();
    if (name == "L") return QTElem::L();
    return std::nullopt;
  }
  Value add(const Value& a, const Value& b) const { return a + b; }
  Value sub(const Value& a, const Value& b) const { return a - b; }
  Value mul(const Value& a, const Value& b) const { return qt_mul(a, b); }
  Value neg(const Value& a) const { return -a; }
  std::optional<Value> power(const Value& a, std::int64_t e) const {
    if (e >= 0) return qt_pow(a, static_cast<unsigned>(e));
    if (a.size() != 1) return std::nullopt;
    const auto& [key, c] = *a.terms().begin();
    if (!c.is_unit()) return std::nullopt;
    // (c M^k L^l)^{-1} = c^{-1} t^{2kl} M^{-k} L^{-l}
    const auto& tt = c.terms().front();
    QTElem inv = QTElem::monomial(t_pow(2 * key[0] * key[1] - tt.exp[0], tt.coeff), -key[0], -key[1]);
    return qt_pow(inv, static_cast<unsigned>(-e));
  }
};

inline QTElem parse_qtelem(std::string_view s) { return ExpressionParser<QTAlgebra>(s).parse(); }

// ---------------------------------------------------------------------------
// Discrete sequences and the action of the torus

/// A function Z -> Z[t^{±1}] given by a named rule, memoized. Copies share
/// one cache. Evaluation is safe from several threads; a value may be
/// computed twice under contention, which is harmless since rules are pure.
class DiscreteSeq {
 public:
  using Rule = std::function<TPoly(std::int64_t)>;
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  DiscreteSeq(std::string name, Rule rule, std::size_t cache_limit = kUnbounded)
      : state_(std::make_shared<State>()) {
    state_->name = std::move(name);
    state_->rule = std::move(rule);
    state_->limit = cache_limit;
  }

  const std::string& name() const { return state_->name; }

  TPoly operator()(std::int64_t n) const {
    {
      std::lock_guard<std::mutex> lock(state_->mu);
      auto it = state_->cache.find(n);
      if (it != state_->cache.end()) return it->second;
    }
    TPoly v = state_->rule(n);
    std::lock_guard<std::mutex> lock(state_->mu);
    if (state_->limit == 0) return v;
    if (state_->cache.emplace(n, v).second) {
      state_->order.push_back(n);
      while (state_->cache.size() > state_->limit) {
        state_->cache.erase(state_->order.front());
        state_->order.pop_front();
      }
    }
    return v;
  }

  std::size_t cached() const {
    std::lock_guard<std::mutex> lock(state_->mu);
    return state_->cache.size();
  }

 private:
  struct State {
    std::string name;
    Rule rule;
    std::size_t limit = kUnbounded;
    mutable std::mutex mu;
    std::unordered_map<std::int64_t, TPoly> cache;
    std::deque<std::int64_t> order;
  };
  std::shared_ptr<State> state_;
};

/// (x f)(n) = sum a_{k,l}(t) t^{2kn} f(n+l).
inline TPoly apply(const QTElem& x, const DiscreteSeq& f, std::int64_t n) {
  std::map<std::int64_t, std::vector<TPoly::Term>> by_shift;
  for (const auto& [key, c] : x.terms())
    for (const auto& tt : c.terms()) by_shift[key[1]].push_back({{tt.exp[0] + 2 * key[0] * n}, tt.coeff});
  TPoly sum;
  for (auto& [l, terms] : by_shift) {
    TPoly coeff = TPoly::from_terms(std::move(terms));
    if (!coeff.is_zero()) sum += coeff * f(n + l);
  }
  return sum;
}

/// The sequence n -> (x f)(n).
inline DiscreteSeq act(const QTElem& x, const DiscreteSeq& f,
                       std::size_t cache_limit = DiscreteSeq::kUnbounded) {
  return DiscreteSeq("(" + x.to_string() + ")." + f.name(),
                     [x, f](std::int64_t n) { return apply(x, f, n); }, cache_limit);
}

}  // namespace qtk
