#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qtk/errors.hpp"
#include "qtk/integer.hpp"
#include "qtk/laurent.hpp"

namespace qtk {

/// Recursive-descent parser for integer-coefficient expressions
///
///   expr  := [+|-] term { (+|-) term }
///   term  := power { '*' power }
///   power := atom [ '^' exponent ]
///   atom  := integer | identifier | '(' expr ')'
///
/// Products are formed in the written order, so noncommutative algebras get
/// their commutation factors from `Algebra::mul`. The algebra supplies
/// `Value`, `integer`, `variable` (nullopt for unknown names), `add`, `sub`,
/// `mul`, `neg` and `power` (nullopt when a negative power does not exist).
template <class Algebra>
class ExpressionParser {
 public:
  using Value = typename Algebra::Value;

  ExpressionParser(std::string_view text, Algebra algebra = {})
      : text_(text), alg_(std::move(algebra)) {}

  Value parse() {
    skip_space();
    if (at_end()) throw SyntaxError("empty expression", pos_);
    Value v = expr();
    skip_space();
    if (!at_end()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return v;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Value expr() {
    bool negate = false;
    if (accept('-'))
      negate = true;
    else
      accept('+');
    Value v = term();
    if (negate) v = alg_.neg(v);
    for (;;) {
      if (accept('+'))
        v = alg_.add(v, term());
      else if (accept('-'))
        v = alg_.sub(v, term());
      else
        return v;
    }
  }

  Value term() {
    Value v = power();
    while (accept('*')) v = alg_.mul(v, power());
    return v;
  }

  Value power() {
    Value base = atom();
    skip_space();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    const std::int64_t e = exponent();
    auto r = alg_.power(base, e);
    if (!r) throw SyntaxError("negative power of a non-invertible element", at);
    return *r;
  }

  std::int64_t exponent() {
    skip_space();
    if (accept('(')) {
      const std::int64_t e = signed_integer();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return e;
    }
    return signed_integer();
  }

  std::int64_t signed_integer() {
    skip_space();
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    skip_space();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError("expected integer exponent", start);
    if (pos_ - start > 17) throw SyntaxError("exponent out of range", start);
    std::int64_t v = std::stoll(std::string(text_.substr(start, pos_ - start)));
    return negative ? -v : v;
  }

  Value atom() {
    skip_space();
    if (at_end()) throw SyntaxError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = expr();
      if (!accept(')')) throw SyntaxError("expected ')'", pos_);
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return alg_.integer(Integer(std::string(text_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      auto v = alg_.variable(name);
      if (!v) throw SyntaxError("unknown symbol '" + std::string(name) + "'", start);
      return *v;
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view text_;
  Algebra alg_;
  std::size_t pos_ = 0;
};

/// Algebra adaptor for the commutative Laurent rings.
template <std::size_t N, class V>
struct LaurentAlgebra {
  using Value = Laurent<N, V>;
  Value integer(const Integer& c) const { return Value(c); }
  std::optional<Value> variable(std::string_view name) const {
    for (std::size_t i = 0; i < N; ++i)
      if (V::names[i] == name) {
        typename Value::Exponent e{};
        e[i] = 1;
        return Value::monomial(e);
      }
    return std::nullopt;
  }
  Value add(const Value& a, const Value& b) const { return a + b; }
  Value sub(const Value& a, const Value& b) const { return a - b; }
  Value mul(const Value& a, const Value& b) const { return a * b; }
  Value neg(const Value& a) const { return -a; }
  std::optional<Value> power(const Value& a, std::int64_t e) const {
    if (e >= 0) return a.pow(static_cast<unsigned>(e));
    if (!a.is_unit()) return std::nullopt;
    const auto& t = a.terms().front();
    typename Value::Exponent inv;
    for (std::size_t i = 0; i < N; ++i) inv[i] = -t.exp[i];
    return Value::monomial(t.coeff, inv).pow(static_cast<unsigned>(-e));
  }
};

inline TPoly parse_tpoly(std::string_view s) {
  return ExpressionParser<LaurentAlgebra<1, TVars>>(s).parse();
}
inline MLPoly parse_mlpoly(std::string_view s) {
  return ExpressionParser<LaurentAlgebra<2, MLVars>>(s).parse();
}
inline TMPoly parse_tmpoly(std::string_view s) {
  return ExpressionParser<LaurentAlgebra<2, TMVars>>(s).parse();
}

}  // namespace qtk
