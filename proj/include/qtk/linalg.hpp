#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qtk/integer.hpp"

namespace qtk::linalg {

/// Sparse integer vector: (column, nonzero value) sorted by column.
using SparseRow = std::vector<std::pair<std::size_t, Integer>>;

inline SparseRow make_row(std::map<std::size_t, Integer> entries) {
  SparseRow r;
  for (auto& [c, v] : entries)
    if (v != 0) r.emplace_back(c, std::move(v));
  return r;
}

/// gcd of all entries (positive), 0 for the empty row.
inline Integer content(const SparseRow& r) {
  Integer g = 0;
  for (const auto& e : r) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

/// Divides by the content and makes the leading entry positive.
inline void make_primitive(SparseRow& r) {
  if (r.empty()) return;
  Integer g = content(r);
  if (r.front().second < 0) g = -g;
  if (g != 1)
    for (auto& e : r) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
}

/// alpha * x - beta * y.
inline SparseRow combine(const Integer& alpha, const SparseRow& x, const Integer& beta, const SparseRow& y) {
  SparseRow out;
  out.reserve(x.size() + y.size());
  auto i = x.begin(), j = y.begin();
  while (i != x.end() || j != y.end()) {
    if (j == y.end() || (i != x.end() && i->first < j->first)) {
      out.emplace_back(i->first, alpha * i->second);
      ++i;
    } else if (i == x.end() || j->first < i->first) {
      out.emplace_back(j->first, -beta * j->second);
      ++j;
    } else {
      Integer v = alpha * i->second - beta * j->second;
      if (v != 0) out.emplace_back(i->first, std::move(v));
      ++i;
      ++j;
    }
  }
  return out;
}

/// Fraction-free row echelon form over Z. Rows are kept primitive; a new
/// row is reduced by cross-multiplication against the pivot rows, so every
/// intermediate stays integral and no rational arithmetic is needed.
class IntegerEchelon {
 public:
  explicit IntegerEchelon(std::size_t cols) : cols_(cols) {}

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  /// Returns true when the row was independent of the rows so far.
  bool add(SparseRow r) {
    make_primitive(r);
    while (!r.empty()) {
      auto it = pivot_.find(r.front().first);
      if (it == pivot_.end()) {
        pivot_.emplace(r.front().first, rows_.size());
        rows_.push_back(std::move(r));
        return true;
      }
      const SparseRow& p = rows_[it->second];
      Integer g, a, b;
      mpz_gcd(g.get_mpz_t(), p.front().second.get_mpz_t(), r.front().second.get_mpz_t());
      mpz_divexact(a.get_mpz_t(), p.front().second.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(b.get_mpz_t(), r.front().second.get_mpz_t(), g.get_mpz_t());
      r = combine(a, r, b, p);
      make_primitive(r);
    }
    return false;
  }

  /// True if r lies in the row space.
  bool contains(SparseRow r) const {
    make_primitive(r);
    while (!r.empty()) {
      auto it = pivot_.find(r.front().first);
      if (it == pivot_.end()) return false;
      const SparseRow& p = rows_[it->second];
      Integer g, a, b;
      mpz_gcd(g.get_mpz_t(), p.front().second.get_mpz_t(), r.front().second.get_mpz_t());
      mpz_divexact(a.get_mpz_t(), p.front().second.get_mpz_t(), g.get_mpz_t());
      mpz_divexact(b.get_mpz_t(), r.front().second.get_mpz_t(), g.get_mpz_t());
      r = combine(a, r, b, p);
      make_primitive(r);
    }
    return true;
  }

  /// Reduced echelon form: primitive integer rows sorted by pivot column,
  /// each pivot column zero in every other row. Row i over Q with leading 1
  /// is rows[i] / rows[i].front().second.
  std::vector<SparseRow> reduced() const {
    std::vector<SparseRow> R;
    for (const auto& [c, idx] : pivot_) R.push_back(rows_[idx]);
    for (std::size_t i = R.size(); i-- > 0;) {
      const std::size_t c = R[i].front().first;
      const Integer& lead = R[i].front().second;
      for (std::size_t j = 0; j < i; ++j) {
        auto it = std::lower_bound(R[j].begin(), R[j].end(), c,
                                   [](const auto& e, std::size_t col) { return e.first < col; });
        if (it == R[j].end() || it->first != c) continue;
        Integer g, a, b;
        mpz_gcd(g.get_mpz_t(), lead.get_mpz_t(), it->second.get_mpz_t());
        mpz_divexact(a.get_mpz_t(), lead.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(b.get_mpz_t(), it->second.get_mpz_t(), g.get_mpz_t());
        R[j] = combine(a, R[j], b, R[i]);
        make_primitive(R[j]);
      }
    }
    return R;
  }

  /// Integer basis of the right kernel {x : row . x = 0 for all rows}, one
  /// primitive vector per free column, in increasing free-column order.
  std::vector<SparseRow> kernel() const {
    const auto R = reduced();
    std::vector<char> is_pivot(cols_, 0);
    for (const auto& r : R) is_pivot[r.front().first] = 1;
    // column f -> rows with an entry in f
    std::vector<std::vector<std::pair<std::size_t, Integer>>> by_col(cols_);
    for (std::size_t i = 0; i < R.size(); ++i)
      for (std::size_t k = 1; k < R[i].size(); ++k) by_col[R[i][k].first].emplace_back(i, R[i][k].second);
    std::vector<SparseRow> out;
    for (std::size_t f = 0; f < cols_; ++f) {
      if (is_pivot[f]) continue;
      Integer D = 1;
      for (const auto& [i, v] : by_col[f]) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), R[i].front().second.get_mpz_t());
      std::map<std::size_t, Integer> x;
      x[f] = D;
      for (const auto& [i, v] : by_col[f]) {
        Integer q;
        mpz_divexact(q.get_mpz_t(), D.get_mpz_t(), R[i].front().second.get_mpz_t());
        x[R[i].front().first] = -v * q;
      }
      SparseRow row = make_row(std::move(x));
      make_primitive(row);
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  std::size_t cols_;
  std::map<std::size_t, std::size_t> pivot_;  // pivot column -> row index
  std::vector<SparseRow> rows_;
};

}  // namespace qtk::linalg
