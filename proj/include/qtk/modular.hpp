#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/miller_rabin.hpp>

#include "qtk/integer.hpp"

namespace qtk::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u64 kMersenne61 = (u64{1} << 61) - 1;

/// Arithmetic modulo a prime below 2^62. Reduction is specialized for the
/// Mersenne prime 2^61 - 1, which carries almost all of the work.
class Field {
 public:
  explicit Field(u64 p = kMersenne61) : p_(p), mersenne_(p == kMersenne61) {}
  u64 p() const noexcept { return p_; }

  u64 add(u64 a, u64 b) const noexcept {
    u64 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  u64 sub(u64 a, u64 b) const noexcept { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const noexcept { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const noexcept {
    const u128 x = static_cast<u128>(a) * b;
    if (mersenne_) {
      u64 r = static_cast<u64>(x & kMersenne61) + static_cast<u64>(x >> 61);
      r = (r & kMersenne61) + (r >> 61);
      return r >= p_ ? r - p_ : r;
    }
    return static_cast<u64>(x % p_);
  }
  u64 pow(u64 a, std::int64_t e) const {
    if (e < 0) return pow(inv(a), -e);
    u64 r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 a) const { return pow(a, static_cast<std::int64_t>(p_ - 2)); }

  u64 from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p_) : r);
  }
  u64 from_integer(const Integer& z) const {
    Integer r = z % Integer(std::to_string(p_));
    if (r < 0) r += Integer(std::to_string(p_));
    return std::stoull(r.get_str());
  }

 private:
  u64 p_;
  bool mersenne_;
};

/// The n-th prime used for multi-modular work: 2^61-1 first, then primes
/// descending from it (Miller-Rabin, deterministic for this range with the
/// fixed witness count used here).
inline u64 nth_prime(std::size_t index) {
  static std::vector<u64> cache{kMersenne61};
  while (cache.size() <= index) {
    u64 c = cache.back() - 2;
    while (!boost::multiprecision::miller_rabin_test(c, 32)) c -= 2;
    cache.push_back(c);
  }
  return cache[index];
}

// ---------------------------------------------------------------------------
// Dense linear algebra

using Matrix = std::vector<std::vector<u64>>;

/// In-place reduced row echelon form with leftmost pivots. Returns the pivot
/// column of each of the first `rank` rows; rows beyond rank are zero.
inline std::vector<std::size_t> rref(const Field& F, Matrix& A, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < A.size(); ++c) {
    std::size_t sel = r;
    while (sel < A.size() && A[sel][c] == 0) ++sel;
    if (sel == A.size()) continue;
    std::swap(A[r], A[sel]);
    const u64 inv = F.inv(A[r][c]);
    for (std::size_t k = c; k < cols; ++k) A[r][k] = F.mul(A[r][k], inv);
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][c] == 0) continue;
      const u64 f = A[i][c];
      u64* row = A[i].data();
      const u64* piv = A[r].data();
      for (std::size_t k = c; k < cols; ++k)
        if (piv[k]) row[k] = F.sub(row[k], F.mul(f, piv[k]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Kernel basis from an RREF: one vector per free column f, with 1 at f,
/// 0 at the other free columns.
inline Matrix kernel_from_rref(const Field& F, const Matrix& R, const std::vector<std::size_t>& pivots,
                               std::size_t cols, std::vector<std::size_t>* free_out = nullptr) {
  std::vector<char> is_pivot(cols, 0);
  for (auto c : pivots) is_pivot[c] = 1;
  Matrix K;
  std::vector<std::size_t> free_cols;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    free_cols.push_back(f);
    std::vector<u64> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = F.neg(R[i][f]);
    K.push_back(std::move(v));
  }
  if (free_out) *free_out = std::move(free_cols);
  return K;
}

/// Incremental row echelon form (not reduced) with dense pivot rows.
class Echelon {
 public:
  Echelon(const Field& F, std::size_t cols) : F_(F), cols_(cols), pivot_of_col_(cols, -1) {}

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  /// Reduces `v` (dense, length cols) and keeps it if independent.
  bool add(std::vector<u64> v) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (v[c] == 0) continue;
      const int pr = pivot_of_col_[c];
      if (pr < 0) {
        const u64 inv = F_.inv(v[c]);
        for (std::size_t k = c; k < cols_; ++k)
          if (v[k]) v[k] = F_.mul(v[k], inv);
        pivot_of_col_[c] = static_cast<int>(rows_.size());
        pivot_cols_.push_back(c);
        rows_.push_back(std::move(v));
        return true;
      }
      const u64 f = v[c];
      const std::vector<u64>& p = rows_[static_cast<std::size_t>(pr)];
      for (std::size_t k = c; k < cols_; ++k)
        if (p[k]) v[k] = F_.sub(v[k], F_.mul(f, p[k]));
    }
    return false;
  }

  /// Kernel basis (free-column normalized) of the rows added so far.
  Matrix kernel(std::vector<std::size_t>* free_out = nullptr) const {
    Matrix R;
    std::vector<std::size_t> order(rows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return pivot_cols_[x] < pivot_cols_[y]; });
    std::vector<std::size_t> pivots;
    for (auto i : order) {
      R.push_back(rows_[i]);
      pivots.push_back(pivot_cols_[i]);
    }
    // back substitution to reduced form
    for (std::size_t i = R.size(); i-- > 0;) {
      const std::size_t c = pivots[i];
      for (std::size_t j = 0; j < i; ++j) {
        const u64 f = R[j][c];
        if (f == 0) continue;
        for (std::size_t k = c; k < cols_; ++k)
          if (R[i][k]) R[j][k] = F_.sub(R[j][k], F_.mul(f, R[i][k]));
      }
    }
    return kernel_from_rref(F_, R, pivots, cols_, free_out);
  }

 private:
  Field F_;
  std::size_t cols_;
  std::vector<int> pivot_of_col_;
  std::vector<std::size_t> pivot_cols_;
  Matrix rows_;
};

// ---------------------------------------------------------------------------
// Univariate polynomials over F_p, dense coefficient vectors low -> high with
// no trailing zeros. The zero polynomial is the empty vector.

using Poly = std::vector<u64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}
inline std::int64_t degree(const Poly& a) { return static_cast<std::int64_t>(a.size()) - 1; }

inline Poly sub(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = F.sub(r[i], b[i]);
  trim(r);
  return r;
}

inline Poly mul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

/// Quotient and remainder; b must be nonzero.
inline std::pair<Poly, Poly> divmod(const Field& F, Poly a, const Poly& b) {
  if (a.size() < b.size()) return {{}, a};
  Poly q(a.size() - b.size() + 1, 0);
  const u64 inv = F.inv(b.back());
  for (std::size_t s = q.size(); s-- > 0;) {
    const u64 c = F.mul(a[s + b.size() - 1], inv);
    q[s] = c;
    if (c)
      for (std::size_t i = 0; i < b.size(); ++i) a[s + i] = F.sub(a[s + i], F.mul(c, b[i]));
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline Poly monic(const Field& F, Poly a) {
  if (a.empty()) return a;
  const u64 inv = F.inv(a.back());
  for (auto& x : a) x = F.mul(x, inv);
  return a;
}

inline Poly gcd(const Field& F, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = divmod(F, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

inline Poly lcm(const Field& F, const Poly& a, const Poly& b) {
  return monic(F, divmod(F, mul(F, a, b), gcd(F, a, b)).first);
}

inline u64 eval(const Field& F, const Poly& a, u64 x) {
  u64 r = 0;
  for (std::size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

/// Interpolation through a fixed set of distinct nodes (Newton form), with
/// the inverse node differences precomputed once.
class Interpolator {
 public:
  Interpolator(const Field& F, std::vector<u64> xs) : F_(F), xs_(std::move(xs)) {
    const std::size_t n = xs_.size();
    inv_.resize(n);
    for (std::size_t j = 1; j < n; ++j) {
      inv_[j].resize(n);
      for (std::size_t i = j; i < n; ++i) inv_[j][i] = F_.inv(F_.sub(xs_[i], xs_[i - j]));
    }
  }
  std::size_t size() const noexcept { return xs_.size(); }

  Poly operator()(const std::vector<u64>& ys) const {
    const std::size_t n = xs_.size();
    std::vector<u64> c(ys);
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = n - 1; i >= j; --i) {
        c[i] = F_.mul(F_.sub(c[i], c[i - 1]), inv_[j][i]);
        if (i == j) break;
      }
    Poly r;
    for (std::size_t k = n; k-- > 0;) {
      // r = r * (x - xs[k]) + c[k]
      Poly nr(r.size() + 1, 0);
      for (std::size_t i = 0; i < r.size(); ++i) {
        nr[i + 1] = F_.add(nr[i + 1], r[i]);
        nr[i] = F_.sub(nr[i], F_.mul(r[i], xs_[k]));
      }
      nr[0] = F_.add(nr[0], c[k]);
      r = std::move(nr);
      trim(r);
    }
    return r;
  }

 private:
  Field F_;
  std::vector<u64> xs_;
  std::vector<std::vector<u64>> inv_;
};

/// prod (x - xs[i]).
inline Poly vanishing(const Field& F, const std::vector<u64>& xs) {
  Poly r{1};
  for (u64 x : xs) r = mul(F, r, Poly{F.neg(x), 1});
  return r;
}

/// Rational function N/D (D monic, coprime to the modulus) agreeing with `u`
/// modulo `m` (deg m = T), chosen by maximal quotient degree. `margin` is the
/// minimum excess of T over deg N + deg D required for acceptance.
inline std::optional<std::pair<Poly, Poly>> rational_reconstruct(const Field& F, const Poly& u, const Poly& m,
                                                                 std::int64_t margin) {
  if (u.empty()) return std::make_pair(Poly{}, Poly{1});
  const std::int64_t T = degree(m);
  Poly r0 = m, r1 = u, v0{}, v1{1};
  std::optional<std::pair<Poly, Poly>> best;
  std::int64_t best_q = -1;
  while (!r1.empty()) {
    auto [q, r2] = divmod(F, r0, r1);
    // candidate (r1, v1); the quotient that produced r2 measures its quality
    const std::int64_t qd = degree(q);
    if (degree(r0) > 0 && qd > best_q && degree(r1) + degree(v1) + margin <= T) {
      best_q = qd;
      best = std::make_pair(r1, v1);
    }
    Poly v2 = sub(F, v0, mul(F, q, v1));
    r0 = std::move(r1);
    r1 = std::move(r2);
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (!best) return std::nullopt;
  auto [N, D] = *best;
  if (gcd(F, D, m).size() != 1) return std::nullopt;
  const u64 inv = F.inv(D.back());
  for (auto& x : N) x = F.mul(x, inv);
  for (auto& x : D) x = F.mul(x, inv);
  return std::make_pair(N, D);
}

// ---------------------------------------------------------------------------
// Lifting residues to rationals

/// Rational n/d with |n|, d <= sqrt(m/2) and n = d u (mod m), if one exists.
inline std::optional<Rational> rational_lift(const Integer& u, const Integer& m) {
  Integer bound;
  mpz_sqrt(bound.get_mpz_t(), Integer(m / 2).get_mpz_t());
  Integer r0 = m, r1 = ((u % m) + m) % m, s0 = 0, s1 = 1;
  while (r1 > bound) {
    Integer q = r0 / r1;
    Integer r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = r1;
    r1 = r2;
    s0 = s1;
    s1 = s2;
  }
  if (s1 == 0 || abs(s1) > bound) return std::nullopt;
  Integer g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), s1.get_mpz_t());
  if (g != 1) return std::nullopt;
  Rational q(r1, s1);
  q.canonicalize();
  return q;
}

/// Chinese remaindering of residues modulo pairwise coprime moduli.
inline std::pair<Integer, Integer> crt(const std::vector<u64>& residues, const std::vector<u64>& primes) {
  Integer x = 0, m = 1;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const Integer p(std::to_string(primes[i]));
    const Integer r(std::to_string(residues[i]));
    // x' = x + m * ((r - x) * m^{-1} mod p)
    Integer minv;
    mpz_invert(minv.get_mpz_t(), Integer(m % p).get_mpz_t(), p.get_mpz_t());
    Integer k = ((r - x) % p + p) % p;
    k = (k * minv) % p;
    x += m * k;
    m *= p;
  }
  return {x, m};
}

}  // namespace qtk::modp
