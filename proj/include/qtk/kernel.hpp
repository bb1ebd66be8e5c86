#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qtk/errors.hpp"
#include "qtk/jones.hpp"
#include "qtk/laurent.hpp"
#include "qtk/linalg.hpp"
#include "qtk/modular.hpp"
#include "qtk/qtorus.hpp"

namespace qtk {

/// Bounded search for annihilators of the colored Jones function.
///
/// The search space is every operator sum_{j<=L_degree, k<=M_degree,
/// alpha in t_window} x_{j,k,alpha} t^alpha M^k L^j, and the constraints
/// are (x J)(n) = 0 coefficientwise for n in n_range. The solution space is
/// returned as its reduced row echelon basis over Q (unknowns ordered by
/// (j, k, alpha)), so it is canonical and independent of the route.
///
/// Two routes compute it:
///  * direct: the literal coefficient system, split by the parity of alpha.
///    Rows are screened modulo a prime until the rank stalls; the modular
///    kernel is lifted to Q and each vector is checked exactly against all
///    n. A full-rank screen certifies dimension 0.
///  * structured: the solution space is the set of box vectors whose
///    coefficient vector lies in the Q(t)-kernel S of the sequence matrix
///    A[n][(j,k)] = t^{2kn} J(n+j). The rank of A at random t = tau modulo p
///    bounds dim S from above (full rank certifies dimension 0). Otherwise the
///    free-column kernel basis of A(tau) is sampled at many tau, reconstructed
///    as rational functions, lifted to Q, and verified exactly, which proves
///    it spans S. The box condition on span(S) is then solved exactly with
///    fraction-free elimination.
enum class KernelRoute { automatic, direct, structured };

inline std::string to_string(KernelRoute r) {
  switch (r) {
    case KernelRoute::automatic: return "auto";
    case KernelRoute::direct: return "direct";
    case KernelRoute::structured: return "structured";
  }
  return "?";
}

constexpr std::size_t kDefaultKernelCap = 20000;

/// Cap on the unknown count: QTK_KERNEL_CAP if set to a positive integer.
inline std::size_t default_kernel_cap() {
  if (const char* env = std::getenv("QTK_KERNEL_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultKernelCap;
}

struct KernelQuery {
  TorusKnot K;
  std::int64_t L_degree = 0;
  std::int64_t M_degree = 0;
  std::int64_t t_lo = 0;
  std::int64_t t_hi = 0;
  std::int64_t n_from = 1;
  std::int64_t n_to = 20;
  std::size_t cap = default_kernel_cap();
  KernelRoute route = KernelRoute::automatic;

  std::size_t window() const { return static_cast<std::size_t>(t_hi - t_lo + 1); }
  std::size_t columns() const { return static_cast<std::size_t>((L_degree + 1) * (M_degree + 1)); }
  std::size_t unknowns() const { return window() * columns(); }
  std::size_t column(std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>(j * (M_degree + 1) + k);
  }
  std::size_t index(std::int64_t j, std::int64_t k, std::int64_t alpha) const {
    return column(j, k) * window() + static_cast<std::size_t>(alpha - t_lo);
  }

  void validate() const {
    if (L_degree < 0 || M_degree < 0) throw BadParams("kernel degrees must be nonnegative");
    if (t_lo > t_hi) throw BadParams("empty t-window");
    if (n_from > n_to) throw BadParams("empty n-range");
  }

  bool in_box(const QTElem& x) const {
    for (const auto& [key, c] : x.terms()) {
      if (key[1] < 0 || key[1] > L_degree || key[0] < 0 || key[0] > M_degree) return false;
      if (lowest_degree(c) < t_lo || highest_degree(c) > t_hi) return false;
    }
    return true;
  }

  /// Coefficient vector of an operator inside the box.
  linalg::SparseRow to_vector(const QTElem& x) const {
    if (!in_box(x)) throw BadParams("operator outside the kernel box");
    std::map<std::size_t, Integer> v;
    for (const auto& [key, c] : x.terms())
      for (const auto& t : c.terms()) v[index(key[1], key[0], t.exp[0])] = t.coeff;
    return linalg::make_row(std::move(v));
  }

  QTElem to_operator(const linalg::SparseRow& v) const {
    QTElem x;
    const std::size_t W = window();
    for (const auto& [idx, val] : v) {
      const std::size_t col = idx / W;
      const std::int64_t alpha = t_lo + static_cast<std::int64_t>(idx % W);
      const std::int64_t j = static_cast<std::int64_t>(col) / (M_degree + 1);
      const std::int64_t k = static_cast<std::int64_t>(col) % (M_degree + 1);
      x.add_term({k, j}, t_pow(alpha, val));
    }
    return x;
  }
};

/// Basis vector = multiplier * op, op primitive with integer coefficients.
struct KernelBasisElement {
  QTElem op;
  Rational multiplier;
};

struct KernelResult {
  std::size_t dimension = 0;
  std::vector<KernelBasisElement> basis;
  KernelRoute route = KernelRoute::automatic;
  std::size_t unknowns = 0;
  /// Number of (n, gamma) coefficient equations (upper estimate: gamma
  /// ranges over the union of the exponent windows that can occur).
  std::size_t equations = 0;
  /// Structured route: dimension of the Q(t)-kernel of the sequence matrix.
  std::optional<std::size_t> sequence_nullity;
  std::vector<std::uint64_t> primes;
  std::vector<std::string> warnings;
};

namespace kernel_detail {

using modp::Field;
using modp::Poly;
using modp::u64;

/// Colored Jones function evaluated at t = tau modulo p.
inline u64 jones_mod(const TorusKnot& K, std::int64_t n, const Field& F, u64 tau) {
  if (n == 0) return 0;
  if (n < 0) return F.neg(jones_mod(K, -n, F, tau));
  const std::int64_t a = K.a(), b = K.b(), ab = a * b;
  const u64 t2 = F.mul(tau, tau);
  const u64 inv_den = F.inv(F.sub(t2, F.inv(t2)));  // 1 / (t^2 - t^-2)
  std::int64_t m = -(n - 1);
  u64 X = F.pow(tau, ab * m * m + 2 * b * m);
  u64 ratio = F.pow(tau, 4 * ab * (m + 1) + 4 * b);
  const u64 ratio_step = F.pow(tau, 8 * ab);
  u64 Y = F.pow(tau, 2 * (a * m + 1)), Yi = F.pow(tau, -2 * (a * m + 1));
  const u64 y_step = F.pow(tau, 4 * a), yi_step = F.pow(tau, -4 * a);
  u64 sum = 0;
  for (; m <= n - 1; m += 2) {
    sum = F.add(sum, F.mul(X, F.sub(Y, Yi)));
    X = F.mul(X, ratio);
    ratio = F.mul(ratio, ratio_step);
    Y = F.mul(Y, y_step);
    Yi = F.mul(Yi, yi_step);
  }
  return F.mul(F.mul(sum, inv_den), F.pow(tau, -ab * (n * n - 1)));
}

/// Dense colored Jones values with a sliding cache.
class JonesCache {
 public:
  explicit JonesCache(TorusKnot K, std::size_t limit = 16) : K_(K), limit_(limit) {}
  const DenseJones& operator()(std::int64_t n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    if (cache_.size() >= limit_) {
      cache_.erase(order_.front());
      order_.erase(order_.begin());
    }
    order_.push_back(n);
    return cache_.emplace(n, colored_jones_dense(K_, n)).first->second;
  }

 private:
  TorusKnot K_;
  std::size_t limit_;
  std::unordered_map<std::int64_t, DenseJones> cache_;
  std::vector<std::int64_t> order_;
};

/// Exact check that (x J)(n) = 0, accumulating in 128-bit integers when all
/// coefficients of x fit in 64 bits.
inline bool annihilates_at(const QTElem& x, JonesCache& J, std::int64_t n) {
  struct Piece {
    std::int64_t shift;
    std::int64_t coeff;
    std::int64_t l;
  };
  std::vector<Piece> pieces;
  bool small = true;
  for (const auto& [key, c] : x.terms())
    for (const auto& t : c.terms()) {
      auto v = to_int64(t.coeff);
      if (!v) small = false;
      pieces.push_back({t.exp[0] + 2 * key[0] * n, v.value_or(0), key[1]});
    }
  if (!small) {
    TPoly sum;
    for (const auto& [key, c] : x.terms()) {
      const DenseJones& d = J(n + key[1]);
      std::vector<TPoly::Term> terms;
      for (std::size_t i = 0; i < d.coeff.size(); ++i)
        if (d.coeff[i]) terms.push_back({{d.lo + static_cast<std::int64_t>(i) + 2 * key[0] * n}, Integer(static_cast<long>(d.coeff[i]))});
      sum += c * TPoly::from_terms(std::move(terms));
    }
    return sum.is_zero();
  }
  std::int64_t lo = 0, hi = -1;
  bool init = false;
  for (const auto& p : pieces) {
    const DenseJones& d = J(n + p.l);
    if (d.is_zero()) continue;
    const std::int64_t a = p.shift + d.lo, b = p.shift + d.hi();
    if (!init || a < lo) lo = a;
    if (!init || b > hi) hi = b;
    init = true;
  }
  if (!init) return true;
  std::vector<__int128> acc(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const auto& p : pieces) {
    const DenseJones& d = J(n + p.l);
    __int128* out = acc.data() + (p.shift + d.lo - lo);
    const __int128 c = p.coeff;
    for (std::size_t i = 0; i < d.coeff.size(); ++i) out[i] += c * d.coeff[i];
  }
  for (auto v : acc)
    if (v != 0) return false;
  return true;
}

inline bool annihilates_range(const QTElem& x, const TorusKnot& K, std::int64_t from, std::int64_t to,
                              std::size_t cache_limit) {
  JonesCache J(K, cache_limit);
  for (std::int64_t n = from; n <= to; ++n)
    if (!annihilates_at(x, J, n)) return false;
  return true;
}

/// Lifts vectors of residues (one per prime, same shape) to rationals.
inline std::optional<std::vector<Rational>> lift_residues(const std::vector<std::vector<u64>>& per_prime,
                                                          const std::vector<u64>& primes) {
  if (per_prime.empty()) return std::nullopt;
  const std::size_t len = per_prime.front().size();
  std::vector<Rational> out(len);
  std::vector<u64> res(per_prime.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t pi = 0; pi < per_prime.size(); ++pi) res[pi] = per_prime[pi][i];
    if (std::all_of(res.begin(), res.end(), [](u64 v) { return v == 0; })) {
      out[i] = 0;
      continue;
    }
    auto [x, m] = modp::crt(res, primes);
    auto q = modp::rational_lift(x, m);
    if (!q) return std::nullopt;
    out[i] = *q;
  }
  return out;
}

/// Scales a rational vector to a primitive integer vector.
inline std::vector<Integer> clear_denominators(const std::vector<Rational>& v) {
  Integer D = 1;
  for (const auto& q : v) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> out(v.size());
  Integer g = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rational s = v[i] * Rational(D);
    out[i] = s.get_num();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out[i].get_mpz_t());
  }
  if (g > 1)
    for (auto& x : out) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return out;
}

inline std::size_t count_equations(const KernelQuery& q) {
  std::size_t total = 0;
  for (std::int64_t n = q.n_from; n <= q.n_to; ++n) {
    std::vector<std::pair<std::int64_t, std::int64_t>> iv;
    for (std::int64_t j = 0; j <= q.L_degree; ++j) {
      const DenseJones d = colored_jones_dense(q.K, n + j);
      if (d.is_zero()) continue;
      iv.push_back({q.t_lo + d.lo, q.t_hi + d.hi() + 2 * q.M_degree * n});
      iv.back().first = std::min(iv.back().first, q.t_lo + d.lo + 2 * q.M_degree * n);
      iv.back().second = std::max(iv.back().second, q.t_hi + d.hi());
    }
    std::sort(iv.begin(), iv.end());
    std::int64_t cur_lo = 0, cur_hi = -1;
    bool open = false;
    for (auto [a, b] : iv) {
      if (!open || a > cur_hi + 1) {
        if (open) total += static_cast<std::size_t>(cur_hi - cur_lo + 1);
        cur_lo = a;
        cur_hi = b;
        open = true;
      } else {
        cur_hi = std::max(cur_hi, b);
      }
    }
    if (open) total += static_cast<std::size_t>(cur_hi - cur_lo + 1);
  }
  return total;
}

/// Reduced row echelon basis over Q of a set of box vectors.
inline std::vector<KernelBasisElement> canonical_basis(const KernelQuery& q,
                                                       const std::vector<linalg::SparseRow>& vectors) {
  linalg::IntegerEchelon E(q.unknowns());
  for (const auto& v : vectors) E.add(v);
  std::vector<KernelBasisElement> out;
  for (const auto& row : E.reduced()) {
    Rational mult(Integer(1), row.front().second);
    mult.canonicalize();
    out.push_back({q.to_operator(row), mult});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Direct route

constexpr std::size_t kDirectLimit = 8000;

/// Unknowns of one alpha-parity class. The coefficient system decouples by
/// parity because every exponent of J is even.
struct ParityBlock {
  const KernelQuery& q;
  std::int64_t a0;
  std::size_t Wg;
  std::size_t size() const { return Wg * q.columns(); }
  std::size_t global(std::size_t local) const {
    const std::size_t c = local / Wg;
    const std::int64_t alpha = a0 + 2 * static_cast<std::int64_t>(local % Wg);
    return c * q.window() + static_cast<std::size_t>(alpha - q.t_lo);
  }
};

/// Adds the coefficient equations of one n, modulo F.
inline void add_direct_rows(const ParityBlock& blk, const Field& F, JonesCache& J, std::int64_t n,
                            modp::Echelon& E) {
  const KernelQuery& q = blk.q;
  const std::size_t U = blk.size();
  std::map<std::int64_t, std::vector<std::pair<std::size_t, u64>>> rows;
  for (std::int64_t jj = 0; jj <= q.L_degree; ++jj) {
    const DenseJones& d = J(n + jj);
    for (std::size_t i = 0; i < d.coeff.size(); ++i) {
      if (d.coeff[i] == 0) continue;
      const std::int64_t e = d.lo + static_cast<std::int64_t>(i);
      const u64 val = F.from_int(d.coeff[i]);
      for (std::int64_t k = 0; k <= q.M_degree; ++k) {
        const std::size_t c = q.column(jj, k);
        for (std::size_t w = 0; w < blk.Wg; ++w)
          rows[blk.a0 + 2 * static_cast<std::int64_t>(w) + 2 * k * n + e].push_back({c * blk.Wg + w, val});
      }
    }
  }
  for (auto& [gamma, entries] : rows) {
    if (E.rank() == U) return;
    std::vector<u64> dense(U, 0);
    for (auto& [col, v] : entries) dense[col] = F.add(dense[col], v);
    E.add(std::move(dense));
  }
}

inline modp::Matrix direct_kernel_mod(const ParityBlock& blk, const Field& F, std::int64_t n_last,
                                      std::vector<std::size_t>& free_cols) {
  modp::Echelon E(F, blk.size());
  JonesCache J(blk.q.K, static_cast<std::size_t>(blk.q.L_degree) + 4);
  for (std::int64_t n = blk.q.n_from; n <= n_last; ++n) add_direct_rows(blk, F, J, n, E);
  return E.kernel(&free_cols);
}

inline std::vector<linalg::SparseRow> direct_parity_kernel(const KernelQuery& q, int parity,
                                                           std::vector<std::uint64_t>& primes_used) {
  const std::int64_t a0 = ((q.t_lo % 2) + 2) % 2 == parity ? q.t_lo : q.t_lo + 1;
  if (a0 > q.t_hi) return {};
  const ParityBlock blk{q, a0, static_cast<std::size_t>((q.t_hi - a0) / 2 + 1)};
  const std::size_t U = blk.size();
  const Field F0(modp::nth_prime(0));
  primes_used.push_back(F0.p());
  modp::Echelon E(F0, U);
  JonesCache J(q.K, static_cast<std::size_t>(q.L_degree) + 4);
  constexpr std::size_t kMaxPrimes = 8;

  for (std::int64_t n = q.n_from; n <= q.n_to; ++n) {
    const std::size_t before = E.rank();
    add_direct_rows(blk, F0, J, n, E);
    if (E.rank() == U) return {};
    // checkpoint when a value of n brings no new rank, and at the end
    if (E.rank() != before && n < q.n_to) continue;

    std::vector<std::size_t> free0;
    std::vector<modp::Matrix> kernels{E.kernel(&free0)};
    std::vector<u64> primes{F0.p()};
    std::vector<linalg::SparseRow> candidate;
    bool lifted = false;
    for (std::size_t pi = 1; !lifted; ++pi) {
      candidate.clear();
      lifted = true;
      for (std::size_t r = 0; r < free0.size() && lifted; ++r) {
        std::vector<std::vector<u64>> residues;
        for (const auto& kp : kernels) residues.push_back(kp[r]);
        auto rat = lift_residues(residues, primes);
        if (!rat) {
          lifted = false;
          break;
        }
        const auto ints = clear_denominators(*rat);
        std::map<std::size_t, Integer> v;
        for (std::size_t i = 0; i < ints.size(); ++i)
          if (ints[i] != 0) v[blk.global(i)] = ints[i];
        candidate.push_back(linalg::make_row(std::move(v)));
      }
      if (lifted) break;
      if (pi >= kMaxPrimes) throw KernelError("direct route: kernel did not lift to rationals");
      const Field Fi(modp::nth_prime(pi));
      std::vector<std::size_t> free_i;
      modp::Matrix Ki = direct_kernel_mod(blk, Fi, n, free_i);
      if (free_i != free0) continue;  // unlucky prime
      kernels.push_back(std::move(Ki));
      primes.push_back(Fi.p());
      primes_used.push_back(Fi.p());
    }
    bool verified = true;
    for (const auto& v : candidate)
      if (!annihilates_range(q.to_operator(v), q.K, q.n_from, q.n_to, static_cast<std::size_t>(q.L_degree) + 4)) {
        verified = false;
        break;
      }
    if (verified) return candidate;
  }
  throw KernelError("direct route: lifted kernel failed exact verification");
}

inline void run_direct(const KernelQuery& q, KernelResult& out) {
  if (q.unknowns() > kDirectLimit)
    throw SystemTooLarge("direct route supports at most " + std::to_string(kDirectLimit) + " unknowns (query has " +
                             std::to_string(q.unknowns()) + ")",
                         q.unknowns(), kDirectLimit);
  std::vector<linalg::SparseRow> all;
  for (int parity = 0; parity < 2; ++parity) {
    auto part = direct_parity_kernel(q, parity, out.primes);
    for (auto& v : part) all.push_back(std::move(v));
  }
  std::sort(out.primes.begin(), out.primes.end());
  out.primes.erase(std::unique(out.primes.begin(), out.primes.end()), out.primes.end());
  out.basis = canonical_basis(q, all);
  out.dimension = out.basis.size();
}

// ---------------------------------------------------------------------------
// Structured route

/// Exact Q(t)-kernel basis of the sequence matrix in free-column form:
/// for each free column f, B_f[f] != 0 and B_f[f'] = 0 for other free f'.
struct SequenceKernel {
  std::vector<std::size_t> free_cols;
  std::vector<std::vector<TPoly>> B;  // B[i][c], polynomial in t (exponents >= 0)
};

inline std::vector<u64> sequence_row(const KernelQuery& q, const Field& F, u64 tau, std::int64_t n,
                                     const std::vector<u64>& jvals) {
  const std::size_t m = q.columns();
  std::vector<u64> row(m);
  const u64 step = F.pow(tau, 2 * n);
  for (std::int64_t j = 0; j <= q.L_degree; ++j) {
    u64 v = jvals[static_cast<std::size_t>(n + j - q.n_from)];
    for (std::int64_t k = 0; k <= q.M_degree; ++k) {
      row[q.column(j, k)] = v;
      v = F.mul(v, step);
    }
  }
  return row;
}

/// One modular image of the kernel basis: entries of B_f as polynomials
/// over F_p, with the free-column set it was computed for.
struct ModularImage {
  std::vector<std::size_t> free_cols;
  std::vector<std::vector<Poly>> B;
};

/// Returns nullopt when A(tau) has full column rank (kernel is zero).
inline std::optional<ModularImage> modular_sequence_kernel(const KernelQuery& q, const Field& F, std::uint64_t seed,
                                                           std::size_t& rank_out) {
  const std::size_t m = q.columns();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<u64> dist(2, F.p() - 2);

  std::size_t ref_rank = 0;
  std::vector<std::size_t> ref_pivots;
  std::vector<std::size_t> ref_free;
  std::vector<u64> xs;
  std::vector<modp::Matrix> values;  // per point: s x m kernel basis
  std::size_t skipped = 0;
  constexpr std::size_t kHoldout = 4;
  std::size_t target = 32;

  auto sample = [&]() {
    u64 tau;
    do {
      tau = dist(rng);
    } while (F.pow(tau, 4) == 1 || std::find(xs.begin(), xs.end(), tau) != xs.end());
    std::vector<u64> jvals;
    for (std::int64_t n = q.n_from; n <= q.n_to + q.L_degree; ++n) jvals.push_back(jones_mod(q.K, n, F, tau));
    modp::Matrix A;
    for (std::int64_t n = q.n_from; n <= q.n_to; ++n) A.push_back(sequence_row(q, F, tau, n, jvals));
    auto pivots = modp::rref(F, A, m);
    return std::make_tuple(tau, std::move(A), std::move(pivots));
  };

  for (;;) {
    auto [tau, R, pivots] = sample();
    const std::size_t rank = pivots.size();
    if (rank == m) {
      rank_out = m;
      return std::nullopt;
    }
    const bool better = rank > ref_rank || (rank == ref_rank && !ref_pivots.empty() && pivots < ref_pivots);
    if (better || ref_pivots.empty()) {
      if (!ref_pivots.empty()) ++skipped;
      ref_rank = rank;
      ref_pivots = pivots;
      xs.clear();
      values.clear();
    } else if (pivots != ref_pivots) {
      if (++skipped > 64) throw KernelError("structured route: too many degenerate evaluation points");
      continue;
    }
    xs.push_back(tau);
    values.push_back(modp::kernel_from_rref(F, R, pivots, m, &ref_free));
    if (xs.size() < target + kHoldout) continue;

    // try to reconstruct every entry from the first `target` points
    const std::vector<u64> fit_x(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(target));
    const modp::Interpolator interp(F, fit_x);
    const Poly vanish = modp::vanishing(F, fit_x);
    const std::size_t s = ref_free.size();
    ModularImage img;
    img.free_cols = ref_free;
    img.B.assign(s, std::vector<Poly>(m));
    bool ok = true;
    for (std::size_t f = 0; f < s && ok; ++f) {
      std::vector<Poly> num(m), den(m);
      Poly common{1};
      for (std::size_t c = 0; c < m && ok; ++c) {
        std::vector<u64> ys(target);
        bool zero = true;
        for (std::size_t i = 0; i < target; ++i) {
          ys[i] = values[i][f][c];
          zero = zero && ys[i] == 0;
        }
        if (zero) {
          for (std::size_t i = target; i < xs.size(); ++i)
            if (values[i][f][c] != 0) ok = false;
          den[c] = Poly{1};
          continue;
        }
        auto rr = modp::rational_reconstruct(F, interp(ys), vanish, 2);
        if (!rr) {
          ok = false;
          break;
        }
        for (std::size_t i = target; i < xs.size() && ok; ++i) {
          const u64 d = modp::eval(F, rr->second, xs[i]);
          if (d == 0 || F.mul(modp::eval(F, rr->first, xs[i]), F.inv(d)) != values[i][f][c]) ok = false;
        }
        num[c] = std::move(rr->first);
        den[c] = std::move(rr->second);
        common = modp::lcm(F, common, den[c]);
      }
      if (!ok) break;
      for (std::size_t c = 0; c < m; ++c) {
        if (num[c].empty()) continue;
        img.B[f][c] = modp::mul(F, num[c], modp::divmod(F, common, den[c]).first);
      }
    }
    if (ok) {
      rank_out = ref_rank;
      return img;
    }
    target *= 2;
    if (target > 8192) throw KernelError("structured route: rational reconstruction did not stabilize");
  }
}

inline SequenceKernel exact_sequence_kernel(const KernelQuery& q, KernelResult& out, bool& full_rank) {
  const std::size_t m = q.columns();
  std::vector<ModularImage> images;
  std::vector<u64> primes;
  full_rank = false;
  for (std::size_t pi = 0; pi < 6; ++pi) {
    const Field F(modp::nth_prime(pi));
    std::size_t rank = 0;
    auto img = modular_sequence_kernel(q, F, 0x51ed2701u + 977u * pi, rank);
    out.primes.push_back(F.p());
    if (!img) {
      full_rank = true;
      return {};
    }
    if (!images.empty()) {
      bool same = img->free_cols == images.front().free_cols;
      for (std::size_t f = 0; same && f < img->B.size(); ++f)
        for (std::size_t c = 0; same && c < m; ++c) same = img->B[f][c].size() == images.front().B[f][c].size();
      if (!same) {
        // keep the image with the smaller kernel (the larger modular rank)
        if (img->free_cols.size() < images.front().free_cols.size()) {
          images.clear();
          primes.clear();
        } else {
          continue;
        }
      }
    }
    images.push_back(std::move(*img));
    primes.push_back(F.p());

    // lift each B_f coefficientwise
    const auto& ref = images.front();
    SequenceKernel SK;
    SK.free_cols = ref.free_cols;
    bool ok = true;
    for (std::size_t f = 0; f < ref.free_cols.size() && ok; ++f) {
      std::vector<std::vector<u64>> per_prime(images.size());
      for (std::size_t ip = 0; ip < images.size(); ++ip)
        for (std::size_t c = 0; c < m; ++c)
          for (u64 v : images[ip].B[f][c]) per_prime[ip].push_back(v);
      auto lifted = lift_residues(per_prime, primes);
      if (!lifted) {
        ok = false;
        break;
      }
      const auto ints = clear_denominators(*lifted);
      std::vector<TPoly> row(m);
      std::size_t pos = 0;
      for (std::size_t c = 0; c < m; ++c) {
        std::vector<TPoly::Term> terms;
        for (std::size_t e = 0; e < ref.B[f][c].size(); ++e, ++pos)
          if (ints[pos] != 0) terms.push_back({{static_cast<std::int64_t>(e)}, ints[pos]});
        row[c] = TPoly::from_terms(std::move(terms));
      }
      // exact verification against all n in range
      QTElem x;
      for (std::int64_t j = 0; j <= q.L_degree; ++j)
        for (std::int64_t k = 0; k <= q.M_degree; ++k)
          for (const auto& t : row[q.column(j, k)].terms()) x.add_term({k, j}, t_pow(t.exp[0], t.coeff));
      if (!annihilates_range(x, q.K, q.n_from, q.n_to, static_cast<std::size_t>(q.L_degree) + 4)) {
        ok = false;
        break;
      }
      SK.B.push_back(std::move(row));
    }
    if (ok) return SK;
  }
  throw KernelError("structured route: kernel of the sequence matrix did not lift to a verified basis");
}

/// Box vectors inside span_{Q(t)} of the verified sequence kernel.
inline std::vector<linalg::SparseRow> box_intersection(const KernelQuery& q, const SequenceKernel& SK) {
  const std::size_t m = q.columns(), s = SK.free_cols.size(), W = q.window();
  std::vector<char> is_free(m, 0);
  for (auto f : SK.free_cols) is_free[f] = 1;

  bool monomial = true;
  for (std::size_t i = 0; i < s; ++i) monomial = monomial && SK.B[i][SK.free_cols[i]].is_monomial();

  std::vector<linalg::SparseRow> out;
  if (monomial) {
    // P_c = sum_f P_f B_f[c] / (lambda_f t^{e_f}); scale by lcm(lambda)
    Integer Lc = 1;
    std::vector<std::int64_t> e(s);
    std::vector<Integer> mu(s);
    for (std::size_t i = 0; i < s; ++i) {
      const auto& t = SK.B[i][SK.free_cols[i]].terms().front();
      e[i] = t.exp[0];
      mpz_lcm(Lc.get_mpz_t(), Lc.get_mpz_t(), t.coeff.get_mpz_t());
    }
    for (std::size_t i = 0; i < s; ++i) mu[i] = abs(Lc) / SK.B[i][SK.free_cols[i]].terms().front().coeff;
    // contributions of z_{i,alpha} to exponent gamma of Lc * P_c
    auto contributions = [&](std::size_t c, auto&& emit) {
      for (std::size_t i = 0; i < s; ++i)
        for (const auto& t : SK.B[i][c].terms())
          for (std::size_t w = 0; w < W; ++w) {
            const std::int64_t gamma = q.t_lo + static_cast<std::int64_t>(w) + t.exp[0] - e[i];
            emit(gamma, i * W + w, Integer(t.coeff * mu[i]));
          }
    };
    linalg::IntegerEchelon E(s * W);
    for (std::size_t c = 0; c < m; ++c) {
      if (is_free[c]) continue;
      std::map<std::int64_t, std::map<std::size_t, Integer>> rows;
      contributions(c, [&](std::int64_t gamma, std::size_t col, const Integer& v) {
        if (gamma < q.t_lo || gamma > q.t_hi) rows[gamma][col] += v;
      });
      for (auto& [gamma, r] : rows) E.add(linalg::make_row(std::move(r)));
    }
    for (const auto& z : E.kernel()) {
      std::map<std::size_t, Integer> x;
      for (const auto& [col, v] : z) {
        x[SK.free_cols[col / W] * W + col % W] += v * abs(Lc);
      }
      std::map<std::size_t, Integer> zmap(z.begin(), z.end());
      for (std::size_t c = 0; c < m; ++c) {
        if (is_free[c]) continue;
        contributions(c, [&](std::int64_t gamma, std::size_t col, const Integer& v) {
          auto it = zmap.find(col);
          if (it == zmap.end() || gamma < q.t_lo || gamma > q.t_hi) return;
          x[c * W + static_cast<std::size_t>(gamma - q.t_lo)] += v * it->second;
        });
      }
      out.push_back(linalg::make_row(std::move(x)));
    }
    return out;
  }

  // General denominators: Delta P_c = sum_f P_f B_f[c] prod_{f' != f} B_f'[f'].
  TPoly Delta(1L);
  for (std::size_t i = 0; i < s; ++i) Delta *= SK.B[i][SK.free_cols[i]];
  std::vector<std::size_t> fixed;
  for (std::size_t c = 0; c < m; ++c)
    if (!is_free[c]) fixed.push_back(c);
  const std::size_t Z = s * W, Y = fixed.size() * W;
  linalg::IntegerEchelon E(Z + Y);
  for (std::size_t ci = 0; ci < fixed.size(); ++ci) {
    const std::size_t c = fixed[ci];
    std::map<std::int64_t, std::map<std::size_t, Integer>> rows;
    for (std::size_t i = 0; i < s; ++i) {
      if (SK.B[i][c].is_zero()) continue;
      TPoly C = SK.B[i][c];
      for (std::size_t i2 = 0; i2 < s; ++i2)
        if (i2 != i) C *= SK.B[i2][SK.free_cols[i2]];
      for (const auto& t : C.terms())
        for (std::size_t w = 0; w < W; ++w) rows[t.exp[0] + q.t_lo + static_cast<std::int64_t>(w)][i * W + w] += t.coeff;
    }
    for (const auto& t : Delta.terms())
      for (std::size_t w = 0; w < W; ++w)
        rows[t.exp[0] + q.t_lo + static_cast<std::int64_t>(w)][Z + ci * W + w] -= t.coeff;
    for (auto& [gamma, r] : rows) E.add(linalg::make_row(std::move(r)));
  }
  for (const auto& v : E.kernel()) {
    std::map<std::size_t, Integer> x;
    for (const auto& [col, val] : v) {
      if (col < Z)
        x[SK.free_cols[col / W] * W + col % W] = val;
      else
        x[fixed[(col - Z) / W] * W + (col - Z) % W] = val;
    }
    out.push_back(linalg::make_row(std::move(x)));
  }
  return out;
}

inline void run_structured(const KernelQuery& q, KernelResult& out) {
  bool full_rank = false;
  SequenceKernel SK = exact_sequence_kernel(q, out, full_rank);
  out.sequence_nullity = full_rank ? 0 : SK.free_cols.size();
  if (full_rank) return;
  out.basis = canonical_basis(q, box_intersection(q, SK));
  out.dimension = out.basis.size();
}

}  // namespace kernel_detail

constexpr std::size_t kAutoDirectThreshold = 1500;

inline KernelResult minimality_kernel(const KernelQuery& q) {
  q.validate();
  const std::size_t U = q.unknowns();
  if (U > q.cap)
    throw SystemTooLarge("kernel query has " + std::to_string(U) + " unknowns, above the cap of " +
                             std::to_string(q.cap) + " (raise it with --cap or QTK_KERNEL_CAP)",
                         U, q.cap);
  KernelResult out;
  out.unknowns = U;
  out.equations = kernel_detail::count_equations(q);
  if (out.equations < U)
    out.warnings.push_back("underdetermined: " + std::to_string(out.equations) + " equations for " +
                           std::to_string(U) + " unknowns");
  // the sequence matrix has one row per color, so the structured route
  // needs at least as many colors as (j, k) columns
  const auto colors = static_cast<std::size_t>(q.n_to - q.n_from + 1);
  const bool enough_colors = colors >= q.columns();
  out.route = q.route;
  if (out.route == KernelRoute::automatic)
    out.route = (U <= kAutoDirectThreshold || (!enough_colors && U <= kernel_detail::kDirectLimit))
                    ? KernelRoute::direct
                    : KernelRoute::structured;
  if (out.route == KernelRoute::structured && !enough_colors)
    throw BadParams("structured route needs at least " + std::to_string(q.columns()) + " colors, the n-range has " +
                    std::to_string(colors) + " (widen --n-range or use --route direct)");
  if (out.route == KernelRoute::direct)
    kernel_detail::run_direct(q, out);
  else
    kernel_detail::run_structured(q, out);
  return out;
}

/// Left multiplication by the unit t^s M^r L^u.
struct UnitFactor {
  std::int64_t t_shift = 0;
  std::int64_t M_shift = 0;
  std::int64_t L_shift = 0;
  QTElem element() const { return QTElem::monomial(t_pow(t_shift), M_shift, 0) * QTElem::L(L_shift); }
  std::string to_string() const { return element().to_string(); }
};

/// Finds a unit u with u * target inside the box and in the span of the
/// kernel basis.
inline std::optional<UnitFactor> contains_up_to_unit(const KernelResult& r, const KernelQuery& q,
                                                     const QTElem& target) {
  if (target.is_zero() || r.basis.empty()) return std::nullopt;
  linalg::IntegerEchelon E(q.unknowns());
  for (const auto& b : r.basis) E.add(q.to_vector(b.op));
  const auto [l1, l2] = target.l_range();
  for (std::int64_t u = -l1; u + l2 <= q.L_degree; ++u) {
    const QTElem X = QTElem::L(u) * target;
    const auto [m1, m2] = X.m_range();
    const auto [a1, a2] = X.t_range();
    for (std::int64_t rr = -m1; rr + m2 <= q.M_degree; ++rr)
      for (std::int64_t s = q.t_lo - a1; s + a2 <= q.t_hi; ++s) {
        const UnitFactor unit{s, rr, u};
        const QTElem Y = QTElem::monomial(t_pow(s), rr, 0) * X;
        if (E.contains(q.to_vector(Y))) return unit;
      }
  }
  return std::nullopt;
}

/// Exact test that x annihilates the colored Jones function over n_range.
inline bool annihilates_on_range(const QTElem& x, const KernelQuery& q) {
  return kernel_detail::annihilates_range(x, q.K, q.n_from, q.n_to, static_cast<std::size_t>(q.L_degree) + 4);
}

}  // namespace qtk
