#pragma once

#include <gmpxx.h>

#include <climits>
#include <cstdint>
#include <optional>
#include <string>

namespace qtk {

using Integer = mpz_class;
using Rational = mpq_class;

inline bool fits_int64(const Integer& z) {
  return mpz_sizeinbase(z.get_mpz_t(), 2) <= 62;
}

inline std::optional<std::int64_t> to_int64(const Integer& z) {
  if (!fits_int64(z)) return std::nullopt;
  if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
  // long may be 32 bits on some targets
  return std::stoll(z.get_str());
}

inline Integer from_int64(std::int64_t v) {
  if (v >= LONG_MIN && v <= LONG_MAX) return Integer(static_cast<long>(v));
  return Integer(std::to_string(v));
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline int sign(const Integer& z) { return sgn(z); }

}  // namespace qtk
