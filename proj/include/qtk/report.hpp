#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace qtk {

/// Outcome of one verification run. A pass means every residual in range
/// was the zero polynomial; a failure records the first offending n (when
/// the check is indexed by n) and the residual in canonical text.
struct VerifyReport {
  std::string identity;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::optional<std::int64_t> n_from;
  std::optional<std::int64_t> n_to;
  bool passed = true;
  std::optional<std::int64_t> witness_n;
  std::optional<std::string> residual;

  /// Keys in the order identity, status, a, b, n_from, n_to, witness_n, residual.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["identity"] = identity;
    j["status"] = passed ? "pass" : "fail";
    j["a"] = a;
    j["b"] = b;
    j["n_from"] = n_from ? nlohmann::ordered_json(*n_from) : nlohmann::ordered_json(nullptr);
    j["n_to"] = n_to ? nlohmann::ordered_json(*n_to) : nlohmann::ordered_json(nullptr);
    if (witness_n) j["witness_n"] = *witness_n;
    if (residual) j["residual"] = *residual;
    return j;
  }

  std::string to_text() const {
    std::string s = identity + " a=" + std::to_string(a) + " b=" + std::to_string(b);
    if (n_from && n_to) s += " n=" + std::to_string(*n_from) + ".." + std::to_string(*n_to);
    s += passed ? ": pass" : ": FAIL";
    if (witness_n) s += " at n=" + std::to_string(*witness_n);
    if (residual) s += " residual " + *residual;
    return s;
  }
};

}  // namespace qtk
