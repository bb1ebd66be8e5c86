#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtk/classical.hpp"
#include "qtk/errors.hpp"
#include "qtk/jones.hpp"
#include "qtk/kernel.hpp"
#include "qtk/operators.hpp"
#include "qtk/report.hpp"

namespace qtk::cli {

/// Exit codes of the qtk binary.
enum Exit : int { kOk = 0, kFailed = 1, kConfig = 2 };

/// Inclusive integer range written as "k" or "lo..hi".
struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

inline Range parse_range(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (s.empty() || pos != s.size()) throw BadParams("invalid range '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const std::int64_t v = to_int(text);
    return {v, v};
  }
  Range r{to_int(text.substr(0, dots)), to_int(text.substr(dots + 2))};
  if (r.lo > r.hi) throw BadParams("empty range '" + text + "'");
  return r;
}

inline std::string format_range(const Range& r) { return std::to_string(r.lo) + ".." + std::to_string(r.hi); }

/// Validated command-line configuration.
struct RunConfig {
  std::string command;
  std::optional<std::int64_t> a;
  std::optional<std::int64_t> b;
  std::string range_text = "1..20";
  std::string identity;   // verify
  std::string op_name;    // reduce
  bool json = false;
  bool suite = false;
  bool full_z = false;
  bool check_degree = false;
  unsigned workers = 1;
  // kernel
  std::int64_t L_deg = 0;
  std::optional<std::int64_t> M_deg;
  std::optional<std::string> t_window;
  std::optional<std::string> n_range;
  std::optional<std::size_t> cap;
  std::string route = "auto";
};

inline const std::vector<std::string>& identities() {
  static const std::vector<std::string> ids{"recurrence3", "recurrence2", "F",     "G",        "PQ",          "R",
                                            "lemmaQ",      "lemmaP",      "epsilon", "sigma", "p-membership", "all"};
  return ids;
}

inline TorusKnot knot_from(const RunConfig& cfg, std::optional<std::int64_t> default_a = std::nullopt) {
  const auto a = cfg.a ? cfg.a : default_a;
  if (!a || !cfg.b) throw BadParams("both -a and -b are required");
  return TorusKnot(*a, *cfg.b);
}

// ---------------------------------------------------------------------------
// jones

inline int cmd_jones(const RunConfig& cfg, std::ostream& out) {
  const TorusKnot K = knot_from(cfg);
  const Range r = parse_range(cfg.range_text);
  const bool single = r.lo == r.hi;
  bool ok = true;
  for (std::int64_t n = r.lo; n <= r.hi; ++n) {
    const TPoly J = colored_jones(K, n);
    std::optional<std::int64_t> low, formula;
    if (cfg.check_degree && n != 0) {
      low = lowest_degree(J);
      formula = lowest_degree_formula(K, n < 0 ? -n : n);
      ok = ok && *low == *formula;
    }
    if (cfg.json) {
      nlohmann::ordered_json j;
      j["a"] = K.a();
      j["b"] = K.b();
      j["n"] = n;
      j["jones"] = J.to_string();
      if (low) {
        j["lowest_degree"] = *low;
        j["formula"] = *formula;
        j["status"] = *low == *formula ? "pass" : "fail";
      }
      out << j.dump() << "\n";
      continue;
    }
    if (single)
      out << J.to_string() << "\n";
    else
      out << "n=" << n << ": " << J.to_string() << "\n";
    if (low)
      out << "  lowest degree " << *low << (*low == *formula ? " = " : " != ") << "formula " << *formula << "\n";
  }
  return ok ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// verify

/// Reports for one identity on one knot. Identities that do not apply to
/// the knot's family throw WrongCase unless `skip_inapplicable`.
inline std::vector<VerifyReport> run_identity(const std::string& id, const TorusKnot& K, const Range& n,
                                              bool full_z, const VerifyOptions& opt, bool skip_inapplicable) {
  const bool two = K.two_bridge();
  std::vector<VerifyReport> out;
  auto needs = [&](bool generic) {
    if (generic == !two) return true;
    if (skip_inapplicable) return false;
    throw WrongCase(id + " does not apply to " + K.label() + (generic ? " (requires a > 2)" : " (requires a = 2)"));
  };
  auto annihilation = [&](OperatorName name) {
    const std::int64_t start = std::max(n.lo, default_annihilation_start(name, full_z));
    out.push_back(verify_annihilation(build_operator(name, K), jones_sequence(K), start, n.hi, opt));
  };
  if (id == "recurrence3") {
    if (needs(true)) out.push_back(verify_recurrence(K, Recurrence::three_term, n.lo, n.hi, opt));
  } else if (id == "recurrence2") {
    if (needs(false)) out.push_back(verify_recurrence(K, Recurrence::two_term, n.lo, n.hi, opt));
  } else if (id == "F") {
    if (needs(true)) annihilation(OperatorName::F);
  } else if (id == "G") {
    if (needs(false)) annihilation(OperatorName::G);
  } else if (id == "PQ") {
    if (needs(true)) annihilation(OperatorName::PQ);
  } else if (id == "R") {
    if (needs(false)) annihilation(OperatorName::R);
  } else if (id == "lemmaQ") {
    if (needs(true)) out.push_back(verify_lemma_Q(K, n.lo, n.hi, opt));
  } else if (id == "lemmaP") {
    if (needs(true)) out.push_back(verify_lemma_P(K, n.lo, n.hi, opt));
  } else if (id == "epsilon") {
    const std::vector<OperatorName> ops = two ? std::vector{OperatorName::G, OperatorName::R}
                                              : std::vector{OperatorName::F, OperatorName::P, OperatorName::Q,
                                                            OperatorName::PQ};
    for (auto name : ops) out.push_back(check_epsilon_factorization(build_operator(name, K)));
  } else if (id == "sigma") {
    const std::vector<OperatorName> ops =
        two ? std::vector{OperatorName::R} : std::vector{OperatorName::P, OperatorName::Q, OperatorName::PQ};
    for (auto name : ops) out.push_back(check_sigma_invariance(build_operator(name, K)));
    out.push_back(check_sigma_a_prime(K));
  } else if (id == "p-membership") {
    out.push_back(check_p_membership_powers(K));
    out.push_back(check_p_power_witness(K, sample_p_element(K)));
  } else if (id == "all") {
    for (const auto& sub : identities())
      if (sub != "all")
        for (auto& r : run_identity(sub, K, n, full_z, opt, true)) out.push_back(std::move(r));
  } else {
    throw BadParams("unknown identity '" + id + "'");
  }
  return out;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const Range n = parse_range(cfg.range_text);
  std::vector<TorusKnot> knots;
  if (cfg.suite) {
    if (cfg.a || cfg.b) throw BadParams("--suite cannot be combined with -a/-b");
    knots = suite_knots();
  } else {
    knots.push_back(knot_from(cfg));
  }
  const VerifyOptions opt{cfg.workers};
  std::size_t total = 0, failed = 0;
  for (const auto& K : knots) {
    for (const auto& r : run_identity(cfg.identity, K, n, cfg.full_z, opt, cfg.suite)) {
      ++total;
      if (!r.passed) ++failed;
      out << (cfg.json ? r.to_json().dump() : r.to_text()) << "\n";
    }
  }
  if (!cfg.json) out << total << " checks, " << failed << " failed\n";
  return failed == 0 ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// reduce

/// Factored cofactor of the A-polynomial in the displayed form of epsilon(F)
/// or epsilon(G).
inline std::optional<std::string> cofactor_display(const NamedOperator& op) {
  if (op.name != OperatorName::F && op.name != OperatorName::G) return std::nullopt;
  const std::string display = epsilon_forms(op).front().display;
  const auto cut = display.find("*(L-1)");
  if (cut == std::string::npos) return std::nullopt;
  return display.substr(0, cut);
}

inline int cmd_reduce(const RunConfig& cfg, std::ostream& out) {
  const auto name = operator_from_string(cfg.op_name);
  if (!name) throw BadParams("unknown operator '" + cfg.op_name + "'");
  const bool two_family = *name == OperatorName::G || *name == OperatorName::R;
  const TorusKnot K = knot_from(cfg, two_family ? std::optional<std::int64_t>(2) : std::nullopt);
  const NamedOperator op = build_operator(*name, K);
  const MLPoly e = epsilon(op.element);
  const MLPoly A = a_polynomial(K).element;
  const DivisionResult d = divides(A, e);
  bool ok = true;
  nlohmann::ordered_json forms = nlohmann::ordered_json::array();
  std::vector<std::string> lines;
  for (const auto& f : epsilon_forms(op)) {
    const bool match = f.value == e;
    ok = ok && match;
    forms.push_back({{"display", f.display}, {"status", match ? "match" : "mismatch"}});
    lines.push_back("  = " + f.display + (match ? "" : "   MISMATCH"));
  }
  if (cfg.json) {
    nlohmann::ordered_json j;
    j["operator"] = to_string(op.name);
    j["a"] = op.a;
    j["b"] = op.b;
    j["epsilon"] = e.to_string();
    j["forms"] = forms;
    j["a_polynomial"] = A.to_string();
    j["divisible"] = d.divisible;
    if (d.quotient) j["cofactor"] = d.quotient->to_string();
    if (auto shown = cofactor_display(op)) j["cofactor_display"] = *shown;
    j["status"] = ok ? "pass" : "fail";
    out << j.dump() << "\n";
  } else {
    out << "epsilon(" << op.label() << ") = " << e.to_string() << "\n";
    for (const auto& l : lines) out << l << "\n";
    out << "A-polynomial " << K.label() << ": " << A.to_string() << "\n";
    if (d.quotient) {
      out << "cofactor: ";
      if (auto shown = cofactor_display(op); shown && parse_mlpoly(*shown) == *d.quotient) out << *shown << " = ";
      out << d.quotient->to_string() << "\n";
    }
    else
      out << "A-polynomial does not divide epsilon(" << op.label() << ")\n";
  }
  return ok ? kOk : kFailed;
}

// ---------------------------------------------------------------------------
// kernel

/// Default box: the named operator's coefficient support (shifted to
/// nonnegative M-degree) padded by 2 in M and 4 in t, with 12 more values
/// of n than sequence-matrix columns.
inline KernelQuery kernel_query(const RunConfig& cfg) {
  const TorusKnot K = knot_from(cfg);
  const QTElem alpha = named_alpha(K).element;
  const auto [m_lo, m_hi] = alpha.m_range();
  const auto [t_lo, t_hi] = alpha.t_range();
  KernelQuery q{K, cfg.L_deg, cfg.M_deg.value_or(m_hi - m_lo + 2), t_lo - 4, t_hi + 4};
  if (cfg.t_window) {
    const Range w = parse_range(*cfg.t_window);
    q.t_lo = w.lo;
    q.t_hi = w.hi;
  }
  q.n_from = 1;
  q.n_to = static_cast<std::int64_t>(q.columns()) + 12;
  if (cfg.n_range) {
    const Range r = parse_range(*cfg.n_range);
    q.n_from = r.lo;
    q.n_to = r.hi;
  }
  q.cap = cfg.cap.value_or(default_kernel_cap());
  if (cfg.route == "auto")
    q.route = KernelRoute::automatic;
  else if (cfg.route == "direct")
    q.route = KernelRoute::direct;
  else if (cfg.route == "structured")
    q.route = KernelRoute::structured;
  else
    throw BadParams("unknown route '" + cfg.route + "'");
  q.validate();
  return q;
}

inline int cmd_kernel(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const KernelQuery q = kernel_query(cfg);
  const KernelResult r = minimality_kernel(q);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  const NamedOperator alpha = named_alpha(q.K);
  const auto [l_lo, l_hi] = alpha.element.l_range();
  const std::int64_t order = l_hi - l_lo;
  std::optional<UnitFactor> unit;
  if (order <= q.L_degree) unit = contains_up_to_unit(r, q, alpha.element);

  if (cfg.json) {
    nlohmann::ordered_json j;
    j["knot"] = q.K.label();
    j["L_degree"] = q.L_degree;
    j["M_degree"] = q.M_degree;
    j["t_window"] = {q.t_lo, q.t_hi};
    j["n_range"] = {q.n_from, q.n_to};
    j["unknowns"] = r.unknowns;
    j["route"] = to_string(r.route);
    j["dimension"] = r.dimension;
    nlohmann::ordered_json basis = nlohmann::ordered_json::array();
    for (const auto& b : r.basis) basis.push_back({{"multiplier", b.multiplier.get_str()}, {"op", b.op.to_string()}});
    j["basis"] = basis;
    if (order <= q.L_degree) {
      j["contains"] = {{"operator", to_string(alpha.name)},
                       {"found", unit.has_value()},
                       {"unit", unit ? nlohmann::ordered_json(unit->to_string()) : nlohmann::ordered_json(nullptr)}};
    }
    out << j.dump() << "\n";
    return kOk;
  }
  out << "knot: " << q.K.label() << "\n";
  out << "bounds: L-deg " << q.L_degree << ", M-deg " << q.M_degree << ", t-window " << q.t_lo << ".." << q.t_hi
      << ", n-range " << q.n_from << ".." << q.n_to << "\n";
  out << "unknowns: " << r.unknowns << " (route " << to_string(r.route) << ")\n";
  out << "dimension: " << r.dimension << "\n";
  for (std::size_t i = 0; i < r.basis.size(); ++i)
    out << "basis[" << i << "] = " << r.basis[i].multiplier.get_str() << " * (" << r.basis[i].op.to_string()
        << ")\n";
  if (order <= q.L_degree) {
    if (unit)
      out << "contains " << alpha.label() << " up to unit " << unit->to_string() << "\n";
    else
      out << "does not contain " << alpha.label() << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Exact quantum-torus computations for torus-knot colored Jones polynomials", "qtk"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_knot = [&](CLI::App* sub) {
    sub->add_option("-a", cfg.a, "first torus knot parameter");
    sub->add_option("-b", cfg.b, "second torus knot parameter");
    sub->add_flag("--json", cfg.json, "machine-readable output, one JSON object per line");
  };

  auto* jones = app.add_subcommand("jones", "print colored Jones polynomials");
  add_knot(jones);
  jones->add_option("-n,--n", cfg.range_text, "color k or range lo..hi")->required();
  jones->add_flag("--check-degree", cfg.check_degree, "compare the lowest t-degree with the closed formula");

  auto* verify = app.add_subcommand("verify", "verify recurrences, annihilators and classical limits");
  add_knot(verify);
  verify->add_option("identity", cfg.identity, "identity to check")
      ->required()
      ->check(CLI::IsMember(identities()));
  verify->add_option("--n", cfg.range_text, "range lo..hi (default 1..20)");
  verify->add_flag("--suite", cfg.suite, "run on the seven suite knots");
  verify->add_flag("--full-z", cfg.full_z, "use the requested range as is for operators with negative L-powers");
  verify->add_option("--workers", cfg.workers, "worker threads per check")->check(CLI::Range(1U, 256U));

  auto* reduce = app.add_subcommand("reduce", "reduce an operator at t = -1 and match its factorizations");
  add_knot(reduce);
  reduce->add_option("operator", cfg.op_name, "F, G, P, Q, PQ or R")
      ->required()
      ->check(CLI::IsMember({"F", "G", "P", "Q", "PQ", "R"}));

  auto* kernel = app.add_subcommand("kernel", "bounded search for annihilating operators");
  add_knot(kernel);
  kernel->add_option("--L-deg", cfg.L_deg, "maximal L-degree")->required()->check(CLI::NonNegativeNumber);
  kernel->add_option("--M-deg", cfg.M_deg, "maximal M-degree")->check(CLI::NonNegativeNumber);
  kernel->add_option("--t-window", cfg.t_window, "t-exponent window lo..hi");
  kernel->add_option("--n-range", cfg.n_range, "colors lo..hi used as constraints");
  kernel->add_option("--cap", cfg.cap, "maximal number of unknowns (default QTK_KERNEL_CAP or 20000)");
  kernel->add_option("--route", cfg.route, "auto, direct or structured")
      ->check(CLI::IsMember({"auto", "direct", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfig;
  }

  try {
    if (*jones) return cmd_jones(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
    if (*reduce) return cmd_reduce(cfg, out);
    if (*kernel) return cmd_kernel(cfg, out, err);
  } catch (const SystemTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const BadParams& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const WrongCase& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kConfig;
}

}  // namespace qtk::cli
