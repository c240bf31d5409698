#pragma once

// Command implementations behind jtool. Each command takes the raw input
// text and returns a report plus an exit code; reading files and printing
// are left to the caller.
//
// Exit codes: 0 success, 1 precondition or violation, 2 numerical failure,
// 3 I/O or parse error.

#include "jform/decomp.hpp"
#include "jform/eigenprops.hpp"
#include "jform/io.hpp"
#include "jform/jspace.hpp"
#include "jform/matrep.hpp"
#include "jform/nullcone.hpp"
#include "jform/oracle.hpp"
#include "jform/spectral.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace jform::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;
inline constexpr const char* kSchemaVersion = "1";

struct CommandResult {
  int exit_code = kExitOk;
  Json report;
  std::string diagnostic;  // empty on success
};

/// Whole file, or standard input for "-".
inline std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    if (std::cin.bad()) throw IoError("cannot read standard input");
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write '" + path + "'");
}

inline Json tolerances_json(const Tolerances& t) {
  return Json{{"input", t.input}, {"locus", t.locus}, {"output", t.output}};
}

namespace detail {

/// Runs `body` with the common report skeleton and maps exceptions to exit
/// codes. The wall time is the only field that varies between runs.
inline CommandResult run(const std::string& name, const Json& args, const std::string& input,
                         const std::function<int(Json&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult res;
  Json& r = res.report;
  r["schema_version"] = kSchemaVersion;
  r["command"] = Json{{"name", name}, {"args", args}};
  r["input_digest"] = input_digest(input);
  try {
    res.exit_code = body(r);
    if (res.exit_code != kExitOk && r.contains("first_violation"))
      res.diagnostic = "violation: " + r["first_violation"].get<std::string>();
  } catch (const IoError& e) {
    res.exit_code = kExitIo;
    res.diagnostic = e.what();
  } catch (const NumericalError& e) {
    res.exit_code = kExitNumerical;
    res.diagnostic = e.what();
  } catch (const Cancelled& e) {
    res.exit_code = kExitNumerical;
    res.diagnostic = e.what();
  } catch (const Error& e) {
    res.exit_code = kExitViolation;
    res.diagnostic = e.what();
  }
  r["status"] = res.exit_code == kExitOk ? "ok" : "error";
  r["exit_code"] = res.exit_code;
  if (!res.diagnostic.empty()) r["error"] = res.diagnostic;
  r["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return res;
}

inline std::optional<BranchRay> parse_phi(const std::string& phi) {
  if (phi == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(phi, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != phi.size() || !std::isfinite(v))
    throw PreconditionError("phi must be 'auto' or a finite number of radians, got '" + phi + "'");
  return BranchRay(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string input = "-";
  double tol = 1e-10;
};

inline CommandResult cmd_classify(const std::string& text, const ClassifyArgs& args) {
  const Json echo{{"input", args.input}, {"tol", args.tol}};
  return detail::run("classify", echo, text, [&](Json& r) {
    const MatrixFile f = parse_matrix_file(text);
    const Conjugation j = f.conj();
    r["n"] = f.a.rows();
    r["classification"] = classification_to_json(classify(j, f.a, args.tol));
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
  std::string kind = "jpolar";
  std::string input = "-";
  std::string phi = "auto";
  Tolerances tol{};
};

inline const std::vector<std::string>& decompose_kinds() {
  static const std::vector<std::string> kinds{"jpolar",       "jpolar-right",    "sa-jiso-exp",
                                              "junitary-exp", "jsa-unitary-exp", "unitary-exp"};
  return kinds;
}

inline CommandResult cmd_decompose(const std::string& text, const DecomposeArgs& args) {
  const Json echo{{"kind", args.kind}, {"input", args.input}, {"phi", args.phi}};
  return detail::run("decompose", echo, text, [&](Json& r) {
    r["tolerances"] = tolerances_json(args.tol);
    const MatrixFile f = parse_matrix_file(text);
    const Conjugation j = f.conj();
    DecompOptions opts;
    opts.tol = args.tol;
    const std::optional<BranchRay> ray = detail::parse_phi(args.phi);

    DecompositionRecord rec;
    if (args.kind == "jpolar")
      rec = jpolar(j, f.a, ray, PolarOrder::left, opts);
    else if (args.kind == "jpolar-right")
      rec = jpolar(j, f.a, ray, PolarOrder::right, opts);
    else if (args.kind == "sa-jiso-exp")
      rec = exp_decomp_sa_jisometric(j, f.a, opts);
    else if (args.kind == "junitary-exp")
      rec = exp_decomp_junitary(j, f.a, opts);
    else if (args.kind == "jsa-unitary-exp")
      rec = exp_decomp_jsa_unitary(j, f.a, opts);
    else if (args.kind == "unitary-exp")
      rec = exp_decomp_unitary(j, f.a, opts);
    else
      throw PreconditionError("unknown decomposition kind '" + args.kind + "'");
    r["n"] = f.a.rows();
    r["decomposition"] = record_to_json(rec);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string input = "-";
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
};

namespace detail {

struct Violations {
  Json list = Json::array();

  void add(const std::string& suite, const std::string& relation, double magnitude, const std::string& detail = {}) {
    Json v{{"suite", suite}, {"relation", relation}, {"magnitude", magnitude}};
    if (!detail.empty()) v["detail"] = detail;
    list.push_back(std::move(v));
  }
};

inline Json eigen_suite(const Conjugation& j, const Matrix& a, Violations& out) {
  const ClassificationFlags f = classify(j, a);
  Json audits = Json::object();
  auto record = [&](const char* name, const EigenAudit& audit) {
    Json v = Json::array();
    for (const auto& x : audit.violations) {
      v.push_back(Json{{"first", x.first}, {"second", x.second}, {"relation", x.relation}, {"magnitude", x.magnitude}});
      out.add("eigen", x.relation, x.magnitude, name);
    }
    audits[name] = Json{{"eigenpairs", audit.pairs.size()}, {"violations", v}};
  };
  if (f.j_symmetric) record("j_symmetric", audit_jsymmetric(j, a));
  if (f.j_skew_symmetric) record("j_skew_symmetric", audit_jskew(j, a));
  if (f.j_isometric) record("j_isometric", audit_jisometric(j, a));
  if (audits.empty()) {
    const auto& d = f.deviations;
    const double nearest = std::min({d.j_symmetric, d.j_skew_symmetric, d.j_isometric});
    out.add("eigen", "class_membership", nearest, "operator is in no audited class");
  }
  return Json{{"classification", classification_to_json(f)}, {"audits", audits}};
}

inline Json nullcone_suite(const Conjugation& j, std::size_t samples, std::uint64_t seed, Violations& out) {
  const ConeReport cone = cone_properties_check(j, samples, seed);
  Json checks = Json::array();
  for (const auto& c : cone.checks) {
    checks.push_back(Json{{"name", c.name}, {"tested", c.tested}, {"passed", c.passed}, {"cases", c.cases},
                          {"detail", c.detail}});
    if (c.tested && !c.passed) out.add("nullcone", c.name, 1.0, c.detail);
  }

  // Split-norm characterisation against the direct form on generic and on
  // null vectors.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const Matrix basis = j.corresponding_basis();
  std::size_t disagreements = 0, members = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = s % 2 == 0 ? jform::detail::gaussian_complex(rng, j.dim()) : jform::detail::random_null(rng, basis);
    const NullVectorWitness w = null_membership(j, x);
    members += w.member ? 1 : 0;
    if (w.member != w.direct_member) ++disagreements;
  }
  if (disagreements > 0)
    out.add("nullcone", "characterisation_agreement", static_cast<double>(disagreements));
  return Json{{"checks", checks},
              {"characterisation", Json{{"samples", samples}, {"members", members}, {"disagreements", disagreements}}}};
}

inline Json norm_suite(const Conjugation& j, const Matrix& a, std::size_t samples, std::uint64_t seed,
                       Violations& out) {
  const ClassificationFlags f = classify(j, a);
  const double sigma = spectral_norm(a);
  const double sampled = sampled_form_sup(j, a, samples, seed, false);
  Json r{{"spectral_norm", sigma}, {"sampled_quadratic_sup", sampled}};
  if (f.j_symmetric) {
    const NormWitness w = jsym_norm_witness(j, a);
    const double attained = std::abs(j.form(a * w.witness, w.witness));
    r["witness_value"] = attained;
    if (std::abs(attained - sigma) > 1e-10 * std::max(1.0, sigma))
      out.add("norm", "witness_attains_norm", std::abs(attained - sigma));
    if (sampled > sigma + 1e-12 * std::max(1.0, sigma)) out.add("norm", "sampled_sup_bound", sampled - sigma);
  }
  if (f.j_skew_symmetric && sampled > 1e-10 * residual_scale(a))
    out.add("norm", "skew_quadratic_form_vanishes", sampled);
  return r;
}

inline Json oracle_suite(const Matrix& a, Violations& out) {
  const BranchRay ray = auto_branch_ray(jform::detail::eigenvalues_of(a));
  const Matrix direct = matrix_sqrt_branch(a, ray);
  const Matrix quad = contour_sqrt(a, make_contour(a, ray, 512));
  const double diff = (direct - quad).norm();
  if (diff > 1e-6 * residual_scale(direct)) out.add("oracle", "contour_sqrt_agreement", diff);
  return Json{{"ray", ray_to_json(ray)}, {"nodes", 512}, {"frobenius_difference", diff}};
}

}  // namespace detail

inline CommandResult cmd_verify(const std::string& text, const VerifyArgs& args) {
  const Json echo{{"input", args.input}, {"suite", args.suite}, {"seed", args.seed}, {"samples", args.samples}};
  return detail::run("verify", echo, text, [&](Json& r) {
    static const std::vector<std::string> suites{"all", "eigen", "nullcone", "norm", "oracle"};
    if (std::find(suites.begin(), suites.end(), args.suite) == suites.end())
      throw PreconditionError("unknown suite '" + args.suite + "'");
    if (args.samples < 1) throw PreconditionError("samples must be >= 1");
    const MatrixFile f = parse_matrix_file(text);
    const Conjugation j = f.conj();
    r["seed"] = args.seed;
    r["n"] = f.a.rows();

    detail::Violations v;
    Json results = Json::object();
    const bool all = args.suite == "all";
    if (all || args.suite == "eigen") results["eigen"] = detail::eigen_suite(j, f.a, v);
    if (all || args.suite == "nullcone") results["nullcone"] = detail::nullcone_suite(j, args.samples, args.seed, v);
    if (all || args.suite == "norm") results["norm"] = detail::norm_suite(j, f.a, args.samples, args.seed, v);
    if (all || args.suite == "oracle") results["oracle"] = detail::oracle_suite(f.a, v);
    r["suites"] = results;
    r["violations"] = v.list;
    if (v.list.empty()) return kExitOk;
    r["first_violation"] = v.list[0]["relation"];
    return kExitViolation;
  });
}

// ---------------------------------------------------------------------------
// matrep

struct MatrepArgs {
  std::string input = "-";
  std::vector<std::size_t> windows{16, 64, 256};
};

inline CommandResult cmd_matrep(const std::string& text, const MatrepArgs& args) {
  Json win = Json::array();
  for (auto n : args.windows) win.push_back(n);
  const Json echo{{"input", args.input}, {"windows", win}};
  return detail::run("matrep", echo, text, [&](Json& r) {
    const SemiInfiniteMatrix m = parse_banded(text);
    const AdjointConsistencyReport rep = adjoint_consistency_check(m, args.windows);
    r["symmetry"] = to_string(m.symmetry());
    r["bandwidth"] = *m.bandwidth();
    Json windows = Json::array();
    for (const auto& w : rep.windows)
      windows.push_back(Json{{"n", w.n}, {"interior_rows", w.interior_rows}, {"max_deviation", w.max_deviation},
                             {"passed", w.passed}});
    r["windows"] = windows;
    if (rep.passed()) return kExitOk;
    r["first_violation"] = "adjoint_consistency";
    return kExitViolation;
  });
}

/// Report text: two-space indented JSON, one trailing newline.
inline std::string render(const CommandResult& res) { return res.report.dump(2) + "\n"; }

}  // namespace jform::cli
