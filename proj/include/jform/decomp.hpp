#pragma once

// J-polar and exponential decompositions.
//
// Every routine returns a DecompositionRecord whose factors are accepted by
// residuals and factor-class checks only. The decompositions are not unique;
// nothing here compares against a particular generating factorisation.

#include "jform/core.hpp"
#include "jform/jspace.hpp"
#include "jform/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jform {

enum class DecompositionKind {
  jpolar_left,
  jpolar_right,
  sa_jisometric_exp,
  junitary_exp,
  jsa_unitary_exp,
  unitary_exp,
};

inline const char* to_string(DecompositionKind k) {
  switch (k) {
    case DecompositionKind::jpolar_left: return "jpolar_left";
    case DecompositionKind::jpolar_right: return "jpolar_right";
    case DecompositionKind::sa_jisometric_exp: return "sa_jisometric_exp";
    case DecompositionKind::junitary_exp: return "junitary_exp";
    case DecompositionKind::jsa_unitary_exp: return "jsa_unitary_exp";
    case DecompositionKind::unitary_exp: return "unitary_exp";
  }
  return "unknown";
}

enum class PolarOrder { left, right };

struct DecompositionRecord {
  DecompositionKind kind{};
  std::map<std::string, Matrix> factors;
  std::optional<BranchRay> ray;
  /// ||A - product of factors||_F / max(1, ||A||_F)
  double residual_reconstruction = 0.0;
  /// Class checks of each factor; all <= Tolerances::output on success.
  std::map<std::string, double> factor_residuals;
  /// Informational values that carry no pass/fail meaning (e.g. commutators).
  std::map<std::string, double> diagnostics;
  /// Joint spectral pairs used by the exponential decompositions.
  std::vector<std::pair<double, double>> joint_pairs;
  /// max |locus(lambda, z)| over joint_pairs.
  double locus_residual = 0.0;

  const Matrix& factor(const std::string& name) const { return factors.at(name); }
};

struct DecompOptions {
  Tolerances tol{};
  std::stop_token stop{};
};

namespace detail {

inline double rel(const Matrix& residual, const Matrix& reference) {
  return residual.norm() / residual_scale(reference);
}

inline void check_operator(const Conjugation& j, const Matrix& a, const char* what) {
  require_square(a, what);
  require_dim(a.rows(), j.dim(), what);
  require_finite(a, what);
}

inline void require_invertible(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) throw PreconditionError("operator not invertible");
}

inline void finish(DecompositionRecord& rec, const Matrix& a, const Matrix& product, const Tolerances& tol) {
  rec.residual_reconstruction = rel(a - product, a);
  if (rec.residual_reconstruction > tol.output)
    throw NumericalError(std::string(to_string(rec.kind)) + ": reconstruction residual " +
                         std::to_string(rec.residual_reconstruction) + " exceeds tolerance");
  for (const auto& [name, value] : rec.factor_residuals)
    if (!(value <= tol.output))
      throw NumericalError(std::string(to_string(rec.kind)) + ": factor residual " + name + " = " +
                           std::to_string(value) + " exceeds tolerance");
}

inline Matrix j_symmetrize(const Conjugation& j, const Matrix& s) { return 0.5 * (s + j.transpose(s)); }

/// A = S U with S = sqrt(A A^T) on the given (or automatic) branch ray.
inline DecompositionRecord jpolar_left(const Conjugation& j, const Matrix& a, std::optional<BranchRay> ray,
                                       const DecompOptions& opts) {
  const Matrix b = a * j.transpose(a);
  const std::vector<Complex> spectrum = eigenvalues_of(b);
  throw_if_cancelled(opts.stop);
  BranchRay chosen = ray ? BranchRay(ray->phi(), ray->clearance_from(spectrum)) : auto_branch_ray(spectrum);
  if (chosen.clearance() <= kMinClearance) throw NumericalError("ray intersects spectrum of A A^T");

  // S is a polynomial in the J-self-adjoint B, so it is J-self-adjoint up to
  // rounding; the projection removes that rounding.
  const Matrix s = j_symmetrize(j, matrix_sqrt_branch(b, chosen));
  throw_if_cancelled(opts.stop);
  const double sqrt_residual = rel(s * s - b, b);
  if (sqrt_residual > opts.tol.output) throw NumericalError("square root residual exceeds tolerance");
  const Matrix u = s.partialPivLu().solve(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());

  DecompositionRecord rec;
  rec.kind = DecompositionKind::jpolar_left;
  rec.ray = chosen;
  rec.factors["S"] = s;
  rec.factors["U"] = u;
  rec.factor_residuals["S_j_symmetry"] = rel(j.transpose(s) - s, s);
  rec.factor_residuals["S_squared"] = sqrt_residual;
  rec.factor_residuals["U_j_unitarity"] = (j.transpose(u) * u - id).norm();
  rec.diagnostics["commutator"] = (s * u - u * s).norm();
  return rec;
}

/// Spectral data of a self-adjoint J-isometric operator: A = sum (lambda + z) P
/// over the joint pairs of S = (A + JAJ)/2 and iT = (A - JAJ)/2, all on the
/// hyperbola lambda^2 - z^2 = 1.
struct HyperbolaSplit {
  Matrix involution;  // I = sum sgn(lambda) P
  Matrix generator;   // K = -i * scale * sum sgn(lambda) asinh(z) P
  std::vector<std::pair<double, double>> pairs;
  double locus = 0.0;
};

inline HyperbolaSplit hyperbola_split(const Conjugation& j, const Matrix& a, double scale,
                                      const DecompOptions& opts) {
  const Matrix at = j.j_adjoint(a);
  const Matrix s = 0.5 * (a + at);
  const Matrix it = 0.5 * (a - at);
  const SpectralPairSet set = joint_diagonalize(s, it, opts.tol.input, opts.stop);

  HyperbolaSplit out;
  for (const auto& p : set.pairs) {
    out.pairs.emplace_back(p.lambda, p.z);
    out.locus = std::max(out.locus, std::abs(p.lambda * p.lambda - p.z * p.z - 1.0));
  }
  if (out.locus > opts.tol.locus)
    throw NumericalError("joint spectrum is off the hyperbola lambda^2 - z^2 = 1 (residual " +
                         std::to_string(out.locus) + ")");

  const Eigen::Index n = a.rows();
  Eigen::LLT<Matrix> llt(0.5 * (a + a.adjoint()));
  if (llt.info() == Eigen::Success)
    out.involution = Matrix::Identity(n, n);
  else
    out.involution = set.apply([](double l, double) { return static_cast<double>(sgn_pm(l)); });
  const Matrix v = set.apply([scale](double l, double z) { return scale * sgn_pm(l) * std::asinh(z); });
  out.generator = Complex(0.0, -1.0) * v;
  return out;
}

/// Joint pairs of S = (A + A*)/2 and T = (A - A*)/(2i) for a unitary
/// J-self-adjoint A, all on the circle lambda^2 + z^2 = 1; returns
/// scale * sum sgn(z) arccos(lambda) P.
struct CircleSplit {
  Matrix generator;
  std::vector<std::pair<double, double>> pairs;
  double locus = 0.0;
};

inline CircleSplit circle_split(const Matrix& a, double scale, const DecompOptions& opts) {
  const Matrix s = 0.5 * (a + a.adjoint());
  const Matrix t = Complex(0.0, -0.5) * (a - a.adjoint());
  const SpectralPairSet set = joint_diagonalize(s, t, opts.tol.input, opts.stop);

  CircleSplit out;
  for (const auto& p : set.pairs) {
    out.pairs.emplace_back(p.lambda, p.z);
    out.locus = std::max(out.locus, std::abs(p.lambda * p.lambda + p.z * p.z - 1.0));
  }
  if (out.locus > opts.tol.locus)
    throw NumericalError("joint spectrum is off the circle lambda^2 + z^2 = 1 (residual " +
                         std::to_string(out.locus) + ")");
  out.generator = set.apply([scale](double l, double z) {
    return scale * sgn_pm(z) * std::acos(std::clamp(l, -1.0, 1.0));
  });
  return out;
}

inline void require_unitary(const Matrix& a, double tol, const char* what) {
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  if ((a.adjoint() * a - id).norm() > tol * residual_scale(a))
    throw PreconditionError(std::string(what) + ": operator is not unitary");
}

}  // namespace detail

/// J-polar decomposition A = S U (order left) or A = U1 S1 (order right).
///
/// S = sqrt(A A^T) is J-self-adjoint and U = S^{-1} A is J-unitary. The
/// right order applies the left algorithm to A^T and transposes the factors.
/// When no ray is given the ray with the largest clearance from the relevant
/// spectrum is chosen.
inline DecompositionRecord jpolar(const Conjugation& j, const Matrix& a, std::optional<BranchRay> ray = std::nullopt,
                                  PolarOrder order = PolarOrder::left, const DecompOptions& opts = {}) {
  detail::check_operator(j, a, "jpolar");
  detail::require_invertible(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());

  if (order == PolarOrder::left) {
    DecompositionRecord rec = detail::jpolar_left(j, a, ray, opts);
    detail::finish(rec, a, rec.factor("S") * rec.factor("U"), opts.tol);
    return rec;
  }

  const Matrix at = j.transpose(a);
  DecompositionRecord inner = detail::jpolar_left(j, at, ray, opts);
  const Matrix& s1 = inner.factor("S");
  const Matrix u1 = j.transpose(inner.factor("U"));

  DecompositionRecord rec;
  rec.kind = DecompositionKind::jpolar_right;
  rec.ray = inner.ray;
  rec.factors["S1"] = s1;
  rec.factors["U1"] = u1;
  rec.factor_residuals["S1_j_symmetry"] = inner.factor_residuals["S_j_symmetry"];
  rec.factor_residuals["S1_squared"] = detail::rel(s1 * s1 - at * a, at * a);
  rec.factor_residuals["U1_j_unitarity"] = (j.transpose(u1) * u1 - id).norm();
  rec.diagnostics["commutator"] = (s1 * u1 - u1 * s1).norm();
  detail::finish(rec, a, u1 * s1, opts.tol);
  return rec;
}

/// J-polar decomposition of A = E + K with ||K||_2 < 1.
inline DecompositionRecord jpolar_perturbation(const Conjugation& j, const Matrix& k, const DecompOptions& opts = {}) {
  detail::check_operator(j, k, "jpolar_perturbation");
  if (!(spectral_norm(k) < 1.0 - 1e-10)) throw PreconditionError("jpolar_perturbation: ||K|| must be < 1");
  const Matrix a = Matrix::Identity(k.rows(), k.cols()) + k;
  return jpolar(j, a, std::nullopt, PolarOrder::left, opts);
}

/// A = I e^{iK} for self-adjoint J-isometric A: I self-adjoint, J-real and
/// involutory; K J-real, skew-self-adjoint and commuting with I. Positive A
/// gives I = E.
inline DecompositionRecord exp_decomp_sa_jisometric(const Conjugation& j, const Matrix& a,
                                                    const DecompOptions& opts = {}) {
  detail::check_operator(j, a, "exp_decomp_sa_jisometric");
  const double scale = residual_scale(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  if ((a - a.adjoint()).norm() > opts.tol.input * scale)
    throw PreconditionError("exp_decomp_sa_jisometric: operator is not self-adjoint");
  if ((j.transpose(a) * a - id).norm() > opts.tol.input * scale)
    throw PreconditionError("exp_decomp_sa_jisometric: operator is not J-isometric");

  const detail::HyperbolaSplit split = detail::hyperbola_split(j, a, 1.0, opts);
  const Matrix& inv = split.involution;
  const Matrix& k = split.generator;

  DecompositionRecord rec;
  rec.kind = DecompositionKind::sa_jisometric_exp;
  rec.factors["I"] = inv;
  rec.factors["K"] = k;
  rec.joint_pairs = split.pairs;
  rec.locus_residual = split.locus;
  rec.factor_residuals["I_self_adjoint"] = detail::rel(inv - inv.adjoint(), inv);
  rec.factor_residuals["I_j_real"] = detail::rel(j.j_adjoint(inv) - inv, inv);
  rec.factor_residuals["I_involution"] = (inv * inv - id).norm();
  rec.factor_residuals["K_j_real"] = detail::rel(j.j_adjoint(k) - k, k);
  rec.factor_residuals["K_skew_self_adjoint"] = detail::rel(k + k.adjoint(), k);
  rec.factor_residuals["IK_commutator"] = detail::rel(inv * k - k * inv, k);
  detail::finish(rec, a, inv * expm(Complex(0.0, 1.0) * k), opts.tol);
  return rec;
}

/// A = R e^{iK} for J-unitary A: R J-real unitary, K J-real
/// skew-self-adjoint. K is half the generator of G = A* A.
inline DecompositionRecord exp_decomp_junitary(const Conjugation& j, const Matrix& a, const DecompOptions& opts = {}) {
  detail::check_operator(j, a, "exp_decomp_junitary");
  detail::require_invertible(a);
  const double scale = residual_scale(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  if ((j.transpose(a) * a - id).norm() > opts.tol.input * scale)
    throw PreconditionError("exp_decomp_junitary: operator is not J-unitary");

  const Matrix g = a.adjoint() * a;
  throw_if_cancelled(opts.stop);
  const detail::HyperbolaSplit split = detail::hyperbola_split(j, g, 0.5, opts);
  const Matrix& k = split.generator;
  const Matrix r = a * expm(Complex(0.0, -1.0) * k);

  DecompositionRecord rec;
  rec.kind = DecompositionKind::junitary_exp;
  rec.factors["R"] = r;
  rec.factors["K"] = k;
  rec.joint_pairs = split.pairs;
  rec.locus_residual = split.locus;
  rec.factor_residuals["R_unitary"] = (r.adjoint() * r - id).norm();
  rec.factor_residuals["R_j_real"] = detail::rel(j.j_adjoint(r) - r, r);
  rec.factor_residuals["K_j_real"] = detail::rel(j.j_adjoint(k) - k, k);
  rec.factor_residuals["K_skew_self_adjoint"] = detail::rel(k + k.adjoint(), k);
  detail::finish(rec, a, r * expm(Complex(0.0, 1.0) * k), opts.tol);
  return rec;
}

/// A = e^{iS} for unitary J-self-adjoint A: S J-real self-adjoint with
/// spectrum in [-pi, pi].
inline DecompositionRecord exp_decomp_jsa_unitary(const Conjugation& j, const Matrix& a,
                                                  const DecompOptions& opts = {}) {
  detail::check_operator(j, a, "exp_decomp_jsa_unitary");
  detail::require_unitary(a, opts.tol.input, "exp_decomp_jsa_unitary");
  if ((j.transpose(a) - a).norm() > opts.tol.input * residual_scale(a))
    throw PreconditionError("exp_decomp_jsa_unitary: operator is not J-self-adjoint");

  const detail::CircleSplit split = detail::circle_split(a, 1.0, opts);
  const Matrix& s = split.generator;

  DecompositionRecord rec;
  rec.kind = DecompositionKind::jsa_unitary_exp;
  rec.factors["S"] = s;
  rec.joint_pairs = split.pairs;
  rec.locus_residual = split.locus;
  rec.factor_residuals["S_self_adjoint"] = detail::rel(s - s.adjoint(), s);
  rec.factor_residuals["S_j_real"] = detail::rel(j.j_adjoint(s) - s, s);
  detail::finish(rec, a, expm(Complex(0.0, 1.0) * s), opts.tol);
  return rec;
}

/// A = R e^{iS} for unitary A: R J-real unitary, S J-real self-adjoint.
/// S is half the generator of G = A^T A.
inline DecompositionRecord exp_decomp_unitary(const Conjugation& j, const Matrix& a, const DecompOptions& opts = {}) {
  detail::check_operator(j, a, "exp_decomp_unitary");
  detail::require_unitary(a, opts.tol.input, "exp_decomp_unitary");
  const Matrix id = Matrix::Identity(a.rows(), a.cols());

  const Matrix g = j.transpose(a) * a;
  throw_if_cancelled(opts.stop);
  const detail::CircleSplit split = detail::circle_split(g, 0.5, opts);
  const Matrix& s = split.generator;
  const Matrix r = a * expm(Complex(0.0, -1.0) * s);

  DecompositionRecord rec;
  rec.kind = DecompositionKind::unitary_exp;
  rec.factors["R"] = r;
  rec.factors["S"] = s;
  rec.joint_pairs = split.pairs;
  rec.locus_residual = split.locus;
  rec.factor_residuals["R_unitary"] = (r.adjoint() * r - id).norm();
  rec.factor_residuals["R_j_real"] = detail::rel(j.j_adjoint(r) - r, r);
  rec.factor_residuals["S_self_adjoint"] = detail::rel(s - s.adjoint(), s);
  rec.factor_residuals["S_j_real"] = detail::rel(j.j_adjoint(s) - s, s);
  detail::finish(rec, a, r * expm(Complex(0.0, 1.0) * s), opts.tol);
  return rec;
}

}  // namespace jform
