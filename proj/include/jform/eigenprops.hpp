#pragma once

// Eigenvector structure of J-symmetric, J-skew-symmetric and J-isometric
// operators, and eigenspaces recovered as J-orthogonal complements of ranges.

#include "jform/core.hpp"
#include "jform/jspace.hpp"

#include <string>
#include <vector>

namespace jform {

struct EigenPair {
  Complex lambda;
  Vector vector;  // unit
};

struct AuditViolation {
  std::size_t first;
  std::size_t second;
  std::string relation;
  double magnitude;
};

struct EigenAudit {
  std::vector<EigenPair> pairs;
  std::vector<AuditViolation> violations;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kAuditTol = 1e-8;
inline constexpr double kRankTol = 1e-10;

namespace detail {

/// Eigenpairs from a dense solver, keeping only those whose residual is
/// within kAuditTol * ||A|| (generalised vectors of defective blocks drop out).
inline std::vector<EigenPair> eigenpairs(const Matrix& a) {
  Eigen::ComplexEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  const double bound = kAuditTol * std::max(spectral_norm(a), 1e-300);
  std::vector<EigenPair> out;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const Vector v = es.eigenvectors().col(k).normalized();
    const Complex l = es.eigenvalues()(k);
    if ((a * v - l * v).norm() <= bound) out.push_back({l, v});
  }
  return out;
}

/// Rayleigh quotient of y if y is an eigenvector of A.
inline std::optional<Complex> eigenvalue_if_eigenvector(const Matrix& a, const Vector& y) {
  const Vector u = y.normalized();
  const Complex mu = u.dot(a * u);
  if ((a * u - mu * u).norm() <= kAuditTol * std::max(spectral_norm(a), 1e-300)) return mu;
  return std::nullopt;
}

template <typename DifferentPred, typename NullPred, typename ConjRel>
EigenAudit audit(const Conjugation& j, const Matrix& a, DifferentPred needs_orthogonality, NullPred needs_null,
                 ConjRel conj_relation) {
  EigenAudit out;
  out.pairs = eigenpairs(a);
  const auto& p = out.pairs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (needs_null(p[i].lambda)) {
      const double m = std::abs(j.form(p[i].vector, p[i].vector));
      if (m > kAuditTol) out.violations.push_back({i, i, "null_eigenvector", m});
    }
    for (std::size_t k = i + 1; k < p.size(); ++k) {
      if (!needs_orthogonality(p[i].lambda, p[k].lambda)) continue;
      const double m = std::abs(j.form(p[i].vector, p[k].vector));
      if (m > kAuditTol) out.violations.push_back({i, k, "j_orthogonality", m});
    }
    if (const auto mu = eigenvalue_if_eigenvector(a, j.apply(p[i].vector))) {
      const double m = conj_relation(p[i].lambda, *mu);
      if (m > kAuditTol * std::max(1.0, std::abs(p[i].lambda)))
        out.violations.push_back({i, i, "conjugate_eigenvalue", m});
    }
  }
  return out;
}

}  // namespace detail

/// J-symmetric A: eigenvectors of different eigenvalues are J-orthogonal;
/// if x and Jx are both eigenvectors their eigenvalues coincide.
inline EigenAudit audit_jsymmetric(const Conjugation& j, const Matrix& a) {
  if (!classify(j, a).j_symmetric) throw PreconditionError("audit_jsymmetric: operator is not J-symmetric");
  return detail::audit(
      j, a, [](Complex x, Complex y) { return std::abs(x - y) > kAuditTol; }, [](Complex) { return false; },
      [](Complex lx, Complex mu) { return std::abs(lx - mu); });
}

/// J-skew-symmetric A: eigenvectors of non-zero eigenvalues are null;
/// lambda_x != -lambda_y gives J-orthogonality; x, Jx eigenvectors have
/// opposite eigenvalues.
inline EigenAudit audit_jskew(const Conjugation& j, const Matrix& a) {
  if (!classify(j, a).j_skew_symmetric) throw PreconditionError("audit_jskew: operator is not J-skew-symmetric");
  return detail::audit(
      j, a, [](Complex x, Complex y) { return std::abs(x + y) > kAuditTol; },
      [](Complex l) { return std::abs(l) > kAuditTol; }, [](Complex lx, Complex mu) { return std::abs(lx + mu); });
}

/// J-isometric A: eigenvectors of eigenvalues other than +-1 are null;
/// lambda_x != 1/lambda_y gives J-orthogonality; x, Jx eigenvectors have
/// reciprocal eigenvalues.
inline EigenAudit audit_jisometric(const Conjugation& j, const Matrix& a) {
  if (!classify(j, a).j_isometric) throw PreconditionError("audit_jisometric: operator is not J-isometric");
  return detail::audit(
      j, a, [](Complex x, Complex y) { return std::abs(x * y - 1.0) > kAuditTol; },
      [](Complex l) { return std::abs(l - 1.0) > kAuditTol && std::abs(l + 1.0) > kAuditTol; },
      [](Complex lx, Complex mu) { return std::abs(lx * mu - 1.0); });
}

/// Orthonormal basis of { x : [x, m]_J = 0 for every column m }.
/// Its dimension is n - rank(span), ranks decided at kRankTol * sigma_max.
inline Matrix j_orth_complement(const Conjugation& j, const Matrix& span) {
  const Eigen::Index n = j.dim();
  require_dim(span.rows(), n, "j_orth_complement");
  if (span.cols() == 0) return Matrix::Identity(n, n);
  // [x, m]_J = m^T conj(C) x, so the complement is the kernel of M^T conj(C).
  const Matrix pairing = span.transpose() * j.matrix().conjugate();
  Eigen::JacobiSVD<Matrix> svd(pairing, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > kRankTol * sv(0)) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

enum class OperatorClass { jsa, jskew_sa, junitary };

/// Eigenspace of lambda as the J-orthogonal complement of range(A - mu E),
/// with mu = lambda, -lambda or 1/lambda for J-self-adjoint,
/// J-skew-self-adjoint and J-unitary A. Empty result means lambda is not an
/// eigenvalue.
inline Matrix eigenspace_via_range_deficiency(const Conjugation& j, const Matrix& a, Complex lambda,
                                              OperatorClass kind) {
  require_square(a, "eigenspace_via_range_deficiency");
  const ClassificationFlags f = classify(j, a);
  Complex mu = lambda;
  switch (kind) {
    case OperatorClass::jsa:
      if (!f.j_symmetric) throw PreconditionError("operator is not J-self-adjoint");
      break;
    case OperatorClass::jskew_sa:
      if (!f.j_skew_symmetric) throw PreconditionError("operator is not J-skew-self-adjoint");
      mu = -lambda;
      break;
    case OperatorClass::junitary:
      if (!f.j_unitary) throw PreconditionError("operator is not J-unitary");
      if (lambda == Complex(0.0)) throw PreconditionError("lambda must be non-zero for a J-unitary operator");
      mu = 1.0 / lambda;
      break;
  }

  const Eigen::Index n = a.rows();
  const Matrix shifted = a - mu * Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  if (sv(0) > 0.0)
    for (Eigen::Index k = 0; k < n; ++k)
      if (sv(k) > kRankTol * sv(0)) ++rank;
  const Matrix basis = j_orth_complement(j, svd.matrixU().leftCols(rank));

  const double bound = kAuditTol * spectral_norm(a);
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    if ((a * basis.col(c) - lambda * basis.col(c)).norm() > bound)
      throw NumericalError("recovered vector is not an eigenvector (class tolerance too loose?)");
  return basis;
}

}  // namespace jform
