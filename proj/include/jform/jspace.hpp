#pragma once

// Conjugations, the bilinear J-form, transposes and J-adjoints, and the
// structural classification of operators relative to a conjugation.

#include "jform/core.hpp"
#include "jform/spectral.hpp"

#include <optional>
#include <utility>

namespace jform {

/// Antilinear involution x -> C conj(x) on C^n, stored through its symmetric
/// unitary matrix C. In a corresponding orthonormal basis F (C = F F^T) it
/// acts by conjugating coordinates.
class Conjugation {
 public:
  /// Coordinatewise complex conjugation (C = E).
  static Conjugation standard(Eigen::Index n) {
    if (n <= 0) throw DimensionError("Conjugation: dimension must be positive");
    return Conjugation(Matrix::Identity(n, n), true);
  }

  /// Validates C: symmetric to 1e-14, unitary and involutive to 1e-12.
  static Conjugation from_matrix(const Matrix& c) {
    require_square(c, "Conjugation");
    require_finite(c, "Conjugation");
    const Eigen::Index n = c.rows();
    const Matrix id = Matrix::Identity(n, n);
    if ((c.transpose() - c).norm() > 1e-14 * std::max(1.0, c.norm()))
      throw PreconditionError("Conjugation: C is not symmetric");
    if ((c.adjoint() * c - id).norm() > 1e-12)
      throw PreconditionError("Conjugation: C is not unitary");
    if ((c * c.conjugate() - id).norm() > 1e-12)
      throw PreconditionError("Conjugation: J^2 != E");
    return Conjugation(c, c == id);
  }

  /// Conjugation whose corresponding basis has the columns of a unitary F.
  static Conjugation from_basis(const Matrix& f) {
    require_square(f, "Conjugation");
    if ((f.adjoint() * f - Matrix::Identity(f.rows(), f.cols())).norm() > 1e-12)
      throw PreconditionError("Conjugation: basis is not orthonormal");
    Matrix c = f * f.transpose();
    c = (0.5 * (c + c.transpose())).eval();
    return Conjugation(c, false);
  }

  Eigen::Index dim() const { return c_.rows(); }
  const Matrix& matrix() const { return c_; }
  bool is_standard() const { return standard_; }

  Vector apply(const Vector& x) const {
    require_dim(x.size(), dim(), "apply_conjugation");
    if (standard_) return x.conjugate();
    return c_ * x.conjugate();
  }

  /// [x, y]_J = (x, Jy) = x^T conj(C) y.
  Complex form(const Vector& x, const Vector& y) const {
    require_dim(x.size(), dim(), "j_form");
    require_dim(y.size(), dim(), "j_form");
    if (standard_) return (x.transpose() * y)(0, 0);
    return (x.transpose() * (c_.conjugate() * y))(0, 0);
  }

  /// A^T = J A* J.
  Matrix transpose(const Matrix& a) const {
    check_operator(a, "transpose_op");
    if (standard_) return a.transpose();
    return c_ * a.transpose() * c_.conjugate();
  }

  /// J A J.
  Matrix j_adjoint(const Matrix& a) const {
    check_operator(a, "j_adjoint_op");
    if (standard_) return a.conjugate();
    return c_ * a.conjugate() * c_.conjugate();
  }

  /// One orthonormal basis F with C = F F^T. Not canonical: any F Q with Q
  /// real orthogonal is equally valid.
  Matrix corresponding_basis() const {
    if (standard_) return Matrix::Identity(dim(), dim());
    const TakagiFactors tf = takagi(c_);
    return tf.u * tf.sigma.cwiseSqrt().cast<Complex>().asDiagonal();
  }

 private:
  Conjugation(Matrix c, bool standard) : c_(std::move(c)), standard_(standard) {}

  void check_operator(const Matrix& a, const char* what) const {
    require_dim(a.rows(), dim(), what);
    require_dim(a.cols(), dim(), what);
  }

  Matrix c_;
  bool standard_;
};

inline Vector apply_conjugation(const Conjugation& j, const Vector& x) { return j.apply(x); }
inline Complex j_form(const Conjugation& j, const Vector& x, const Vector& y) { return j.form(x, y); }
inline Matrix transpose_op(const Conjugation& j, const Matrix& a) { return j.transpose(a); }
inline Matrix j_adjoint_op(const Conjugation& j, const Matrix& a) { return j.j_adjoint(a); }

// ---------------------------------------------------------------------------
// Classification

struct ClassificationDeviations {
  double j_symmetric = 0.0;       // ||A^T - A||
  double j_skew_symmetric = 0.0;  // ||A^T + A||
  double j_isometric = 0.0;       // ||A^T A - E||
  double j_unitary = 0.0;         // max(||A^T A - E||, ||A A^T - E||)
  double j_normal = 0.0;          // ||A^T A - A A^T||
  double j_real = 0.0;            // ||J A J - A||
};

struct ClassificationFlags {
  bool j_symmetric = false;
  bool j_skew_symmetric = false;
  bool j_isometric = false;
  bool j_unitary = false;
  bool j_normal = false;
  bool j_real = false;
  ClassificationDeviations deviations;
  double tol = 1e-10;
};

/// Frobenius residuals of each defining identity, divided by max(1, ||A||_F).
/// Never throws on a well-shaped input; callers read the flags they need.
inline ClassificationFlags classify(const Conjugation& j, const Matrix& a, double tol = 1e-10) {
  if (!(tol > 0.0)) throw PreconditionError("classify: tol must be positive");
  require_dim(a.rows(), j.dim(), "classify");
  require_dim(a.cols(), j.dim(), "classify");
  const double scale = residual_scale(a);
  const Matrix at = j.transpose(a);
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  const Matrix ata = at * a, aat = a * at;

  ClassificationFlags f;
  f.tol = tol;
  auto& d = f.deviations;
  d.j_symmetric = (at - a).norm() / scale;
  d.j_skew_symmetric = (at + a).norm() / scale;
  d.j_isometric = (ata - id).norm() / scale;
  d.j_unitary = std::max(d.j_isometric, (aat - id).norm() / scale);
  d.j_normal = (ata - aat).norm() / scale;
  d.j_real = (j.j_adjoint(a) - a).norm() / scale;

  f.j_symmetric = d.j_symmetric <= tol;
  f.j_skew_symmetric = d.j_skew_symmetric <= tol;
  f.j_isometric = d.j_isometric <= tol;
  f.j_unitary = d.j_unitary <= tol;
  f.j_normal = d.j_normal <= tol;
  f.j_real = d.j_real <= tol;
  return f;
}

// ---------------------------------------------------------------------------
// Norm of a J-symmetric operator through its quadratic J-form

struct NormWitness {
  double norm;
  Vector witness;  // unit vector with |[A w, w]_J| = norm
};

/// ||A|| = sup_{|x|=1} |[Ax, x]_J| for J-symmetric A, attained at the
/// conjugate of the leading Takagi vector of A written in a corresponding
/// basis.
namespace detail {

inline NormWitness takagi_witness(const Conjugation& j, const Matrix& a) {
  const Matrix basis = j.corresponding_basis();
  Matrix local = j.is_standard() ? a : Matrix(basis.adjoint() * a * basis);
  local = (0.5 * (local + local.transpose())).eval();
  const TakagiFactors tf = takagi(local);
  Vector w = tf.u.col(0).conjugate();
  if (!j.is_standard()) w = basis * w;
  return {tf.sigma(0), w.normalized()};
}

}  // namespace detail

inline NormWitness jsym_norm_witness(const Conjugation& j, const Matrix& a) {
  const ClassificationFlags f = classify(j, a, 1e-10);
  if (!f.j_symmetric) throw PreconditionError("jsym_norm_witness: operator is not J-symmetric");
  return detail::takagi_witness(j, a);
}

/// Unit x maximising |[Ax, x]_J| over all unit vectors. Only the J-symmetric
/// part (A + A^T)/2 contributes to the quadratic form, so the maximum is its
/// norm; it vanishes exactly when A is J-skew-symmetric.
inline NormWitness quadratic_form_witness(const Conjugation& j, const Matrix& a) {
  require_dim(a.rows(), j.dim(), "quadratic_form_witness");
  require_dim(a.cols(), j.dim(), "quadratic_form_witness");
  return detail::takagi_witness(j, 0.5 * (a + j.transpose(a)));
}

}  // namespace jform
