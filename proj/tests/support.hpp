#pragma once

// Random operator generators shared by the unit tests and the acceptance run.

#include "jform/jform.hpp"

#include <cstdint>
#include <random>

namespace testkit {

using jform::Complex;
using jform::Matrix;
using jform::RealMatrix;
using jform::Vector;

struct Rng {
  std::mt19937_64 engine;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> uniform{0.0, 1.0};

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double gauss() { return normal(engine); }
  double unif(double lo, double hi) { return lo + (hi - lo) * uniform(engine); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

inline Matrix complex_gaussian(Rng& r, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index k = 0; k < n; ++k) m(k, c) = Complex(r.gauss(), r.gauss());
  return m;
}

inline RealMatrix real_gaussian(Rng& r, Eigen::Index n) {
  RealMatrix m(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index k = 0; k < n; ++k) m(k, c) = r.gauss();
  return m;
}

inline Vector complex_vector(Rng& r, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(r.gauss(), r.gauss());
  return v;
}

inline Vector unit_vector(Rng& r, Eigen::Index n) { return complex_vector(r, n).normalized(); }

inline Matrix complex_symmetric(Rng& r, Eigen::Index n) {
  const Matrix g = complex_gaussian(r, n);
  return 0.5 * (g + g.transpose());
}

inline Matrix complex_antisymmetric(Rng& r, Eigen::Index n) {
  const Matrix g = complex_gaussian(r, n);
  return 0.5 * (g - g.transpose());
}

inline RealMatrix real_orthogonal(Rng& r, Eigen::Index n) {
  Eigen::HouseholderQR<RealMatrix> qr(real_gaussian(r, n));
  RealMatrix q = qr.householderQ();
  return q;
}

inline RealMatrix real_symmetric(Rng& r, Eigen::Index n) {
  const RealMatrix g = real_gaussian(r, n);
  return 0.5 * (g + g.transpose());
}

inline RealMatrix real_antisymmetric(Rng& r, Eigen::Index n) {
  const RealMatrix g = real_gaussian(r, n);
  return 0.5 * (g - g.transpose());
}

/// Real symmetric matrix with eigenvalues drawn from (lo, hi).
inline RealMatrix real_symmetric_spectrum(Rng& r, Eigen::Index n, double lo, double hi) {
  const RealMatrix q = real_orthogonal(r, n);
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) d(k) = r.unif(lo, hi);
  return q * d.asDiagonal() * q.transpose();
}

/// Complex orthogonal matrix e^{K}, K complex antisymmetric of size `scale`.
inline Matrix complex_orthogonal(Rng& r, Eigen::Index n, double scale = 0.5) {
  const Matrix k = complex_antisymmetric(r, n);
  const Matrix e = (scale / std::max(1.0, jform::spectral_norm(k)) * k).exp();
  return e;
}

inline double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// Gaussian matrix redrawn until its condition number is at most `max_cond`.
inline Matrix invertible(Rng& r, Eigen::Index n, double max_cond = 1e6) {
  for (;;) {
    Matrix a = complex_gaussian(r, n);
    if (condition_number(a) <= max_cond) return a;
  }
}

/// Self-adjoint J-isometric A = I e^{iK}: I a real symmetric involution and
/// K real antisymmetric, both block diagonal in the same real orthogonal frame.
inline Matrix sa_jisometric(Rng& r, Eigen::Index n, RealMatrix* inv_out = nullptr, RealMatrix* k_out = nullptr) {
  RealMatrix inv = RealMatrix::Zero(n, n), k = RealMatrix::Zero(n, n);
  Eigen::Index i = 0;
  for (; i + 1 < n; i += 2) {
    const double theta = r.unif(-1.5, 1.5);
    const double s = r.uniform(r.engine) < 0.5 ? -1.0 : 1.0;
    k(i, i + 1) = theta;
    k(i + 1, i) = -theta;
    inv(i, i) = inv(i + 1, i + 1) = s;
  }
  if (i < n) inv(i, i) = r.uniform(r.engine) < 0.5 ? -1.0 : 1.0;
  const RealMatrix q = real_orthogonal(r, n);
  inv = q * inv * q.transpose();
  k = q * k * q.transpose();
  if (inv_out) *inv_out = inv;
  if (k_out) *k_out = k;
  const Matrix e = (Complex(0.0, 1.0) * k.cast<Complex>()).exp();
  return inv.cast<Complex>() * e;
}

/// J-unitary A = R e^{iK}, R real orthogonal, K real antisymmetric.
inline Matrix junitary(Rng& r, Eigen::Index n) {
  const RealMatrix rr = real_orthogonal(r, n);
  const RealMatrix k = real_antisymmetric(r, n);
  const Matrix e = (Complex(0.0, 1.0) * k.cast<Complex>()).exp();
  return rr.cast<Complex>() * e;
}

/// Unitary J-self-adjoint A = e^{iS}, S real symmetric with spectrum in (-3, 3).
inline Matrix jsa_unitary(Rng& r, Eigen::Index n) {
  const RealMatrix s = real_symmetric_spectrum(r, n, -3.0, 3.0);
  const Matrix e = (Complex(0.0, 1.0) * s.cast<Complex>()).exp();
  return e;
}

/// Unitary A = R e^{iS}, R real orthogonal, S real symmetric with spectrum
/// in (-1.5, 1.5).
inline Matrix unitary(Rng& r, Eigen::Index n) {
  const RealMatrix rr = real_orthogonal(r, n);
  const RealMatrix s = real_symmetric_spectrum(r, n, -1.5, 1.5);
  const Matrix e = (Complex(0.0, 1.0) * s.cast<Complex>()).exp();
  return rr.cast<Complex>() * e;
}

inline std::string matrix_json(const Matrix& a) {
  jform::MatrixFile f{a, std::nullopt};
  return jform::serialize_matrix_file(f);
}

}  // namespace testkit
