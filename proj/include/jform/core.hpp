#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <stop_token>
#include <string>

namespace jform {

using Complex = std::complex<double>;
/// Dense operator acting in the J-space (row/column layout is Eigen's default).
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input does not belong to the class an operation requires.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input was admissible but the computation could not meet its tolerances
/// (no admissible branch ray, residual blowup, singular quadrature node).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class Cancelled : public Error {
 public:
  Cancelled() : Error("operation cancelled") {}
};

/// Tolerance ladder shared by the decomposition routines.
struct Tolerances {
  double input = 1e-10;   // class membership of the input
  double locus = 1e-6;    // joint spectral pairs on their hyperbola/circle
  double output = 1e-8;   // reconstruction and factor-class residuals
};

inline void throw_if_cancelled(const std::stop_token& stop) {
  if (stop.stop_requested()) throw Cancelled();
}

inline void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw DimensionError(std::string(what) + ": operator must be a non-empty square matrix");
}

inline void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw PreconditionError(std::string(what) + ": non-finite entries");
}

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                         " vs " + std::to_string(want) + ")");
}

/// max(1, ||a||_F), the normalisation used for all relative residuals.
inline double residual_scale(const Matrix& a) { return std::max(1.0, a.norm()); }

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline double min_singular_value(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Frobenius norm of the imaginary part; zero for a real matrix.
inline double imag_norm(const Matrix& a) { return a.imag().norm(); }

}  // namespace jform
