#pragma once

// Slow, independent cross-checks: a Cauchy-integral matrix square root and
// sampled suprema of the J-form. Nothing here shares code paths with the
// Schur-based matrix functions.

#include "jform/core.hpp"
#include "jform/jspace.hpp"
#include "jform/spectral.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace jform {

/// Keyhole contour around the spectrum: arc of the circle |z| = radius,
/// two segments parallel to the ray at distance `offset`, and a half circle
/// of radius `offset` around the origin on the far side of the ray.
struct ContourSpec {
  double ray_phi = kPi;
  double radius = 0.0;
  double offset = 0.0;
  int nodes = 512;
};

/// Contour for A and the given ray: offset = d/2 where d is the distance
/// from the spectrum to the ray, radius = spectral radius + d.
inline ContourSpec make_contour(const Matrix& a, const BranchRay& ray, int nodes = 512) {
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  double rho = 0.0, d = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    rho = std::max(rho, std::abs(es.eigenvalues()(k)));
    d = std::min(d, ray.distance(es.eigenvalues()(k)));
  }
  return {ray.phi(), rho + d, 0.5 * d, nodes};
}

namespace detail {

struct Piece {
  // z(s) for s in [0, 1] and dz/ds.
  std::function<Complex(double)> z;
  std::function<Complex(double)> dz;
};

struct Panel {
  std::size_t piece;
  double s0, s1;
};

/// Gauss-Legendre on [0, 1] by Golub-Welsch.
inline std::pair<RealVector, RealVector> gauss_legendre_gw(int m) {
  RealMatrix jac = RealMatrix::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(jac);
  RealVector x = 0.5 * (es.eigenvalues().array() + 1.0);
  RealVector w = es.eigenvectors().row(0).transpose().array().square();
  return {x, w};
}

/// Bisects [s0, s1] until each panel is no longer than the distance from
/// its midpoint to the nearest singularity.
inline void split_panels(const Piece& p, std::size_t index, double s0, double s1,
                         const std::vector<Complex>& singular, std::vector<Panel>& out, int depth = 0) {
  const double mid = 0.5 * (s0 + s1);
  const Complex zm = p.z(mid);
  double dist = std::numeric_limits<double>::infinity();
  for (const Complex& q : singular) dist = std::min(dist, std::abs(zm - q));
  const double length = std::abs(p.dz(mid)) * (s1 - s0);
  if (length <= dist || depth >= 48) {
    out.push_back({index, s0, s1});
    return;
  }
  split_panels(p, index, s0, mid, singular, out, depth + 1);
  split_panels(p, index, mid, s1, singular, out, depth + 1);
}

}  // namespace detail

/// (1/2 pi i) * contour integral of sqrt(lambda) (lambda E - A)^{-1} over
/// the keyhole contour, with the square root on the branch of the ray.
/// Composite Gauss-Legendre: each smooth piece is cut into panels no longer
/// than their distance to the eigenvalues and the branch point, and the
/// nodes are shared equally between panels (at least 8 per panel).
inline Matrix contour_sqrt(const Matrix& a, const ContourSpec& spec) {
  require_square(a, "contour_sqrt");
  if (spec.nodes < 64) throw PreconditionError("contour_sqrt: at least 64 nodes required");
  if (!(spec.offset > 0.0) || !(spec.radius > 2.0 * spec.offset))
    throw PreconditionError("contour_sqrt: invalid contour geometry");
  const BranchRay ray(spec.ray_phi);
  const Complex rot = std::polar(1.0, spec.ray_phi);
  // Singularities in the frame where the ray is the positive real axis.
  std::vector<Complex> singular{0.0};
  {
    Eigen::ComplexEigenSolver<Matrix> es(a, false);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const Complex l = es.eigenvalues()(k);
      if (std::abs(l) >= spec.radius) throw PreconditionError("contour_sqrt: radius does not enclose the spectrum");
      if (ray.distance(l) <= spec.offset) throw NumericalError("contour_sqrt: clearance violated");
      singular.push_back(l / rot);
    }
  }

  const double r = spec.radius, o = spec.offset;
  const double alpha = std::asin(o / r);
  const double xr = std::sqrt(r * r - o * o);

  std::vector<detail::Piece> pieces;
  // Outer arc, counter-clockwise from alpha to 2 pi - alpha.
  pieces.push_back({[=](double s) { return r * std::polar(1.0, alpha + s * (kTwoPi - 2 * alpha)); },
                    [=](double s) {
                      return Complex(0.0, kTwoPi - 2 * alpha) * r * std::polar(1.0, alpha + s * (kTwoPi - 2 * alpha));
                    }});
  // Lower segment, right to left at Im = -o.
  pieces.push_back({[=](double s) { return Complex(xr * (1.0 - s), -o); }, [=](double) { return Complex(-xr, 0.0); }});
  // Half circle of radius o through the negative axis, clockwise.
  pieces.push_back({[=](double s) { return o * std::polar(1.0, -0.5 * kPi - s * kPi); },
                    [=](double s) { return Complex(0.0, -kPi) * o * std::polar(1.0, -0.5 * kPi - s * kPi); }});
  // Upper segment, left to right at Im = +o.
  pieces.push_back({[=](double s) { return Complex(xr * s, o); }, [=](double) { return Complex(xr, 0.0); }});

  std::vector<detail::Panel> panels;
  for (std::size_t k = 0; k < pieces.size(); ++k) detail::split_panels(pieces[k], k, 0.0, 1.0, singular, panels);
  const int per = std::max(8, spec.nodes / static_cast<int>(panels.size()));
  const int extra = per == 8 ? 0 : spec.nodes - per * static_cast<int>(panels.size());

  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix acc = Matrix::Zero(n, n);
  std::map<int, std::pair<RealVector, RealVector>> rules;
  for (std::size_t q = 0; q < panels.size(); ++q) {
    const auto& pn = panels[q];
    const auto& p = pieces[pn.piece];
    const int m = per + (static_cast<int>(q) < extra ? 1 : 0);
    if (!rules.count(m)) rules.emplace(m, detail::gauss_legendre_gw(m));
    const auto& [x, w] = rules.at(m);
    const double h = pn.s1 - pn.s0;
    for (int k = 0; k < m; ++k) {
      const double s = pn.s0 + h * x(k);
      const Complex lam = rot * p.z(s);
      const Complex dlam = rot * p.dz(s) * h;
      Eigen::PartialPivLU<Matrix> lu(lam * id - a);
      const Matrix inv = lu.inverse();
      if (!inv.allFinite() || std::abs(lu.determinant()) == 0.0)
        throw NumericalError("contour_sqrt: resolvent singular at a node");
      acc += (w(k) * ray.sqrt(lam) * dlam) * inv;
    }
  }
  return acc / Complex(0.0, kTwoPi);
}

/// Running maximum of |[A x, y]_J| over random unit vectors (y = x when
/// `two_variable` is false). A lower bound for ||A|| and for the quadratic
/// form supremum respectively.
inline double sampled_form_sup(const Conjugation& j, const Matrix& a, std::size_t samples, std::uint64_t seed,
                               bool two_variable) {
  if (samples < 1) throw PreconditionError("sampled_form_sup: samples must be >= 1");
  require_dim(a.rows(), j.dim(), "sampled_form_sup");
  require_dim(a.cols(), j.dim(), "sampled_form_sup");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Eigen::Index n = a.rows();
  auto unit = [&] {
    Vector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = Complex(g(rng), g(rng));
    return Vector(v.normalized());
  };
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = unit();
    const Vector y = two_variable ? unit() : x;
    best = std::max(best, std::abs(j.form(a * x, y)));
  }
  return best;
}

}  // namespace jform
