#pragma once

// Spectral utilities: Takagi factorisation, joint diagonalisation of
// commuting self-adjoint pairs, and branch-aware matrix square roots and
// logarithms.

#include "jform/core.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace jform {

// ---------------------------------------------------------------------------
// Scalar branch calculus

/// Sign function with sgn(0) = -1.
///
/// NOTE: this is deliberately not std::signbit or the usual three-valued
/// sign. Zero maps to -1 so that sgn is a two-valued spectral projector
/// selector: sum over {+1,-1} of the corresponding spectral projections is
/// the identity even when 0 is in the spectrum.
inline int sgn_pm(double x) { return x > 0.0 ? 1 : -1; }

/// Radial ray L_phi = { t e^{i phi} : t >= 0 } used as the cut of the scalar
/// square root and logarithm.
///
/// The branch attached to a ray takes arguments in (phi - 2pi, phi); for
/// phi = pi this is the principal branch.
class BranchRay {
 public:
  explicit BranchRay(double phi, double clearance = 0.0)
      : phi_(normalize(phi)), clearance_(std::max(0.0, clearance)) {}

  double phi() const { return phi_; }
  double clearance() const { return clearance_; }

  /// Euclidean distance from p to the ray.
  double distance(Complex p) const { return distance(p, phi_); }

  static double distance(Complex p, double phi) {
    const Complex w = p * std::polar(1.0, -phi);
    return w.real() <= 0.0 ? std::abs(p) : std::abs(w.imag());
  }

  double clearance_from(std::span<const Complex> spectrum) const {
    double c = std::numeric_limits<double>::infinity();
    for (const Complex& p : spectrum) c = std::min(c, distance(p));
    return c;
  }

  /// Argument of z taken in the branch interval (phi - 2pi, phi].
  double branch_arg(Complex z) const {
    double theta = std::arg(z);
    while (theta > phi_) theta -= kTwoPi;
    while (theta <= phi_ - kTwoPi) theta += kTwoPi;
    return theta;
  }

  Complex sqrt(Complex z) const {
    if (z == Complex(0.0)) return Complex(0.0);
    return std::polar(std::sqrt(std::abs(z)), 0.5 * branch_arg(z));
  }

  Complex log(Complex z) const { return {std::log(std::abs(z)), branch_arg(z)}; }

  static double normalize(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
  }

 private:
  double phi_;
  double clearance_;
};

namespace detail {

inline double min_ray_distance(std::span<const Complex> spectrum, double phi) {
  double c = std::numeric_limits<double>::infinity();
  for (const Complex& p : spectrum) c = std::min(c, BranchRay::distance(p, phi));
  return c;
}

inline std::vector<Complex> eigenvalues_of(const Matrix& a) {
  Eigen::ComplexEigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

}  // namespace detail

inline constexpr int kRayGridSize = 720;
inline constexpr double kMinClearance = 1e-10;

/// Ray maximising the distance to a spectrum.
///
/// A 720-point angular grid locates the best region. When the maximum is
/// attained on an arc (every point lies "behind" the ray) the centre of the
/// longest such arc is returned; an isolated maximum is polished by
/// golden-section search. Ties go to the smallest angle.
inline BranchRay auto_branch_ray(std::span<const Complex> spectrum) {
  if (spectrum.empty()) return BranchRay(kPi, std::numeric_limits<double>::infinity());
  double scale = 0.0;
  for (const Complex& p : spectrum) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw PreconditionError("auto_branch_ray: non-finite spectrum");
    if (std::abs(p) <= 1e-12) throw PreconditionError("auto_branch_ray: spectrum contains 0");
    scale = std::max(scale, std::abs(p));
  }

  constexpr int n = kRayGridSize;
  const double step = kTwoPi / n;
  std::vector<double> value(n);
  for (int k = 0; k < n; ++k) value[k] = detail::min_ray_distance(spectrum, k * step);
  const double best = *std::max_element(value.begin(), value.end());
  if (best <= kMinClearance) throw NumericalError("no admissible branch ray: spectrum meets every ray");

  const double flat = 1e-12 * std::max(1.0, scale);
  std::vector<bool> top(n);
  for (int k = 0; k < n; ++k) top[k] = value[k] >= best - flat;

  // Circular runs of maximal grid points: (start, length).
  int first_gap = -1;
  for (int k = 0; k < n; ++k)
    if (!top[k]) { first_gap = k; break; }
  if (first_gap < 0) return BranchRay(0.0, best);  // every ray equally good

  int run_start = -1, run_len = 0, best_start = -1, best_len = 0;
  auto close_run = [&] {
    if (run_len == 0) return;
    const int start = run_start % n;
    if (run_len > best_len || (run_len == best_len && start < best_start)) {
      best_len = run_len;
      best_start = start;
    }
    run_len = 0;
  };
  for (int i = 1; i <= n; ++i) {
    const int k = (first_gap + i) % n;
    if (top[k]) {
      if (run_len == 0) run_start = first_gap + i;
      ++run_len;
    } else {
      close_run();
    }
  }
  close_run();

  if (best_len > 1) {
    const double centre = (best_start + 0.5 * (best_len - 1)) * step;
    const BranchRay ray(centre);
    return BranchRay(ray.phi(), detail::min_ray_distance(spectrum, ray.phi()));
  }

  // Golden-section refinement of an isolated maximum.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = best_start * step - step, hi = best_start * step + step;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = detail::min_ray_distance(spectrum, x1), f2 = detail::min_ray_distance(spectrum, x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = detail::min_ray_distance(spectrum, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = detail::min_ray_distance(spectrum, x1);
    }
  }
  double phi = 0.5 * (lo + hi);
  double clearance = detail::min_ray_distance(spectrum, phi);
  const double grid_phi = best_start * step;
  if (clearance < best) {
    phi = grid_phi;
    clearance = best;
  }
  const BranchRay ray(phi);
  return BranchRay(ray.phi(), clearance);
}

inline BranchRay auto_branch_ray(const std::vector<Complex>& spectrum) {
  return auto_branch_ray(std::span<const Complex>(spectrum));
}

// ---------------------------------------------------------------------------
// Matrix functions

inline Matrix expm(const Matrix& a) { return a.exp(); }

namespace detail {

/// Upper-triangular square root of a triangular matrix, diagonal taken on
/// the branch of `ray`.
inline Matrix triangular_sqrt(const Matrix& t, const BranchRay& ray) {
  const Eigen::Index n = t.rows();
  Matrix r = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) r(i, i) = ray.sqrt(t(i, i));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      Complex s = 0.0;
      for (Eigen::Index k = i + 1; k < j; ++k) s += r(i, k) * r(k, j);
      const Complex denom = r(i, i) + r(j, j);
      if (denom == Complex(0.0)) {
        if (t(i, j) - s != Complex(0.0))
          throw NumericalError("matrix square root does not exist (singular Jordan block)");
        r(i, j) = 0.0;
      } else {
        r(i, j) = (t(i, j) - s) / denom;
      }
    }
  }
  return r;
}

struct SchurForm {
  Matrix q;
  Matrix t;
};

inline SchurForm schur(const Matrix& a) {
  Eigen::ComplexSchur<Matrix> cs(a);
  if (cs.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
  return {cs.matrixU(), cs.matrixT()};
}

inline void require_off_ray(const Matrix& t, const BranchRay& ray) {
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    if (ray.distance(t(i, i)) <= kMinClearance)
      throw NumericalError("ray intersects spectrum (eigenvalue " + std::to_string(t(i, i).real()) +
                           (t(i, i).imag() < 0 ? "" : "+") + std::to_string(t(i, i).imag()) + "i)");
}

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int m) {
  std::vector<double> x(m), w(m);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace detail

/// Square root X of A with X^2 = A and spectrum of X in the image of the
/// branch attached to `ray`.
///
/// Schur form A = Q T Q*, scalar branch on the diagonal of T, and the
/// triangular recurrence r_ij (r_ii + r_jj) = t_ij - sum_k r_ik r_kj for the
/// strictly upper part. X is a polynomial in A.
inline Matrix matrix_sqrt_branch(const Matrix& a, const BranchRay& ray) {
  require_square(a, "matrix_sqrt_branch");
  require_finite(a, "matrix_sqrt_branch");
  const auto [q, t] = detail::schur(a);
  detail::require_off_ray(t, ray);
  const Matrix r = detail::triangular_sqrt(t, ray);
  return q * r * q.adjoint();
}

/// Logarithm X of A with e^X = A, diagonal branch consistent with
/// matrix_sqrt_branch on the same ray.
///
/// Inverse scaling and squaring on the Schur factor: one square root on the
/// requested branch, one on a rotated branch that moves the spectrum into the
/// right half plane, then principal roots until T is close to I, followed by
/// a Gauss-Legendre evaluation of log(I + M) = int_0^1 M (I + sM)^{-1} ds.
inline Matrix matrix_log_branch(const Matrix& a, const BranchRay& ray,
                                const std::stop_token& stop = {}) {
  require_square(a, "matrix_log_branch");
  require_finite(a, "matrix_log_branch");
  const auto [q, t0] = detail::schur(a);
  detail::require_off_ray(t0, ray);
  const Eigen::Index n = a.rows();

  Matrix t = detail::triangular_sqrt(t0, ray);
  t = detail::triangular_sqrt(t, BranchRay(0.5 * ray.phi() + 0.5 * kPi));
  int halvings = 2;
  const BranchRay principal(kPi);
  const Matrix id = Matrix::Identity(n, n);
  while ((t - id).norm() > 0.25) {
    throw_if_cancelled(stop);
    if (halvings >= 64) throw NumericalError("matrix_log_branch: square-root iteration did not converge");
    t = detail::triangular_sqrt(t, principal);
    ++halvings;
  }

  const Matrix m = t - id;
  const auto [nodes, weights] = detail::gauss_legendre_unit(16);
  Matrix l = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Matrix shifted = id + nodes[j] * m;
    l += weights[j] * shifted.triangularView<Eigen::Upper>().solve(m);
  }
  l *= std::ldexp(1.0, halvings);
  return q * l * q.adjoint();
}

// ---------------------------------------------------------------------------
// Takagi factorisation

struct TakagiFactors {
  Matrix u;           // unitary
  RealVector sigma;   // non-increasing, non-negative
};

/// A = U diag(sigma) U^T for complex symmetric A.
///
/// Uses the real symmetric embedding [[Re A, Im A], [Im A, -Re A]], whose
/// eigenvalues are +-sigma_k. An eigenvector (u; v) for +sigma gives the
/// Takagi vector u + iv. Columns for numerically zero sigma come from the
/// conjugated kernel of A instead, where the embedding cannot separate the
/// +-0 pairs.
inline TakagiFactors takagi(const Matrix& a) {
  require_square(a, "takagi");
  require_finite(a, "takagi");
  if ((a.transpose() - a).norm() > 1e-10 * residual_scale(a))
    throw PreconditionError("takagi: matrix is not symmetric");
  const Eigen::Index n = a.rows();
  const Matrix sym = 0.5 * (a + a.transpose());

  RealMatrix emb(2 * n, 2 * n);
  emb << sym.real(), sym.imag(), sym.imag(), -sym.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(emb);

  TakagiFactors out{Matrix(n, n), RealVector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index idx = 2 * n - 1 - k;
    out.sigma(k) = std::max(0.0, es.eigenvalues()(idx));
    const auto col = es.eigenvectors().col(idx);
    for (Eigen::Index i = 0; i < n; ++i) out.u(i, k) = Complex(col(i), col(n + i));
  }

  const double smax = out.sigma(0);
  const double thresh = 1e-12 * smax;
  Eigen::Index first_small = n;
  for (Eigen::Index k = 0; k < n; ++k)
    if (out.sigma(k) <= thresh) { first_small = k; break; }
  if (first_small < n) {
    Eigen::JacobiSVD<Matrix> svd(sym, Eigen::ComputeFullV);
    const Eigen::Index m = n - first_small;
    out.u.rightCols(m) = svd.matrixV().rightCols(m).conjugate();
    out.sigma.tail(m).setZero();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint diagonalisation

struct SpectralPair {
  double lambda;  // eigenvalue of the first operator
  double z;       // eigenvalue of the second operator
  Matrix basis;   // orthonormal columns spanning the joint eigenspace

  Matrix projector() const { return basis * basis.adjoint(); }
};

struct SpectralPairSet {
  std::vector<SpectralPair> pairs;
  Eigen::Index dim = 0;

  /// sum_j f(lambda_j, z_j) P_j
  template <typename F>
  Matrix apply(F&& f) const {
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& p : pairs) out += Complex(f(p.lambda, p.z)) * p.projector();
    return out;
  }
};

namespace detail {

/// Groups sorted values into runs whose consecutive gaps are <= gap.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> cluster(const RealVector& sorted, double gap) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> runs;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted(i) - sorted(i - 1) > gap) {
      runs.emplace_back(start, i - start);
      start = i;
    }
  }
  return runs;
}

inline Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace detail

/// Orthonormal joint eigenbasis of commuting self-adjoint S and T.
///
/// Eigenvalues of S are clustered with gap sqrt(tol) * scale; T is
/// diagonalised inside each cluster, and any remaining T-degenerate block is
/// re-diagonalised with S. Pair values are Rayleigh quotients, grouped
/// with the tight threshold tol * scale.
inline SpectralPairSet joint_diagonalize(const Matrix& s, const Matrix& t, double tol = 1e-10,
                                         const std::stop_token& stop = {}) {
  require_square(s, "joint_diagonalize");
  require_dim(t.rows(), s.rows(), "joint_diagonalize");
  require_dim(t.cols(), s.cols(), "joint_diagonalize");
  if (!(tol > 0.0)) throw PreconditionError("joint_diagonalize: tol must be positive");
  const double ns = s.norm(), nt = t.norm();
  if ((s - s.adjoint()).norm() > tol * std::max(1.0, ns) ||
      (t - t.adjoint()).norm() > tol * std::max(1.0, nt))
    throw PreconditionError("joint_diagonalize: operators are not self-adjoint");
  if ((s * t - t * s).norm() > tol * (ns * nt + 1.0))
    throw PreconditionError("joint_diagonalize: operators do not commute");

  const Eigen::Index n = s.rows();
  const Matrix sh = detail::hermitian_part(s), th = detail::hermitian_part(t);
  const double scale = std::max({1.0, ns, nt});
  const double gap = std::sqrt(tol) * scale;

  Eigen::SelfAdjointEigenSolver<Matrix> es(sh);
  Matrix vecs(n, n);
  Eigen::Index filled = 0;
  for (const auto& [start, len] : detail::cluster(es.eigenvalues(), gap)) {
    throw_if_cancelled(stop);
    const Matrix q = es.eigenvectors().middleCols(start, len);
    if (len == 1) {
      vecs.col(filled++) = q.col(0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> et(detail::hermitian_part(q.adjoint() * th * q));
    const Matrix qt = q * et.eigenvectors();
    for (const auto& [ts, tl] : detail::cluster(et.eigenvalues(), gap)) {
      const Matrix w = qt.middleCols(ts, tl);
      if (tl == 1) {
        vecs.col(filled++) = w.col(0);
        continue;
      }
      Eigen::SelfAdjointEigenSolver<Matrix> e2(detail::hermitian_part(w.adjoint() * sh * w));
      const Matrix ww = w * e2.eigenvectors();
      for (Eigen::Index c = 0; c < tl; ++c) vecs.col(filled++) = ww.col(c);
    }
  }

  struct Item {
    double lambda, z;
    Eigen::Index col;
  };
  std::vector<Item> items;
  items.reserve(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto v = vecs.col(c);
    items.push_back({(v.adjoint() * sh * v)(0, 0).real(), (v.adjoint() * th * v)(0, 0).real(), c});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.lambda != b.lambda ? a.lambda < b.lambda : a.z < b.z;
  });

  const double tight = tol * scale;
  SpectralPairSet out;
  out.dim = n;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i + 1;
    while (j < items.size() && items[j].lambda - items[j - 1].lambda <= tight) ++j;
    // Within a lambda-run, split by z.
    std::vector<Item> run(items.begin() + i, items.begin() + j);
    std::sort(run.begin(), run.end(), [](const Item& a, const Item& b) { return a.z < b.z; });
    std::size_t a = 0;
    while (a < run.size()) {
      std::size_t b = a + 1;
      while (b < run.size() && run[b].z - run[b - 1].z <= tight) ++b;
      SpectralPair p{0.0, 0.0, Matrix(n, static_cast<Eigen::Index>(b - a))};
      for (std::size_t k = a; k < b; ++k) {
        p.lambda += run[k].lambda;
        p.z += run[k].z;
        p.basis.col(static_cast<Eigen::Index>(k - a)) = vecs.col(run[k].col);
      }
      p.lambda /= static_cast<double>(b - a);
      p.z /= static_cast<double>(b - a);
      out.pairs.push_back(std::move(p));
      a = b;
    }
    i = j;
  }
  return out;
}

}  // namespace jform
