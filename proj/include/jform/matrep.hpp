#pragma once

// Semi-infinite symmetric / skew-symmetric matrices given column by column,
// their action on finitely supported vectors, and finite windows.

#include "jform/core.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jform {

enum class Symmetry { symmetric, skew };

inline const char* to_string(Symmetry s) { return s == Symmetry::symmetric ? "symmetric" : "skew"; }

/// Non-zero entries of one column. `complete` is false when the column has
/// further non-zero entries beyond those listed; their l2 norm must then be
/// covered by the matrix's decay bound.
struct Column {
  std::vector<std::pair<std::size_t, Complex>> entries;
  bool complete = true;
};

using ColumnProvider = std::function<Column(std::size_t)>;
using DecayBound = std::function<double(std::size_t)>;

class SemiInfiniteMatrix {
 public:
  SemiInfiniteMatrix(Symmetry symmetry, ColumnProvider provider, std::optional<DecayBound> decay = std::nullopt,
                     std::optional<std::size_t> bandwidth = std::nullopt)
      : symmetry_(symmetry),
        provider_(std::move(provider)),
        decay_(std::move(decay)),
        bandwidth_(bandwidth),
        cache_(std::make_shared<Cache>()) {}

  /// Banded matrix from its diagonals on and above the main diagonal:
  /// a_{k, k+d} = upper[d][k]; entries past the end of a list repeat its last
  /// value. The lower part follows from the symmetry (the main diagonal of a
  /// skew matrix must be empty or zero).
  static SemiInfiniteMatrix banded(Symmetry symmetry, std::vector<std::vector<Complex>> upper) {
    if (symmetry == Symmetry::skew && !upper.empty())
      for (const Complex& v : upper[0])
        if (v != Complex(0.0)) throw PreconditionError("skew matrix must have a zero main diagonal");
    const std::size_t w = upper.empty() ? 0 : upper.size() - 1;
    auto diag = std::make_shared<std::vector<std::vector<Complex>>>(std::move(upper));
    const Complex sign = symmetry == Symmetry::symmetric ? 1.0 : -1.0;
    ColumnProvider provider = [diag, sign](std::size_t k) {
      auto value = [&](std::size_t d, std::size_t i) -> Complex {
        const auto& band = (*diag)[d];
        if (band.empty()) return 0.0;
        return i < band.size() ? band[i] : band.back();
      };
      Column c;
      // Rows above the diagonal: a_{k-d, k} = upper[d][k-d].
      for (std::size_t d = diag->size(); d-- > 1;)
        if (k >= d) {
          const Complex v = value(d, k - d);
          if (v != Complex(0.0)) c.entries.emplace_back(k - d, v);
        }
      if (!diag->empty()) {
        const Complex v = value(0, k);
        if (v != Complex(0.0)) c.entries.emplace_back(k, v);
      }
      // Rows below: a_{k+d, k} = sign * a_{k, k+d} = sign * upper[d][k].
      for (std::size_t d = 1; d < diag->size(); ++d) {
        const Complex v = sign * value(d, k);
        if (v != Complex(0.0)) c.entries.emplace_back(k + d, v);
      }
      return c;
    };
    return SemiInfiniteMatrix(symmetry, std::move(provider), std::nullopt, w);
  }

  static SemiInfiniteMatrix zero(Symmetry symmetry = Symmetry::symmetric) {
    return SemiInfiniteMatrix(symmetry, [](std::size_t) { return Column{}; }, std::nullopt, 0);
  }

  Symmetry symmetry() const { return symmetry_; }
  std::optional<std::size_t> bandwidth() const { return bandwidth_; }
  bool has_decay_bound() const { return decay_.has_value(); }
  double decay_bound(std::size_t k) const { return decay_ ? (*decay_)(k) : 0.0; }

  /// Memoised column k. Columns are checked against the declared symmetry
  /// on every pair already materialised.
  const Column& column(std::size_t k) const {
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->columns.find(k); it != cache_->columns.end()) return it->second;
    }
    Column c = provider_(k);
    for (const auto& e : c.entries)
      if (!std::isfinite(e.second.real()) || !std::isfinite(e.second.imag()))
        throw PreconditionError("column " + std::to_string(k) + " has a non-finite entry");
    if (!c.complete && !decay_) throw PreconditionError("missing decay bound on an unbounded-support column");
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->columns.emplace(k, std::move(c));
    if (inserted) check_symmetry_locked(k, it->second);
    return it->second;
  }

  Complex entry(std::size_t row, std::size_t col) const {
    for (const auto& [r, v] : column(col).entries)
      if (r == row) return v;
    return 0.0;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::map<std::size_t, Column> columns;
  };

  void check_symmetry_locked(std::size_t k, const Column& c) const {
    const Complex sign = symmetry_ == Symmetry::symmetric ? 1.0 : -1.0;
    for (const auto& [row, value] : c.entries) {
      const auto other = cache_->columns.find(row);
      if (other == cache_->columns.end()) continue;
      Complex mirror = 0.0;
      for (const auto& [r, v] : other->second.entries)
        if (r == k) mirror = v;
      if (std::abs(value - sign * mirror) > 1e-14 * std::max(1.0, std::abs(value)))
        throw PreconditionError("entries (" + std::to_string(row) + "," + std::to_string(k) +
                                ") violate the declared " + to_string(symmetry_) + " symmetry");
    }
  }

  Symmetry symmetry_;
  ColumnProvider provider_;
  std::optional<DecayBound> decay_;
  std::optional<std::size_t> bandwidth_;
  std::shared_ptr<Cache> cache_;
};

/// Finitely supported coefficient vector: g_k for k < size(), zero beyond.
using Coefficients = std::vector<Complex>;

struct SemiInfiniteProduct {
  Coefficients y;           // listed coefficients of A g
  double tail_bound = 0.0;  // l2 bound for coefficients not listed (0 if exact)
};

/// y_i = sum_k a_{i,k} g_k summed column-wise over the support of g.
inline SemiInfiniteProduct apply_semiinf(const SemiInfiniteMatrix& m, const Coefficients& g) {
  SemiInfiniteProduct out;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] == Complex(0.0)) continue;
    const Column& c = m.column(k);
    for (const auto& [row, value] : c.entries) {
      if (row >= out.y.size()) out.y.resize(row + 1, Complex(0.0));
      out.y[row] += value * g[k];
    }
    if (!c.complete) out.tail_bound += std::abs(g[k]) * m.decay_bound(k);
  }
  return out;
}

/// The same product computed row-wise through the symmetry,
/// y_i = +-sum_k a_{k,i} g_k. Only meaningful for complete columns.
inline Coefficients apply_semiinf_rowwise(const SemiInfiniteMatrix& m, const Coefficients& g, std::size_t rows) {
  const Complex sign = m.symmetry() == Symmetry::symmetric ? 1.0 : -1.0;
  Coefficients y(rows, Complex(0.0));
  for (std::size_t i = 0; i < rows; ++i) {
    // a_{i,k} = sign * a_{k,i}: read column i.
    Complex acc = 0.0;
    for (const auto& [k, value] : m.column(i).entries)
      if (k < g.size()) acc += value * g[k];
    y[i] = sign * acc;
  }
  return y;
}

/// Top-left n x n window.
inline Matrix truncate(const SemiInfiniteMatrix& m, std::size_t n) {
  if (n == 0) throw PreconditionError("truncate: window size must be positive");
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < n; ++k)
    for (const auto& [row, value] : m.column(k).entries)
      if (row < n) out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) = value;
  return out;
}

struct DomainEstimate {
  bool in_domain_estimate = false;
  double partial_norm = 0.0;  // sum_{i < horizon} |y_i|^2
  double tail_bound = 0.0;    // l2 bound on the rest of A g
};

/// Estimates whether g lies in the domain of the matrix-multiplication
/// operator B: partial sums of |y_i|^2 up to `horizon`, plus a certified
/// bound for what lies beyond.
inline DomainEstimate operator_b_membership(const SemiInfiniteMatrix& m, const Coefficients& g, std::size_t horizon) {
  if (horizon < g.size()) throw PreconditionError("operator_b_membership: horizon smaller than support");
  const SemiInfiniteProduct p = apply_semiinf(m, g);
  DomainEstimate out;
  double beyond = 0.0;
  for (std::size_t i = 0; i < p.y.size(); ++i) {
    const double v = std::norm(p.y[i]);
    if (i < horizon)
      out.partial_norm += v;
    else
      beyond += v;
  }
  out.tail_bound = std::sqrt(beyond) + p.tail_bound;
  out.in_domain_estimate = std::isfinite(out.partial_norm) && std::isfinite(out.tail_bound);
  return out;
}

struct AdjointWindowCheck {
  std::size_t n = 0;
  std::size_t interior_rows = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

struct AdjointConsistencyReport {
  std::vector<AdjointWindowCheck> windows;

  bool passed() const {
    for (const auto& w : windows)
      if (!w.passed) return false;
    return !windows.empty();
  }
};

/// For each window size n: the semi-infinite action A g and the window's
/// B g with B = A^T (symmetric) or B = -A^T (skew) must agree exactly on the
/// interior rows i < n - w, for basis vectors and one dense probe supported
/// in [0, n - w).
inline AdjointConsistencyReport adjoint_consistency_check(const SemiInfiniteMatrix& m,
                                                          const std::vector<std::size_t>& n_values) {
  if (!m.bandwidth()) throw PreconditionError("adjoint_consistency_check: matrix must be banded");
  const std::size_t w = *m.bandwidth();
  const Complex sign = m.symmetry() == Symmetry::symmetric ? 1.0 : -1.0;
  AdjointConsistencyReport report;
  for (std::size_t n : n_values) {
    AdjointWindowCheck chk;
    chk.n = n;
    chk.interior_rows = n > w ? n - w : 0;
    const Matrix b = sign * truncate(m, n).transpose();
    std::vector<Coefficients> probes;
    for (std::size_t k = 0; k < chk.interior_rows; ++k) {
      Coefficients e(k + 1, Complex(0.0));
      e[k] = 1.0;
      probes.push_back(std::move(e));
    }
    Coefficients dense(chk.interior_rows);
    for (std::size_t k = 0; k < dense.size(); ++k)
      dense[k] = Complex(static_cast<double>(k % 7) - 3.0, static_cast<double>(k % 5) - 2.0);
    if (!dense.empty()) probes.push_back(dense);

    for (const Coefficients& g : probes) {
      const SemiInfiniteProduct y = apply_semiinf(m, g);
      Vector gv = Vector::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < g.size(); ++k) gv(static_cast<Eigen::Index>(k)) = g[k];
      const Vector by = b * gv;
      for (std::size_t i = 0; i < chk.interior_rows; ++i) {
        const Complex yi = i < y.y.size() ? y.y[i] : Complex(0.0);
        chk.max_deviation = std::max(chk.max_deviation, std::abs(yi - by(static_cast<Eigen::Index>(i))));
      }
    }
    chk.passed = chk.max_deviation <= 1e-14;
    report.windows.push_back(chk);
  }
  return report;
}

}  // namespace jform
