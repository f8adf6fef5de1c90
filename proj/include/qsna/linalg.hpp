#pragma once

// Exact Gaussian elimination helpers.

#include "qsna/rational.hpp"

#include <optional>
#include <utility>

namespace qsna {

/// Incrementally built row-echelon basis of a linear subspace of Q^n.
/// Each stored row has a 1 at its pivot and zeros at the pivots of the rows
/// inserted before it.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t ambient) : ambient_(ambient) {}

  std::size_t ambient_dim() const { return ambient_; }
  std::size_t rank() const { return rows_.size(); }

  /// Residual of `v` after eliminating every pivot; zero iff v is in the span.
  Vec reduce(Vec v) const {
    if (v.size() != ambient_) throw PreconditionError("EchelonBasis: dimension mismatch");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational factor = v[pivots_[i]];
      if (sgn(factor) == 0) continue;
      const Vec& row = rows_[i];
      for (std::size_t j = 0; j < ambient_; ++j)
        if (sgn(row[j]) != 0) v[j] -= factor * row[j];
    }
    return v;
  }

  bool contains(const Vec& v) const { return is_zero(reduce(v)); }

  /// Returns true iff `v` was independent of the current rows (and adds it).
  bool insert(const Vec& v) {
    Vec r = reduce(v);
    std::size_t p = 0;
    while (p < ambient_ && sgn(r[p]) == 0) ++p;
    if (p == ambient_) return false;
    const Rational inv = 1 / r[p];
    for (auto& x : r) x *= inv;
    rows_.push_back(std::move(r));
    pivots_.push_back(p);
    return true;
  }

 private:
  std::size_t ambient_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> pivots_;
};

/// Solves A x = b for square nonsingular A; nullopt if A is singular.
inline std::optional<Vec> solve_square(std::vector<Vec> a, Vec b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw PreconditionError("solve_square: dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a[piv][col]) == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

}  // namespace qsna
