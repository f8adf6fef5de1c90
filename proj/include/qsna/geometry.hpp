#pragma once

// Affine hulls, relative-interior membership of the origin, and separating
// directions for finite point sets in Q^d.

#include "qsna/linalg.hpp"
#include "qsna/lp.hpp"

#include <algorithm>
#include <set>

namespace qsna {

using PointSet = std::vector<Vec>;

/// Drops repeated points, keeping first occurrences in order.
inline PointSet unique_points(const PointSet& points) {
  PointSet out;
  std::set<Vec> seen;
  for (const auto& p : points)
    if (seen.insert(p).second) out.push_back(p);
  return out;
}

struct AffineSubspace {
  Vec base_point;
  std::vector<Vec> basis;

  std::size_t dim() const { return basis.size(); }
  std::size_t ambient_dim() const { return base_point.size(); }

  EchelonBasis direction() const {
    EchelonBasis e(ambient_dim());
    for (const auto& b : basis) e.insert(b);
    return e;
  }
};

/// Smallest affine set containing `points`: base is the first point and the
/// basis is a maximal independent subset of the differences, taken in order.
inline AffineSubspace affine_hull(const PointSet& points) {
  if (points.empty()) throw PreconditionError("affine_hull: empty point set");
  AffineSubspace aff{points.front(), {}};
  EchelonBasis echelon(aff.ambient_dim());
  for (std::size_t i = 1; i < points.size(); ++i) {
    Vec diff = sub(points[i], aff.base_point);
    if (echelon.insert(diff)) aff.basis.push_back(std::move(diff));
  }
  return aff;
}

inline bool aff_contains(const AffineSubspace& aff, const Vec& x) {
  return aff.direction().contains(sub(x, aff.base_point));
}

inline bool aff_equal(const AffineSubspace& a, const AffineSubspace& b) {
  if (a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim()) return false;
  if (!aff_contains(b, a.base_point)) return false;
  const EchelonBasis bd = b.direction();
  return std::all_of(a.basis.begin(), a.basis.end(), [&](const Vec& v) { return bd.contains(v); });
}

/// Orthogonal projection of the origin onto `aff`.
inline Vec min_norm_point(const AffineSubspace& aff) {
  const std::size_t k = aff.dim();
  if (k == 0) return aff.base_point;
  // Gram system: (B^T B) c = -B^T base.
  std::vector<Vec> gram(k, zeros(k));
  Vec rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram[i][j] = dot(aff.basis[i], aff.basis[j]);
    rhs[i] = -dot(aff.basis[i], aff.base_point);
  }
  auto c = solve_square(std::move(gram), std::move(rhs));
  if (!c) throw Error("min_norm_point: dependent basis");
  Vec p = aff.base_point;
  for (std::size_t i = 0; i < k; ++i) p = add(p, scaled(aff.basis[i], (*c)[i]));
  return p;
}

/// Positive rescaling so that the first nonzero coordinate has magnitude 1.
inline Vec normalize_direction(Vec h) {
  for (const auto& x : h) {
    if (sgn(x) != 0) {
      const Rational s = 1 / abs(x);
      for (auto& y : h) y *= s;
      break;
    }
  }
  return h;
}

struct RelativeInteriorCertificate {
  bool contains_zero = false;
  bool zero_in_affine_hull = false;
  /// Optimal margin of the max-epsilon program (when it was solved and feasible).
  std::optional<Rational> margin;
  /// Convex weights over the deduplicated points, all >= margin.
  Vec weights;
  PointSet points;
};

/// Decides 0 ∈ Ri(Conv(points)) by an affine-hull test followed by
///   max eps  s.t.  sum_i l_i y_i = 0,  sum_i l_i = 1,  l_i >= eps,  l >= 0.
/// The origin is in the relative interior iff the optimum is positive.
inline RelativeInteriorCertificate ri_conv_zero(const PointSet& input) {
  if (input.empty()) throw PreconditionError("ri_conv_contains_zero: empty point set");
  RelativeInteriorCertificate cert;
  cert.points = unique_points(input);
  const std::size_t d = cert.points.front().size();
  cert.zero_in_affine_hull = aff_contains(affine_hull(cert.points), zeros(d));
  if (!cert.zero_in_affine_hull) return cert;

  const std::size_t n = cert.points.size();
  LinearProgram lp(n + 1);
  lp.objective[n] = 1;
  lp.bounds.assign(n + 1, VariableBound{});
  lp.bounds[n] = VariableBound::free_variable();
  for (std::size_t j = 0; j < d; ++j) {
    Vec row = zeros(n + 1);
    for (std::size_t i = 0; i < n; ++i) row[i] = cert.points[i][j];
    lp.add_constraint(std::move(row), Relation::equal, 0);
  }
  {
    Vec row(n + 1, Rational(1));
    row[n] = 0;
    lp.add_constraint(std::move(row), Relation::equal, 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec row = zeros(n + 1);
    row[i] = 1;
    row[n] = -1;
    lp.add_constraint(std::move(row), Relation::greater_equal, 0);
  }
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal) return cert;
  cert.margin = res.value;
  cert.contains_zero = sgn(res.value) > 0;
  cert.weights.assign(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(n));
  return cert;
}

inline bool ri_conv_contains_zero(const PointSet& points) { return ri_conv_zero(points).contains_zero; }

/// Nonzero h in span(points) with h·y >= 0 for every point and either some
/// h·y > 0 or 0 ∉ Aff(points). Normalized by normalize_direction.
/// Throws PreconditionError when 0 ∈ Ri(Conv(points)).
inline Vec separating_vector(const PointSet& input) {
  if (input.empty()) throw PreconditionError("separating_vector: empty point set");
  const PointSet points = unique_points(input);
  const AffineSubspace aff = affine_hull(points);
  const std::size_t d = aff.ambient_dim();
  if (!aff_contains(aff, zeros(d))) {
    // h·y = |h|^2 > 0 on the whole affine hull.
    return normalize_direction(min_norm_point(aff));
  }
  if (ri_conv_contains_zero(points))
    throw PreconditionError("separating_vector: origin lies in the relative interior");

  // Aff(points) is the linear span of its basis here; search h = B c.
  const std::size_t k = aff.dim();
  LinearProgram lp(k);
  lp.bounds.assign(k, VariableBound::box(-1, 1));
  for (const auto& y : points) {
    Vec row(k);
    for (std::size_t i = 0; i < k; ++i) row[i] = dot(aff.basis[i], y);
    for (std::size_t i = 0; i < k; ++i) lp.objective[i] += row[i];
    lp.add_constraint(std::move(row), Relation::greater_equal, 0);
  }
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal || sgn(res.value) <= 0)
    throw Error("separating_vector: no separating direction found");
  Vec h = zeros(d);
  for (std::size_t i = 0; i < k; ++i) h = add(h, scaled(aff.basis[i], res.solution[i]));
  return normalize_direction(std::move(h));
}

}  // namespace qsna
