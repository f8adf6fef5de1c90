#pragma once

// Exact two-phase primal simplex over the rationals (dense tableau, Bland's rule).

#include "qsna/rational.hpp"

#include <optional>
#include <utility>

namespace qsna {

enum class Relation { less_equal, equal, greater_equal };
enum class Sense { maximize, minimize };

struct LinearConstraint {
  Vec coefficients;
  Relation relation = Relation::less_equal;
  Rational rhs = 0;
};

/// Bounds of one variable; a missing side is unbounded. Default is x >= 0.
struct VariableBound {
  std::optional<Rational> lower = Rational(0);
  std::optional<Rational> upper;

  static VariableBound free_variable() { return {std::nullopt, std::nullopt}; }
  static VariableBound box(Rational lo, Rational hi) { return {std::move(lo), std::move(hi)}; }
};

struct LinearProgram {
  Vec objective;
  Sense sense = Sense::maximize;
  std::vector<LinearConstraint> constraints;
  /// Empty means every variable is nonnegative.
  std::vector<VariableBound> bounds;

  LinearProgram() = default;
  explicit LinearProgram(std::size_t n, Sense s = Sense::maximize) : objective(zeros(n)), sense(s) {}

  std::size_t num_variables() const { return objective.size(); }

  void add_constraint(Vec row, Relation rel, Rational rhs) {
    constraints.push_back({std::move(row), rel, std::move(rhs)});
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational value = 0;  // meaningful only when optimal
  Vec solution;        // meaningful only when optimal
  std::size_t pivots = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::vector<Vec> rows, Vec rhs, std::vector<std::size_t> basis, std::size_t columns)
      : rows_(std::move(rows)), rhs_(std::move(rhs)), basis_(std::move(basis)), columns_(columns) {}

  std::size_t size() const { return rows_.size(); }
  std::size_t pivots() const { return pivots_; }
  const Rational& value() const { return value_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  const Vec& rhs() const { return rhs_; }
  const Vec& row(std::size_t i) const { return rows_[i]; }

  /// Maximizes cost·x over the allowed columns; false when unbounded.
  bool maximize(const Vec& cost, const std::vector<bool>& allowed) {
    reduced_.assign(columns_, Rational(0));
    value_ = 0;
    for (std::size_t j = 0; j < columns_; ++j) reduced_[j] = -cost[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < columns_; ++j)
        if (sgn(rows_[i][j]) != 0) reduced_[j] += cb * rows_[i][j];
      value_ += cb * rhs_[i];
    }
    for (;;) {
      std::size_t entering = columns_;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (allowed[j] && sgn(reduced_[j]) < 0) {
          entering = j;
          break;
        }
      }
      if (entering == columns_) return true;

      std::size_t leaving = rows_.size();
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][entering]) <= 0) continue;
        Rational ratio = rhs_[i] / rows_[i][entering];
        if (leaving == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leaving == rows_.size()) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    ++pivots_;
    Vec& pr = rows_[r];
    const Rational inv = 1 / pr[c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < columns_; ++j) {
      if (sgn(pr[j]) != 0) {
        pr[j] *= inv;
        nz.push_back(j);
      }
    }
    rhs_[r] *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || sgn(rows_[i][c]) == 0) continue;
      const Rational f = rows_[i][c];
      for (std::size_t j : nz) rows_[i][j] -= f * pr[j];
      rhs_[i] -= f * rhs_[r];
    }
    if (!reduced_.empty() && sgn(reduced_[c]) != 0) {
      const Rational f = reduced_[c];
      for (std::size_t j : nz) reduced_[j] -= f * pr[j];
      value_ -= f * rhs_[r];
    }
    basis_[r] = c;
  }

  void drop_row(std::size_t r) {
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
    rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::vector<Vec> rows_;
  Vec rhs_;
  std::vector<std::size_t> basis_;
  std::size_t columns_;
  Vec reduced_;
  Rational value_ = 0;
  std::size_t pivots_ = 0;
};

}  // namespace detail

/// Solves the program exactly. Infeasible and unbounded are reported in the
/// status, never thrown; malformed dimensions throw PreconditionError.
inline LpResult lp_solve(const LinearProgram& lp) {
  const std::size_t n = lp.num_variables();
  if (!lp.bounds.empty() && lp.bounds.size() != n) throw PreconditionError("lp_solve: bounds size mismatch");
  for (const auto& c : lp.constraints)
    if (c.coefficients.size() != n) throw PreconditionError("lp_solve: constraint size mismatch");

  // x_j = offset_j + sum over its columns of sign * y_col, y >= 0.
  struct Column {
    std::size_t var;
    int sign;
  };
  std::vector<Column> cols;
  Vec offset = zeros(n);
  std::vector<LinearConstraint> rows_in;  // in y-space, struct columns only
  std::vector<std::pair<std::size_t, Rational>> upper_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const VariableBound b = lp.bounds.empty() ? VariableBound{} : lp.bounds[j];
    if (b.lower) {
      offset[j] = *b.lower;
      cols.push_back({j, 1});
      if (b.upper) {
        if (*b.upper < *b.lower) return {LpStatus::infeasible, 0, {}, 0};
        upper_rows.emplace_back(cols.size() - 1, *b.upper - *b.lower);
      }
    } else if (b.upper) {
      offset[j] = *b.upper;
      cols.push_back({j, -1});
    } else {
      cols.push_back({j, 1});
      cols.push_back({j, -1});
    }
  }
  const std::size_t ns = cols.size();

  for (const auto& c : lp.constraints) {
    LinearConstraint r{zeros(ns), c.relation, c.rhs};
    for (std::size_t k = 0; k < ns; ++k) {
      const Rational& a = c.coefficients[cols[k].var];
      if (sgn(a) != 0) r.coefficients[k] = cols[k].sign > 0 ? a : Rational(-a);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(offset[j]) != 0) r.rhs -= c.coefficients[j] * offset[j];
    rows_in.push_back(std::move(r));
  }
  for (auto& [k, ub] : upper_rows) {
    LinearConstraint r{zeros(ns), Relation::less_equal, ub};
    r.coefficients[k] = 1;
    rows_in.push_back(std::move(r));
  }
  for (auto& r : rows_in) {
    if (sgn(r.rhs) < 0) {
      for (auto& a : r.coefficients) a = -a;
      r.rhs = -r.rhs;
      if (r.relation == Relation::less_equal)
        r.relation = Relation::greater_equal;
      else if (r.relation == Relation::greater_equal)
        r.relation = Relation::less_equal;
    }
  }

  const std::size_t m = rows_in.size();
  std::size_t slacks = 0, artificials = 0;
  for (const auto& r : rows_in) {
    if (r.relation != Relation::equal) ++slacks;
    if (r.relation != Relation::less_equal) ++artificials;
  }
  const std::size_t total = ns + slacks + artificials;
  const std::size_t first_art = ns + slacks;

  std::vector<Vec> rows(m, zeros(total));
  Vec rhs(m);
  std::vector<std::size_t> basis(m);
  std::size_t s = ns, a = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < ns; ++k) rows[i][k] = rows_in[i].coefficients[k];
    rhs[i] = rows_in[i].rhs;
    switch (rows_in[i].relation) {
      case Relation::less_equal:
        rows[i][s] = 1;
        basis[i] = s++;
        break;
      case Relation::greater_equal:
        rows[i][s++] = -1;
        rows[i][a] = 1;
        basis[i] = a++;
        break;
      case Relation::equal:
        rows[i][a] = 1;
        basis[i] = a++;
        break;
    }
  }

  detail::Tableau tab(std::move(rows), std::move(rhs), std::move(basis), total);
  std::vector<bool> allowed(total, true);

  if (artificials > 0) {
    Vec phase1 = zeros(total);
    for (std::size_t j = first_art; j < total; ++j) phase1[j] = -1;
    tab.maximize(phase1, allowed);
    if (sgn(tab.value()) < 0) return {LpStatus::infeasible, 0, {}, tab.pivots()};
    for (std::size_t i = 0; i < tab.size();) {
      if (tab.basis()[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (sgn(tab.row(i)[j]) != 0) {
          col = j;
          break;
        }
      }
      if (col == first_art) {
        tab.drop_row(i);  // redundant equality
      } else {
        tab.pivot(i, col);
        ++i;
      }
    }
    for (std::size_t j = first_art; j < total; ++j) allowed[j] = false;
  }

  Vec cost = zeros(total);
  for (std::size_t k = 0; k < ns; ++k) {
    Rational c = lp.objective[cols[k].var];
    if (lp.sense == Sense::minimize) c = -c;
    cost[k] = cols[k].sign > 0 ? c : Rational(-c);
  }
  if (!tab.maximize(cost, allowed)) return {LpStatus::unbounded, 0, {}, tab.pivots()};

  Vec x = offset;
  for (std::size_t i = 0; i < tab.size(); ++i) {
    const std::size_t b = tab.basis()[i];
    if (b < ns) {
      if (cols[b].sign > 0)
        x[cols[b].var] += tab.rhs()[i];
      else
        x[cols[b].var] -= tab.rhs()[i];
    }
  }
  LpResult result{LpStatus::optimal, dot(lp.objective, x), std::move(x), tab.pivots()};
  return result;
}

}  // namespace qsna
