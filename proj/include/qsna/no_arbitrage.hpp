#pragma once

// Local, global and single-prior quasi-sure no-arbitrage, arbitrage witness
// extraction, and the LP arbitrage oracles used to cross-check them.

#include "qsna/market.hpp"

namespace qsna {

struct LocalVerdict {
  Prefix node;
  bool holds = false;
  /// h with h·y >= 0 on D and h·y > 0 somewhere (when NA fails).
  std::optional<Vec> witness;
  /// Strictly positive convex weights on `support` averaging to 0 (when NA holds).
  std::optional<Vec> certificate;
  PointSet support;
};

inline LocalVerdict local_na(const ScenarioTree& tree, const Prefix& node) {
  LocalVerdict v;
  v.node = node;
  v.support = support_D(tree, node);
  RelativeInteriorCertificate cert = ri_conv_zero(v.support);
  v.holds = cert.contains_zero;
  if (v.holds)
    v.certificate = std::move(cert.weights);
  else
    v.witness = separating_vector(v.support);
  return v;
}

/// Independent local oracle: NA fails iff
///   max sum_y h·y  s.t.  h·y >= 0 for y in D,  |h_j| <= 1
/// has a positive optimum. Returns true when NA holds.
inline bool local_na_lp_oracle(const PointSet& support) {
  if (support.empty()) throw PreconditionError("local_na_lp_oracle: empty support");
  const std::size_t d = support.front().size();
  LinearProgram lp(d);
  lp.bounds.assign(d, VariableBound::box(-1, 1));
  for (const auto& y : support) {
    for (std::size_t j = 0; j < d; ++j) lp.objective[j] += y[j];
    lp.add_constraint(y, Relation::greater_equal, 0);
  }
  const LpResult res = lp_solve(lp);
  return res.status == LpStatus::optimal && sgn(res.value) <= 0;
}

struct LevelReport {
  std::size_t level = 0;
  /// Ω_NA at this level: nodes where local NA holds.
  std::vector<Prefix> holding;
  std::vector<Prefix> failing_relevant;
  std::vector<Prefix> failing_irrelevant;
  /// Every relevant node of the level is in `holding`.
  bool complement_polar = true;
};

inline LevelReport omega_na(const ScenarioTree& tree, std::size_t level) {
  if (level >= tree.horizon) throw PreconditionError("omega_na: level must be below the horizon");
  LevelReport r;
  r.level = level;
  for (const auto& node : tree.nodes_at(level)) {
    if (local_na(tree, node).holds) {
      r.holding.push_back(node);
    } else if (is_relevant_path(tree, node)) {
      r.failing_relevant.push_back(node);
      r.complement_polar = false;
    } else {
      r.failing_irrelevant.push_back(node);
    }
  }
  return r;
}

/// NA(Q^T) via the local criterion at every relevant non-terminal node.
inline bool global_na(const ScenarioTree& tree) {
  for (std::size_t t = 0; t < tree.horizon; ++t)
    for (const auto& node : relevant_nodes_at(tree, t))
      if (!local_na(tree, node).holds) return false;
  return true;
}

/// First relevant node (by depth, then label order) where local NA fails.
inline std::optional<LocalVerdict> first_relevant_failure(const ScenarioTree& tree) {
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    for (const auto& node : relevant_nodes_at(tree, t)) {
      LocalVerdict v = local_na(tree, node);
      if (!v.holds) return v;
    }
  }
  return std::nullopt;
}

struct ArbitrageCandidate {
  Strategy strategy;
  Path profit_path;
};

namespace detail {

/// V_T along each path as a linear form in the stacked positions of the
/// non-terminal prefixes of `paths`.
struct TerminalValueForms {
  std::vector<Prefix> nodes;
  std::map<Prefix, std::size_t> offset;
  std::vector<Vec> rows;
  std::size_t variables = 0;
};

inline TerminalValueForms terminal_value_forms(const ScenarioTree& tree, const std::vector<Path>& paths) {
  TerminalValueForms f;
  const std::size_t d = tree.asset_dim;
  for (const auto& path : paths) {
    Prefix node;
    for (Label a : path) {
      if (f.offset.emplace(node, f.nodes.size() * d).second) f.nodes.push_back(node);
      node.push_back(a);
    }
  }
  f.variables = f.nodes.size() * d;
  for (const auto& path : paths) {
    Vec row = zeros(f.variables);
    Prefix node;
    for (Label a : path) {
      const Vec dS = delta_S(tree, node, a);
      const std::size_t off = f.offset.at(node);
      for (std::size_t j = 0; j < d; ++j) row[off + j] += dS[j];
      node.push_back(a);
    }
    f.rows.push_back(std::move(row));
  }
  return f;
}

/// max sum_{i in objective_paths} V(w_i)  s.t. 0 <= V(w) <= 1 on all paths.
inline LpResult capped_profit_lp(const TerminalValueForms& f, const std::vector<std::size_t>& objective_paths) {
  LinearProgram lp(f.variables);
  lp.bounds.assign(f.variables, VariableBound::free_variable());
  for (std::size_t i : objective_paths) lp.objective = add(lp.objective, f.rows[i]);
  for (const auto& row : f.rows) {
    lp.add_constraint(row, Relation::greater_equal, 0);
    lp.add_constraint(row, Relation::less_equal, 1);
  }
  return lp_solve(lp);
}

inline std::optional<std::size_t> first_positive(const TerminalValueForms& f, const Vec& x, std::size_t limit) {
  for (std::size_t i = 0; i < limit; ++i)
    if (sgn(dot(f.rows[i], x)) > 0) return i;
  return std::nullopt;
}

}  // namespace detail

/// LP arbitrage search over an explicit path set: returns the first path w*
/// (in the given order) for which
///   V_T(w) >= 0 for all listed w,  V_T(w*) >= 1
/// is feasible, with the solution of that feasibility program. Capped-profit
/// screening programs locate w* without solving one program per path.
inline std::optional<ArbitrageCandidate> find_arbitrage_on_paths(const ScenarioTree& tree,
                                                                 const std::vector<Path>& paths) {
  if (paths.empty()) return std::nullopt;
  const auto forms = detail::terminal_value_forms(tree, paths);
  std::vector<std::size_t> all(paths.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  LpResult screen = detail::capped_profit_lp(forms, all);
  if (screen.status != LpStatus::optimal) throw Error("arbitrage screening program not optimal");
  if (sgn(screen.value) <= 0) return std::nullopt;
  std::size_t star = *detail::first_positive(forms, screen.solution, paths.size());
  while (star > 0) {
    std::vector<std::size_t> earlier(star);
    for (std::size_t i = 0; i < star; ++i) earlier[i] = i;
    LpResult r = detail::capped_profit_lp(forms, earlier);
    if (r.status != LpStatus::optimal) throw Error("arbitrage screening program not optimal");
    if (sgn(r.value) <= 0) break;
    star = *detail::first_positive(forms, r.solution, star);
  }

  LinearProgram lp(forms.variables);
  lp.bounds.assign(forms.variables, VariableBound::free_variable());
  for (std::size_t i = 0; i < paths.size(); ++i)
    lp.add_constraint(forms.rows[i], Relation::greater_equal, i == star ? Rational(1) : Rational(0));
  const LpResult feas = lp_solve(lp);
  if (feas.status != LpStatus::optimal) throw Error("arbitrage feasibility program failed for the screened path");

  ArbitrageCandidate c{Strategy::zero(tree), paths[star]};
  for (const auto& node : forms.nodes) {
    const std::size_t off = forms.offset.at(node);
    Vec& pos = c.strategy.positions[node];
    for (std::size_t j = 0; j < tree.asset_dim; ++j) pos[j] = feas.solution[off + j];
  }
  return c;
}

/// Oracle for NA(Q^T): LP search over the relevant paths.
inline std::optional<ArbitrageCandidate> global_arbitrage_search(const ScenarioTree& tree) {
  return find_arbitrage_on_paths(tree, relevant_paths(tree));
}

/// Paths with positive mass under the product measure of `kernels`.
inline std::vector<Path> charged_paths(const ScenarioTree& tree, const KernelSelection& kernels) {
  std::vector<Prefix> level{Prefix{}};
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    std::vector<Prefix> next;
    for (const auto& node : level) {
      const ProbVector q = induced_measure(tree, kernels, node);
      for (Label a = 0; a < q.size(); ++a)
        if (sgn(q[a]) > 0) next.push_back(child_of(node, a));
    }
    level = std::move(next);
  }
  return level;
}

/// Oracle for NA(P): the LP search restricted to paths charged by P.
inline std::optional<ArbitrageCandidate> single_prior_arbitrage_search(const ScenarioTree& tree,
                                                                       const KernelSelection& kernels) {
  return find_arbitrage_on_paths(tree, charged_paths(tree, kernels));
}

/// NA(P) via 0 ∈ Ri(Conv(D_P)) at every node charged by P.
inline bool single_prior_na(const ScenarioTree& tree, const KernelSelection& kernels) {
  std::vector<Prefix> level{Prefix{}};
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    std::vector<Prefix> next;
    for (const auto& node : level) {
      const ProbVector q = induced_measure(tree, kernels, node);
      if (!ri_conv_contains_zero(support_E(tree, node, q))) return false;
      for (Label a = 0; a < q.size(); ++a)
        if (sgn(q[a]) > 0) next.push_back(child_of(node, a));
    }
    level = std::move(next);
  }
  return true;
}

struct ArbitrageWitness {
  Strategy strategy;
  KernelSelection measure;
  Path profit_path;

  friend bool operator==(const ArbitrageWitness&, const ArbitrageWitness&) = default;
};

namespace detail {

inline Vec vertex_weights(std::size_t n, std::size_t g) {
  Vec w = zeros(n);
  w[g] = 1;
  return w;
}

/// Index of the first generator charging `a`.
inline std::optional<std::size_t> first_charging(const ScenarioTree& tree, const Prefix& node, Label a) {
  const auto& gens = tree.generators(node);
  for (std::size_t g = 0; g < gens.size(); ++g)
    if (sgn(gens[g][a]) > 0) return g;
  return std::nullopt;
}

}  // namespace detail

/// Lifts a local witness h at a relevant node to a global arbitrage: trade h
/// at `node` only, and pick a product measure that reaches `node` and then a
/// child with h·ΔS > 0.
inline ArbitrageWitness extract_arbitrage(const ScenarioTree& tree, const Prefix& node, const Vec& h) {
  if (tree.is_terminal(node) || !tree.has_node(node)) throw PreconditionError("extract_arbitrage: not a non-terminal node");
  if (!is_relevant_path(tree, node))
    throw PreconditionError("extract_arbitrage: node \"" + tree.key(node) + "\" is polar; its failure cannot be monetized");
  if (h.size() != tree.asset_dim) throw PreconditionError("extract_arbitrage: witness dimension mismatch");

  std::optional<Label> profit_child;
  for (Label a : relevant_children(tree, node)) {
    const Rational gain = dot(h, delta_S(tree, node, a));
    if (sgn(gain) < 0) throw PreconditionError("extract_arbitrage: h·ΔS < 0 on a relevant child");
    if (sgn(gain) > 0 && !profit_child) profit_child = a;
  }
  if (!profit_child) throw PreconditionError("extract_arbitrage: h·ΔS vanishes on every relevant child");

  ArbitrageWitness w{Strategy::zero(tree), {}, {}};
  w.strategy.positions[node] = h;
  for (const auto& n : tree.non_terminal_nodes())
    w.measure.weights[n] = detail::vertex_weights(tree.generators(n).size(), 0);

  Prefix prefix;
  for (Label a : node) {
    w.measure.weights[prefix] = detail::vertex_weights(tree.generators(prefix).size(),
                                                       *detail::first_charging(tree, prefix, a));
    prefix.push_back(a);
  }
  w.measure.weights[node] =
      detail::vertex_weights(tree.generators(node).size(), *detail::first_charging(tree, node, *profit_child));

  w.profit_path = child_of(node, *profit_child);
  while (w.profit_path.size() < tree.horizon) {
    const ProbVector q = induced_measure(tree, w.measure, w.profit_path);
    Label a = 0;
    while (sgn(q[a]) == 0) ++a;
    w.profit_path.push_back(a);
  }
  return w;
}

struct WitnessCheck {
  bool ok = false;
  std::string reason;
};

/// Re-evaluates an ArbitrageWitness exactly against `tree`.
inline WitnessCheck verify_witness(const ScenarioTree& tree, const ArbitrageWitness& w) {
  try {
    for (const auto& node : tree.non_terminal_nodes()) {
      const Vec& lambda = w.measure.at(node);
      if (lambda.size() != tree.generators(node).size()) return {false, "measure weights mismatch at \"" + tree.key(node) + "\""};
      if (!ProbVector{lambda}.is_valid()) return {false, "measure weights are not convex at \"" + tree.key(node) + "\""};
      if (w.strategy.at(node).size() != tree.asset_dim) return {false, "strategy dimension mismatch at \"" + tree.key(node) + "\""};
    }
    if (w.profit_path.size() != tree.horizon || !tree.has_node(w.profit_path)) return {false, "profit path is not a path of the tree"};
    Strategy zero_capital = w.strategy;
    zero_capital.initial_capital = 0;
    for (const auto& path : relevant_paths(tree))
      if (sgn(terminal_value(tree, zero_capital, path)) < 0)
        return {false, "terminal value negative on relevant path \"" + tree.key(path) + "\""};
    if (sgn(path_probability(tree, w.measure, w.profit_path)) <= 0) return {false, "profit path has zero probability"};
    if (sgn(terminal_value(tree, zero_capital, w.profit_path)) <= 0) return {false, "no strict profit on the profit path"};
  } catch (const Error& e) {
    return {false, e.what()};
  }
  return {true, ""};
}

/// Paths through `node` whose edges below `node` are relevant.
inline std::vector<Path> relevant_continuations(const ScenarioTree& tree, const Prefix& node) {
  std::vector<Prefix> level{node};
  for (std::size_t t = node.size(); t < tree.horizon; ++t) {
    std::vector<Prefix> next;
    for (const auto& p : level)
      for (Label a : relevant_children(tree, p)) next.push_back(child_of(p, a));
    level = std::move(next);
  }
  return level;
}

struct SectionResult {
  /// Depth-t nodes whose relevant continuations all satisfy f >= 0.
  std::vector<Prefix> nodes;
  bool complement_polar = true;
};

inline SectionResult section_positive(const ScenarioTree& tree, const PathFunction& f, std::size_t level) {
  if (level >= tree.horizon) throw PreconditionError("section_positive: level must be below the horizon");
  SectionResult r;
  for (const auto& node : tree.nodes_at(level)) {
    bool ok = true;
    for (const auto& path : relevant_continuations(tree, node)) {
      if (sgn(f(path)) < 0) {
        ok = false;
        break;
      }
    }
    if (ok)
      r.nodes.push_back(node);
    else if (is_relevant_path(tree, node))
      r.complement_polar = false;
  }
  return r;
}

}  // namespace qsna
