#pragma once

// Certifying priors: the one-period p̂, the multi-period P*, the arbitrage-free
// class built from P*, and domination witnesses.

#include "qsna/no_arbitrage.hpp"
#include "qsna/random.hpp"

namespace qsna {

/// Convex weights expressing p in the node's generators, if p is in their hull.
inline std::optional<Vec> hull_weights(const ScenarioTree& tree, const Prefix& node, const ProbVector& p) {
  const auto& gens = tree.generators(node);
  const std::size_t m = tree.alphabet_size(node.size());
  if (p.size() != m) return std::nullopt;
  LinearProgram lp(gens.size());
  for (Label a = 0; a < m; ++a) {
    Vec row(gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g) row[g] = gens[g][a];
    lp.add_constraint(std::move(row), Relation::equal, p[a]);
  }
  lp.add_constraint(Vec(gens.size(), Rational(1)), Relation::equal, 1);
  LpResult r = lp_solve(lp);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.solution;
}

/// Throws PreconditionError unless `k` assigns convex weights to every non-terminal node.
inline void check_kernels(const ScenarioTree& tree, const KernelSelection& k) {
  for (const auto& node : tree.non_terminal_nodes()) {
    auto it = k.weights.find(node);
    if (it == k.weights.end()) throw PreconditionError("kernel selection missing at \"" + tree.key(node) + "\"");
    if (it->second.size() != tree.generators(node).size() || !ProbVector{it->second}.is_valid())
      throw PreconditionError("kernel weights not convex at \"" + tree.key(node) + "\"");
  }
}

struct QBarMembership {
  ProbVector prior;
  bool in_qbar = false;
  /// Nonzero h in Aff(D) with p[h·ΔS < 0] = 0 (when not in Q̄).
  std::optional<Vec> counterexample;
};

/// Decides whether p charges {h·ΔS < 0} for every nonzero h in Aff(D).
/// For linear Aff(D) with basis B this is the LP scan
///   max ±c_j  s.t.  (Bc)·y >= 0 for y in E(p),  |c| <= 1,
/// which has all optima zero iff p is in Q̄. If 0 ∉ Aff(D) the minimum-norm
/// point of Aff(D) is positive on all of D and is returned as counterexample.
inline QBarMembership qbar_member(const ScenarioTree& tree, const Prefix& node, const ProbVector& p) {
  if (!hull_weights(tree, node, p)) throw PreconditionError("qbar_member: p is outside the prior hull");
  QBarMembership out{p, false, std::nullopt};
  const AffineSubspace aff = affine_hull(support_D(tree, node));
  const std::size_t d = tree.asset_dim;
  if (!aff_contains(aff, zeros(d))) {
    out.counterexample = min_norm_point(aff);
    return out;
  }
  const std::size_t k = aff.dim();
  const PointSet e = support_E(tree, node, p);
  for (std::size_t j = 0; j < k; ++j) {
    for (int sign : {1, -1}) {
      LinearProgram lp(k);
      lp.bounds.assign(k, VariableBound::box(-1, 1));
      lp.objective[j] = sign;
      for (const auto& y : e) {
        Vec row(k);
        for (std::size_t i = 0; i < k; ++i) row[i] = dot(aff.basis[i], y);
        lp.add_constraint(std::move(row), Relation::greater_equal, 0);
      }
      const LpResult r = lp_solve(lp);
      if (r.status == LpStatus::optimal && sgn(r.value) > 0) {
        Vec h = zeros(d);
        for (std::size_t i = 0; i < k; ++i) h = add(h, scaled(aff.basis[i], r.solution[i]));
        out.counterexample = normalize_direction(std::move(h));
        return out;
      }
    }
  }
  out.in_qbar = true;
  return out;
}

/// Geometric form of Q̄ membership: 0 ∈ Ri(Conv(E(p))) and Aff(E(p)) = Aff(D).
inline bool qbar_geometric(const ScenarioTree& tree, const Prefix& node, const ProbVector& p) {
  const PointSet e = support_E(tree, node, p);
  return ri_conv_contains_zero(e) && aff_equal(affine_hull(e), affine_hull(support_D(tree, node)));
}

inline Vec uniform_weights(std::size_t n) {
  Vec w(n);
  for (auto& x : w) x = Rational(1, static_cast<unsigned long>(n));
  return w;
}

/// Uniform mixture of all generators. Its support is D, so Aff(E(p̂)) = Aff(D)
/// and 0 ∈ Ri(Conv(E(p̂))) whenever local NA holds; both are re-checked.
inline ProbVector construct_phat(const ScenarioTree& tree, const Prefix& node) {
  if (!local_na(tree, node).holds) throw PreconditionError("NA fails at node \"" + tree.key(node) + "\"");
  const ProbVector phat = induced_measure(tree, node, uniform_weights(tree.generators(node).size()));
  const PointSet e = support_E(tree, node, phat);
  if (!aff_equal(affine_hull(e), affine_hull(support_D(tree, node))) || !ri_conv_contains_zero(e))
    throw Error("construct_phat: postcondition failed at \"" + tree.key(node) + "\"");
  return phat;
}

/// (p + q) / 2; its support is the union of both supports.
inline ProbVector improve_prior(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw PreconditionError("improve_prior: size mismatch");
  ProbVector r{zeros(p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) r.weights[i] = (p[i] + q[i]) / 2;
  return r;
}

struct PStarCertificate {
  struct NodeCheck {
    Prefix node;
    bool aff_match = false;
    bool ri_zero = false;

    bool passed() const { return aff_match && ri_zero; }
    friend bool operator==(const NodeCheck&, const NodeCheck&) = default;
  };

  KernelSelection kernels;
  std::vector<NodeCheck> checks;
  bool valid = false;

  std::vector<Prefix> failing_nodes() const {
    std::vector<Prefix> out;
    for (const auto& c : checks)
      if (!c.passed()) out.push_back(c.node);
    return out;
  }

  friend bool operator==(const PStarCertificate&, const PStarCertificate&) = default;
};

/// P* with kernel p̂ where local NA holds and the first generator elsewhere,
/// checked at every relevant node: Aff(D_P*) = Aff(D) and 0 ∈ Ri(Conv(D_P*)).
inline PStarCertificate construct_pstar(const ScenarioTree& tree) {
  PStarCertificate cert;
  for (const auto& node : tree.non_terminal_nodes()) {
    const std::size_t n = tree.generators(node).size();
    cert.kernels.weights[node] = local_na(tree, node).holds ? uniform_weights(n) : detail::vertex_weights(n, 0);
  }
  cert.valid = true;
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    for (const auto& node : relevant_nodes_at(tree, t)) {
      const PointSet dp = support_DP(tree, cert.kernels, node);
      PStarCertificate::NodeCheck c{node, aff_equal(affine_hull(dp), affine_hull(support_D(tree, node))),
                                    ri_conv_contains_zero(dp)};
      cert.valid = cert.valid && c.passed();
      cert.checks.push_back(std::move(c));
    }
  }
  return cert;
}

/// Per-node mixture levels[t]·p* + (1 - levels[t])·q in generator weights.
inline KernelSelection class_member(const ScenarioTree& tree, const KernelSelection& pstar, const Vec& levels,
                                    const KernelSelection& q) {
  if (levels.size() != tree.horizon) throw PreconditionError("class_member: need one mixing level per period");
  for (const auto& l : levels)
    if (sgn(l) <= 0 || l > 1) throw PreconditionError("class_member: mixing level must lie in (0, 1]");
  check_kernels(tree, pstar);
  check_kernels(tree, q);
  KernelSelection out;
  for (const auto& node : tree.non_terminal_nodes()) {
    const Rational& l = levels[node.size()];
    out.weights[node] = add(scaled(pstar.at(node), l), scaled(q.at(node), 1 - l));
  }
  return out;
}

/// Class member with levels ≡ 1/2; charges every path at least 2^-T times its q-mass.
inline KernelSelection dominating_member(const ScenarioTree& tree, const KernelSelection& pstar,
                                         const KernelSelection& q) {
  return class_member(tree, pstar, Vec(tree.horizon, Rational(1, 2)), q);
}

/// Compares the relevant paths of Q^T with those of the class generated by
/// `pstar`. An edge is relevant for the class iff some admissible mixture
/// charges it; p* itself (level 1) and the midpoints with each generator
/// (level 1/2) exhaust the possible supports.
inline bool polar_sets_equal(const ScenarioTree& tree, const KernelSelection& pstar) {
  check_kernels(tree, pstar);
  std::vector<Prefix> level{Prefix{}};
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    std::vector<Prefix> next;
    for (const auto& node : level) {
      const ProbVector star = induced_measure(tree, pstar, node);
      std::vector<bool> charged(star.size(), false);
      for (Label a = 0; a < star.size(); ++a) charged[a] = sgn(star[a]) > 0;
      for (const auto& g : tree.generators(node)) {
        const ProbVector mid = improve_prior(star, g);
        for (Label a = 0; a < mid.size(); ++a) charged[a] = charged[a] || sgn(mid[a]) > 0;
      }
      for (Label a = 0; a < star.size(); ++a)
        if (charged[a]) next.push_back(child_of(node, a));
    }
    level = std::move(next);
  }
  return level == relevant_paths(tree);
}

/// Random kernel selection: each node gets a vertex (single generator) or a
/// grid point of the weight simplex.
inline KernelSelection random_kernels(const ScenarioTree& tree, Rng& rng, std::int64_t denominator_bound = 12) {
  KernelSelection k;
  for (const auto& node : tree.non_terminal_nodes()) {
    const std::size_t n = tree.generators(node).size();
    if (rng.percent(40))
      k.weights[node] = detail::vertex_weights(n, rng.index(n));
    else
      k.weights[node] = rng.simplex(std::vector<bool>(n, true), denominator_bound);
  }
  return k;
}

struct ClassSample {
  Vec levels;
  KernelSelection q;
  KernelSelection member;
};

/// Deterministic sample (levels, q) and the resulting class member.
inline ClassSample sample_class_member(const ScenarioTree& tree, const KernelSelection& pstar, std::uint64_t seed) {
  Rng rng(seed);
  ClassSample s;
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    const std::int64_t den = rng.uniform(1, 12);
    Rational l(rng.uniform(1, den), den);
    l.canonicalize();
    s.levels.push_back(l);
  }
  s.q = random_kernels(tree, rng);
  s.member = class_member(tree, pstar, s.levels, s.q);
  return s;
}

}  // namespace qsna
