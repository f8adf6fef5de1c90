#pragma once

// Finite multi-prior market on a product-structured scenario tree.
//
// A node at depth t is the prefix (a_1, ..., a_t) of label indices, with a_s
// taken from alphabet s-1. The local prior set at a non-terminal node is the
// convex hull of its generator probability vectors.

#include "qsna/geometry.hpp"

#include <functional>
#include <map>
#include <string>

namespace qsna {

using Label = std::size_t;
using Prefix = std::vector<Label>;
using Path = Prefix;

struct ProbVector {
  Vec weights;

  std::size_t size() const { return weights.size(); }
  const Rational& operator[](std::size_t i) const { return weights[i]; }

  bool is_valid() const {
    if (weights.empty()) return false;
    Rational total = 0;
    for (const auto& w : weights) {
      if (sgn(w) < 0) return false;
      total += w;
    }
    return total == 1;
  }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;
};

struct ScenarioTree {
  std::size_t horizon = 0;
  std::size_t asset_dim = 0;
  /// alphabets[t] labels the children of depth-t nodes.
  std::vector<std::vector<std::string>> alphabets;
  std::map<Prefix, Vec> prices;
  std::map<Prefix, std::vector<ProbVector>> priors;

  friend bool operator==(const ScenarioTree&, const ScenarioTree&) = default;

  std::size_t alphabet_size(std::size_t t) const {
    if (t >= alphabets.size()) throw LookupError("no alphabet at level " + std::to_string(t));
    return alphabets[t].size();
  }

  bool is_terminal(const Prefix& node) const { return node.size() >= horizon; }

  bool has_node(const Prefix& node) const {
    if (node.size() > horizon || node.size() > alphabets.size()) return false;
    for (std::size_t s = 0; s < node.size(); ++s)
      if (node[s] >= alphabets[s].size()) return false;
    return true;
  }

  const Vec& price(const Prefix& node) const {
    auto it = prices.find(node);
    if (it == prices.end()) throw LookupError("no price at node \"" + key(node) + "\"");
    return it->second;
  }

  const std::vector<ProbVector>& generators(const Prefix& node) const {
    auto it = priors.find(node);
    if (it == priors.end() || it->second.empty())
      throw LookupError("no priors at node \"" + key(node) + "\"");
    return it->second;
  }

  /// "/"-joined labels; the root is "".
  std::string key(const Prefix& node) const {
    std::string k;
    for (std::size_t s = 0; s < node.size(); ++s) {
      if (s) k += '/';
      if (s < alphabets.size() && node[s] < alphabets[s].size())
        k += alphabets[s][node[s]];
      else
        k += "#" + std::to_string(node[s]);
    }
    return k;
  }

  Prefix parse_key(const std::string& k) const {
    Prefix node;
    if (k.empty()) return node;
    std::size_t start = 0;
    for (;;) {
      const std::size_t slash = k.find('/', start);
      const std::string label = k.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
      const std::size_t level = node.size();
      if (level >= alphabets.size()) throw LookupError("node key \"" + k + "\" is deeper than the horizon");
      const auto& alpha = alphabets[level];
      auto it = std::find(alpha.begin(), alpha.end(), label);
      if (it == alpha.end()) throw LookupError("unknown label \"" + label + "\" in node key \"" + k + "\"");
      node.push_back(static_cast<Label>(it - alpha.begin()));
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    return node;
  }

  /// Every depth-t node in lexicographic label order.
  std::vector<Prefix> nodes_at(std::size_t depth) const {
    std::vector<Prefix> out{Prefix{}};
    for (std::size_t s = 0; s < depth; ++s) {
      std::vector<Prefix> next;
      next.reserve(out.size() * alphabet_size(s));
      for (const auto& p : out) {
        for (Label a = 0; a < alphabet_size(s); ++a) {
          Prefix c = p;
          c.push_back(a);
          next.push_back(std::move(c));
        }
      }
      out = std::move(next);
    }
    return out;
  }

  std::vector<Prefix> non_terminal_nodes() const {
    std::vector<Prefix> out;
    for (std::size_t t = 0; t < horizon; ++t) {
      auto level = nodes_at(t);
      out.insert(out.end(), level.begin(), level.end());
    }
    return out;
  }

  std::vector<Path> paths() const { return nodes_at(horizon); }
};

inline Prefix child_of(const Prefix& node, Label a) {
  Prefix c = node;
  c.push_back(a);
  return c;
}

/// Per-node convex weights over the node's generators.
struct KernelSelection {
  std::map<Prefix, Vec> weights;

  friend bool operator==(const KernelSelection&, const KernelSelection&) = default;

  const Vec& at(const Prefix& node) const {
    auto it = weights.find(node);
    if (it == weights.end()) throw LookupError("kernel selection undefined at a node");
    return it->second;
  }
};

struct Strategy {
  Rational initial_capital = 0;
  std::map<Prefix, Vec> positions;

  friend bool operator==(const Strategy&, const Strategy&) = default;

  static Strategy zero(const ScenarioTree& tree, Rational x = 0) {
    Strategy s{std::move(x), {}};
    for (const auto& node : tree.non_terminal_nodes()) s.positions[node] = zeros(tree.asset_dim);
    return s;
  }

  const Vec& at(const Prefix& node) const {
    auto it = positions.find(node);
    if (it == positions.end()) throw LookupError("strategy undefined at a node");
    return it->second;
  }
};

struct Violation {
  std::string node;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every well-formedness problem found in `tree`, with node locations.
inline std::vector<Violation> validate(const ScenarioTree& tree) {
  std::vector<Violation> out;
  auto report = [&](std::string node, std::string msg) { out.push_back({std::move(node), std::move(msg)}); };
  if (tree.horizon == 0) report("", "horizon must be positive");
  if (tree.asset_dim == 0) report("", "asset_dim must be positive");
  if (tree.alphabets.size() != tree.horizon) {
    report("", "expected " + std::to_string(tree.horizon) + " alphabets, found " +
                   std::to_string(tree.alphabets.size()));
    return out;
  }
  for (std::size_t t = 0; t < tree.alphabets.size(); ++t) {
    const auto& alpha = tree.alphabets[t];
    if (alpha.empty()) report("", "alphabet " + std::to_string(t) + " is empty");
    std::set<std::string> seen;
    for (const auto& label : alpha) {
      if (label.empty() || label.find('/') != std::string::npos)
        report("", "alphabet " + std::to_string(t) + ": invalid label \"" + label + "\"");
      if (!seen.insert(label).second)
        report("", "alphabet " + std::to_string(t) + ": duplicate label \"" + label + "\"");
    }
  }
  if (!out.empty()) return out;

  for (const auto& [node, price] : tree.prices)
    if (!tree.has_node(node)) report(tree.key(node), "price at unknown node");
  for (const auto& [node, gens] : tree.priors)
    if (!tree.has_node(node) || tree.is_terminal(node)) report(tree.key(node), "priors at a node without children");

  for (std::size_t t = 0; t <= tree.horizon; ++t) {
    for (const auto& node : tree.nodes_at(t)) {
      const std::string k = tree.key(node);
      auto pit = tree.prices.find(node);
      if (pit == tree.prices.end())
        report(k, "price absent");
      else if (pit->second.size() != tree.asset_dim)
        report(k, "price has dimension " + std::to_string(pit->second.size()) + ", expected " +
                      std::to_string(tree.asset_dim));
      if (t == tree.horizon) continue;
      auto git = tree.priors.find(node);
      if (git == tree.priors.end() || git->second.empty()) {
        report(k, "no generator priors");
        continue;
      }
      for (std::size_t g = 0; g < git->second.size(); ++g) {
        const ProbVector& p = git->second[g];
        const std::string where = "generator " + std::to_string(g);
        if (p.size() != tree.alphabet_size(t)) {
          report(k, where + ": has " + std::to_string(p.size()) + " weights, expected " +
                        std::to_string(tree.alphabet_size(t)));
          continue;
        }
        Rational total = 0;
        bool negative = false;
        for (const auto& w : p.weights) {
          negative = negative || sgn(w) < 0;
          total += w;
        }
        if (negative) report(k, where + ": negative weight");
        if (total != 1) report(k, where + ": weights sum ≠ 1");
      }
    }
  }
  return out;
}

/// S_{t+1}(node, a) - S_t(node).
inline Vec delta_S(const ScenarioTree& tree, const Prefix& node, Label a) {
  if (tree.is_terminal(node)) throw LookupError("delta_S at a terminal node");
  if (a >= tree.alphabet_size(node.size())) throw LookupError("delta_S: unknown label");
  return sub(tree.price(child_of(node, a)), tree.price(node));
}

/// V_0..V_T along `path`.
inline std::vector<Rational> value_process(const ScenarioTree& tree, const Strategy& strategy, const Path& path) {
  if (path.size() != tree.horizon) throw PreconditionError("value_process: path length differs from horizon");
  std::vector<Rational> v{strategy.initial_capital};
  Prefix node;
  for (Label a : path) {
    v.push_back(v.back() + dot(strategy.at(node), delta_S(tree, node, a)));
    node.push_back(a);
  }
  return v;
}

inline Rational terminal_value(const ScenarioTree& tree, const Strategy& strategy, const Path& path) {
  return value_process(tree, strategy, path).back();
}

/// Increments charged by p, deduplicated, in label order.
inline PointSet support_E(const ScenarioTree& tree, const Prefix& node, const ProbVector& p) {
  if (p.size() != tree.alphabet_size(node.size())) throw PreconditionError("support_E: measure size mismatch");
  PointSet pts;
  for (Label a = 0; a < p.size(); ++a)
    if (sgn(p[a]) > 0) pts.push_back(delta_S(tree, node, a));
  return unique_points(pts);
}

/// Labels charged by at least one generator.
inline std::vector<Label> relevant_children(const ScenarioTree& tree, const Prefix& node) {
  const auto& gens = tree.generators(node);
  std::vector<Label> out;
  for (Label a = 0; a < tree.alphabet_size(node.size()); ++a) {
    for (const auto& g : gens) {
      if (a < g.size() && sgn(g[a]) > 0) {
        out.push_back(a);
        break;
      }
    }
  }
  return out;
}

inline PointSet support_D(const ScenarioTree& tree, const Prefix& node) {
  PointSet pts;
  for (Label a : relevant_children(tree, node)) pts.push_back(delta_S(tree, node, a));
  return unique_points(pts);
}

/// Weighted sum of the node's generators.
inline ProbVector induced_measure(const ScenarioTree& tree, const Prefix& node, const Vec& weights) {
  const auto& gens = tree.generators(node);
  if (weights.size() != gens.size()) throw PreconditionError("kernel weights do not match generator count");
  ProbVector p{zeros(tree.alphabet_size(node.size()))};
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (sgn(weights[g]) == 0) continue;
    for (Label a = 0; a < p.size(); ++a) p.weights[a] += weights[g] * gens[g][a];
  }
  return p;
}

inline ProbVector induced_measure(const ScenarioTree& tree, const KernelSelection& kernels, const Prefix& node) {
  return induced_measure(tree, node, kernels.at(node));
}

inline PointSet support_DP(const ScenarioTree& tree, const KernelSelection& kernels, const Prefix& node) {
  return support_E(tree, node, induced_measure(tree, kernels, node));
}

inline bool is_relevant_path(const ScenarioTree& tree, const Prefix& prefix) {
  Prefix node;
  for (Label a : prefix) {
    const auto rel = relevant_children(tree, node);
    if (!std::binary_search(rel.begin(), rel.end(), a)) return false;
    node.push_back(a);
  }
  return true;
}

/// Relevant depth-t prefixes in lexicographic order.
inline std::vector<Prefix> relevant_nodes_at(const ScenarioTree& tree, std::size_t depth) {
  std::vector<Prefix> out{Prefix{}};
  for (std::size_t s = 0; s < depth; ++s) {
    std::vector<Prefix> next;
    for (const auto& p : out)
      for (Label a : relevant_children(tree, p)) next.push_back(child_of(p, a));
    out = std::move(next);
  }
  return out;
}

inline std::vector<Path> relevant_paths(const ScenarioTree& tree) { return relevant_nodes_at(tree, tree.horizon); }

/// Product of kernel masses along a prefix (or full path).
inline Rational path_probability(const ScenarioTree& tree, const KernelSelection& kernels, const Prefix& path) {
  Rational prob = 1;
  Prefix node;
  for (Label a : path) {
    prob *= induced_measure(tree, kernels, node)[a];
    if (sgn(prob) == 0) return prob;
    node.push_back(a);
  }
  return prob;
}

using PathFunction = std::function<Rational(const Path&)>;

/// f >= bound outside a polar set, i.e. on every relevant path.
inline bool quasi_sure_geq(const ScenarioTree& tree, const PathFunction& f, const Rational& bound) {
  for (const auto& path : relevant_paths(tree))
    if (f(path) < bound) return false;
  return true;
}

}  // namespace qsna
