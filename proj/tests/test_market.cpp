#include "test_support.hpp"

using namespace qsna;
using namespace qsna::testing;

namespace {

ScenarioTree up_down() { return one_period({v({-1}), v({1})}, {v({q(1, 2), q(1, 2)})}); }

std::vector<ScenarioTree> corpus(std::uint64_t seed, int n, GeneratorConfig base = {}) {
  std::vector<ScenarioTree> out;
  for (int i = 0; i < n; ++i) {
    base.seed = mix_seed(seed + static_cast<std::uint64_t>(i));
    out.push_back(gen_instance(base));
  }
  return out;
}

}  // namespace

TEST(Validate, WellFormedOnePeriod) { EXPECT_TRUE(validate(up_down()).empty()); }

TEST(Validate, WeightsNotSummingToOne) {
  const auto t = one_period({v({-1}), v({1})}, {v({q(1, 2), q(1, 3)})});
  const auto vs = validate(t);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].node, "");
  EXPECT_NE(vs[0].message.find("weights sum ≠ 1"), std::string::npos);
}

TEST(Validate, MissingPrice) {
  auto t = up_down();
  t.prices.erase({1});
  const auto vs = validate(t);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].node, "b");
  EXPECT_EQ(vs[0].message, "price absent");
}

TEST(Validate, OtherViolations) {
  auto t = up_down();
  t.priors[{}].push_back({v({q(3, 2), q(-1, 2)})});  // negative weight
  t.priors[{}].push_back({v({1})});                 // wrong length
  t.prices[{}] = v({0, 0});                         // wrong dimension
  t.priors[{0}] = {ProbVector{v({1})}};             // terminal node with priors
  EXPECT_EQ(validate(t).size(), 4u);

  ScenarioTree empty;
  EXPECT_FALSE(validate(empty).empty());

  auto dup = up_down();
  dup.alphabets[0] = {"a", "a"};
  EXPECT_FALSE(validate(dup).empty());
}

TEST(Validate, GeneratedInstancesAreWellFormed) {
  for (const auto& t : corpus(1, 50)) EXPECT_TRUE(validate(t).empty());
  GeneratorConfig forced;
  forced.force_arbitrage = true;
  for (const auto& t : corpus(2, 50, forced)) EXPECT_TRUE(validate(t).empty());
}

TEST(DeltaS, Basics) {
  const auto t = one_period({v({3}), v({0})}, {v({1, 0})});
  EXPECT_EQ(delta_S(t, {}, 0), v({3}));
  EXPECT_EQ(delta_S(t, {}, 1), v({0}));
  EXPECT_THROW(delta_S(t, {}, 2), LookupError);
  EXPECT_THROW(delta_S(t, {0}, 0), LookupError);
}

TEST(DeltaS, TelescopesAlongPaths) {
  for (const auto& t : corpus(3, 30)) {
    for (const auto& path : t.paths()) {
      Vec total = zeros(t.asset_dim);
      Prefix node;
      for (Label a : path) {
        total = add(total, delta_S(t, node, a));
        node.push_back(a);
      }
      EXPECT_EQ(total, sub(t.price(path), t.price({})));
    }
  }
}

TEST(ValueProcess, Examples) {
  const auto t = symmetric_binary(2);
  const Strategy zero = Strategy::zero(t, 5);
  EXPECT_EQ(value_process(t, zero, {0, 1}), (std::vector<Rational>{5, 5, 5}));

  const auto one = one_period({v({1}), v({-1})}, {v({q(1, 2), q(1, 2)})});
  Strategy s = Strategy::zero(one);
  s.positions[{}] = v({2});
  EXPECT_EQ(value_process(one, s, {1}), (std::vector<Rational>{0, -2}));
}

TEST(ValueProcess, MatchesRecomputationAndIsAdditive) {
  Rng rng(5);
  for (const auto& t : corpus(4, 30)) {
    auto random_strategy = [&] {
      Strategy s = Strategy::zero(t, rng.grid(5, 3));
      for (auto& [node, pos] : s.positions)
        for (auto& x : pos) x = rng.grid(6, 2);
      return s;
    };
    const Strategy a = random_strategy(), b = random_strategy();
    Strategy sum = a;
    for (auto& [node, pos] : sum.positions) pos = add(pos, b.at(node));
    for (const auto& path : t.paths()) {
      const auto va = value_process(t, a, path);
      // Independent recomputation from prices.
      Rational acc = a.initial_capital;
      Prefix node;
      for (std::size_t s = 0; s < path.size(); ++s) {
        const Prefix child = child_of(node, path[s]);
        for (std::size_t j = 0; j < t.asset_dim; ++j)
          acc += a.at(node)[j] * (t.price(child)[j] - t.price(node)[j]);
        EXPECT_EQ(va[s + 1], acc);
        node = child;
      }
      // V^{x, a+b} = V^{x, a} + V^{0, b}.
      Strategy b0 = b;
      b0.initial_capital = 0;
      const auto vs = value_process(t, sum, path), vb = value_process(t, b0, path);
      for (std::size_t s = 0; s < vs.size(); ++s) EXPECT_EQ(vs[s], va[s] + vb[s]);
    }
  }
}

TEST(Supports, OnePeriodExamples) {
  const auto t = up_down();
  EXPECT_EQ(support_E(t, {}, {v({q(1, 2), q(1, 2)})}), (PointSet{v({-1}), v({1})}));
  EXPECT_EQ(support_E(t, {}, {v({1, 0})}), (PointSet{v({-1})}));

  const auto two = one_period({v({1}), v({-1})}, {v({1, 0}), v({0, 1})});
  EXPECT_EQ(support_D(two, {}), (PointSet{v({1}), v({-1})}));

  const auto single = one_period({v({1}), v({-1}), v({3})}, {v({q(1, 2), 0, q(1, 2)})});
  EXPECT_EQ(support_D(single, {}), support_E(single, {}, single.generators({}).front()));

  KernelSelection k;
  k.weights[{}] = v({1, 0});
  EXPECT_EQ(support_DP(two, k, {}), (PointSet{v({1})}));
  k.weights[{}] = v({q(1, 2), q(1, 2)});
  EXPECT_EQ(support_DP(two, k, {}), support_D(two, {}));
}

TEST(Supports, MatchBruteForceAndNest) {
  Rng rng(6);
  for (const auto& t : corpus(7, 40)) {
    for (const auto& node : t.non_terminal_nodes()) {
      const auto& gens = t.generators(node);
      const std::size_t m = t.alphabet_size(node.size());
      std::set<Vec> brute_d;
      std::vector<Label> brute_rel;
      for (Label a = 0; a < m; ++a) {
        bool charged = false;
        for (const auto& g : gens) charged = charged || g[a] > 0;
        if (charged) {
          brute_d.insert(sub(t.price(child_of(node, a)), t.price(node)));
          brute_rel.push_back(a);
        }
      }
      const PointSet d = support_D(t, node);
      EXPECT_EQ(std::set<Vec>(d.begin(), d.end()), brute_d);
      EXPECT_EQ(relevant_children(t, node), brute_rel);

      // Random point of the hull: support_E equals brute force and sits inside D.
      const Vec w = rng.simplex(std::vector<bool>(gens.size(), true), 10);
      const ProbVector p = induced_measure(t, node, w);
      std::set<Vec> brute_e;
      for (Label a = 0; a < m; ++a)
        if (p[a] > 0) brute_e.insert(sub(t.price(child_of(node, a)), t.price(node)));
      const PointSet e = support_E(t, node, p);
      EXPECT_EQ(std::set<Vec>(e.begin(), e.end()), brute_e);
      for (const auto& y : e) EXPECT_TRUE(brute_d.count(y));
    }
  }
}

TEST(Relevance, Examples) {
  const auto t = one_period({v({1}), v({-1})}, {v({1, 0})});
  EXPECT_EQ(relevant_children(t, {}), (std::vector<Label>{0}));
  const auto both = one_period({v({1}), v({-1})}, {v({1, 0}), v({0, 1})});
  EXPECT_EQ(relevant_children(both, {}), (std::vector<Label>{0, 1}));

  const auto sym = symmetric_binary(2);
  for (const auto& p : sym.paths()) EXPECT_TRUE(is_relevant_path(sym, p));
  EXPECT_TRUE(is_relevant_path(t, {0}));
  EXPECT_FALSE(is_relevant_path(t, {1}));
  EXPECT_TRUE(is_relevant_path(t, {}));
}

// A path is relevant iff the measure that, edge by edge, uses the generator
// with the most mass on that edge charges it.
TEST(Relevance, MatchesEdgewiseMaximization) {
  for (const auto& t : corpus(8, 40)) {
    for (const auto& path : t.paths()) {
      Rational best = 1;
      Prefix node;
      for (Label a : path) {
        Rational edge = 0;
        for (const auto& g : t.generators(node)) edge = std::max(edge, g[a]);
        best *= edge;
        node.push_back(a);
      }
      EXPECT_EQ(is_relevant_path(t, path), best > 0);
    }
  }
}

TEST(PathProbability, Examples) {
  const auto t = symmetric_binary(2);
  KernelSelection k;
  for (const auto& n : t.non_terminal_nodes()) k.weights[n] = v({1});
  EXPECT_EQ(path_probability(t, k, {0, 1}), q(1, 4));

  const auto skew = one_period({v({1}), v({-1})}, {v({1, 0})});
  KernelSelection ks;
  ks.weights[{}] = v({1});
  EXPECT_EQ(path_probability(skew, ks, {1}), 0);
}

TEST(PathProbability, SumsToOneAndIsLinearPerNode) {
  Rng rng(9);
  for (const auto& t : corpus(10, 40)) {
    const KernelSelection k = random_kernels(t, rng);
    Rational total = 0;
    for (const auto& p : t.paths()) total += path_probability(t, k, p);
    EXPECT_EQ(total, 1);

    // Mixing the weights at one node mixes the path masses.
    const auto nodes = t.non_terminal_nodes();
    const Prefix node = nodes[rng.index(nodes.size())];
    const KernelSelection other = random_kernels(t, rng);
    KernelSelection a = k, b = k, mid = k;
    b.weights[node] = other.at(node);
    mid.weights[node] = scaled(add(k.at(node), other.at(node)), q(1, 2));
    for (const auto& p : t.paths())
      EXPECT_EQ(path_probability(t, mid, p), (path_probability(t, a, p) + path_probability(t, b, p)) / 2);
  }
}

TEST(QuasiSure, Examples) {
  const auto t = one_period({v({1}), v({-1})}, {v({1, 0})});
  EXPECT_TRUE(quasi_sure_geq(t, [](const Path&) { return Rational(0); }, 0));
  EXPECT_TRUE(quasi_sure_geq(t, [](const Path& p) { return p[0] == 1 ? Rational(-1) : Rational(0); }, 0));
  EXPECT_FALSE(quasi_sure_geq(t, [](const Path& p) { return p[0] == 0 ? Rational(-1) : Rational(0); }, 0));
}

// Against every vertex kernel selection on small trees (<= 64 paths).
TEST(QuasiSure, MatchesVertexKernelEnumeration) {
  GeneratorConfig c;
  c.periods = {1, 2};
  c.labels = {1, 3};
  c.generators = {1, 2};
  c.zero_mass_percent = 35;
  Rng rng(17);
  for (const auto& t : corpus(11, 60, c)) {
    const auto f = random_path_function(t, rng);
    const Rational bound = rng.grid(3, 1);
    const auto nodes = t.non_terminal_nodes();
    std::vector<std::size_t> pick(nodes.size(), 0);
    bool brute = true;
    for (;;) {
      KernelSelection k;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        Vec w = zeros(t.generators(nodes[i]).size());
        w[pick[i]] = 1;
        k.weights[nodes[i]] = w;
      }
      for (const auto& p : t.paths())
        if (f.at(p) < bound && path_probability(t, k, p) > 0) brute = false;
      std::size_t i = 0;
      while (i < nodes.size() && ++pick[i] == t.generators(nodes[i]).size()) pick[i++] = 0;
      if (i == nodes.size()) break;
    }
    EXPECT_EQ(quasi_sure_geq(t, as_function(f), bound), brute);
  }
}

TEST(Tree, KeysRoundTrip) {
  const auto t = symmetric_binary(2);
  EXPECT_EQ(t.key({}), "");
  EXPECT_EQ(t.key({0, 1}), "u/d");
  EXPECT_EQ(t.parse_key("u/d"), (Prefix{0, 1}));
  EXPECT_EQ(t.parse_key(""), Prefix{});
  EXPECT_THROW(t.parse_key("x"), LookupError);
  EXPECT_THROW(t.parse_key("u/u/u"), LookupError);
}
