#pragma once

// Seeded instance generator and the randomized equivalence harness.

#include "qsna/io.hpp"

#include <chrono>

namespace qsna {

struct Range {
  std::int64_t lo = 1;
  std::int64_t hi = 1;

  bool valid() const { return lo <= hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  Range periods{1, 3};
  Range dim{1, 3};
  Range labels{1, 5};
  Range generators{1, 5};
  std::int64_t denominator_bound = 12;
  /// Chance that a child is pruned (zero mass under every generator).
  unsigned zero_mass_percent = 10;
  /// Chance that a node's increments are built around the origin.
  unsigned balanced_percent = 90;
  bool force_arbitrage = false;

  /// Empty iff the configuration is usable.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (!periods.valid() || periods.lo < 1) out.push_back("periods range must be nonempty and >= 1");
    if (!dim.valid() || dim.lo < 1) out.push_back("dim range must be nonempty and >= 1");
    if (!labels.valid() || labels.lo < 1 || labels.hi > 26) out.push_back("labels range must lie in [1, 26]");
    if (!generators.valid() || generators.lo < 1) out.push_back("generators range must be nonempty and >= 1");
    if (denominator_bound < 1) out.push_back("denominator bound must be >= 1");
    if (zero_mass_percent > 100 || balanced_percent > 100) out.push_back("percentages must lie in [0, 100]");
    return out;
  }

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

namespace detail {

inline std::int64_t draw(Rng& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

inline void shift_subtree(ScenarioTree& tree, const Prefix& root, const Vec& delta) {
  for (auto& [node, price] : tree.prices)
    if (node.size() >= root.size() && std::equal(root.begin(), root.end(), node.begin())) price = add(price, delta);
}

}  // namespace detail

/// Random well-formed instance, deterministic in config.seed.
inline ScenarioTree gen_instance(const GeneratorConfig& config) {
  if (auto p = config.problems(); !p.empty()) throw PreconditionError("gen_instance: " + p.front());
  Rng rng(config.seed);
  const std::int64_t bound = config.denominator_bound;
  ScenarioTree tree;
  tree.horizon = static_cast<std::size_t>(detail::draw(rng, config.periods));
  tree.asset_dim = static_cast<std::size_t>(detail::draw(rng, config.dim));
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    const auto m = static_cast<std::size_t>(detail::draw(rng, config.labels));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < m; ++i) labels.emplace_back(1, static_cast<char>('a' + i));
    tree.alphabets.push_back(std::move(labels));
  }
  const std::size_t d = tree.asset_dim;

  Vec root(d);
  for (auto& x : root) x = rng.grid(bound, 5);
  tree.prices[Prefix{}] = root;

  for (std::size_t t = 0; t < tree.horizon; ++t) {
    const std::size_t m = tree.alphabet_size(t);
    for (const auto& node : tree.nodes_at(t)) {
      const std::int64_t den = rng.uniform(1, bound);
      std::vector<Vec> inc(m, zeros(d));
      for (auto& y : inc)
        for (auto& x : y) {
          x = Rational(rng.uniform(-den, den), den);
          x.canonicalize();
        }
      for (std::size_t a = 1; a < m; ++a) {
        if (rng.percent(8)) inc[a] = inc[rng.index(a)];
        if (rng.percent(8)) inc[a] = zeros(d);
      }
      if (rng.percent(config.balanced_percent)) {
        Vec total = zeros(d);
        for (std::size_t a = 0; a + 1 < m; ++a) total = add(total, inc[a]);
        inc[m - 1] = scaled(total, -1);
      }
      const Vec& base = tree.prices.at(node);
      for (Label a = 0; a < m; ++a) tree.prices[child_of(node, a)] = add(base, inc[a]);

      std::vector<bool> allowed(m);
      bool any = false;
      for (std::size_t a = 0; a < m; ++a) {
        allowed[a] = !rng.percent(config.zero_mass_percent);
        any = any || allowed[a];
      }
      if (!any) allowed[rng.index(m)] = true;
      const auto g = static_cast<std::size_t>(detail::draw(rng, config.generators));
      std::vector<ProbVector> gens;
      for (std::size_t k = 0; k < g; ++k) gens.push_back({rng.simplex(allowed, bound, rng.percent(60))});
      tree.priors[node] = std::move(gens);
    }
  }

  if (config.force_arbitrage) {
    const auto depth = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(tree.horizon) - 1));
    Prefix node;
    while (node.size() < depth) {
      const auto rel = relevant_children(tree, node);
      node.push_back(rel[rng.index(rel.size())]);
    }
    // Every increment at `node` gets a positive j-th coordinate; descendants
    // move with their ancestor so deeper increments are unchanged.
    const std::size_t j = rng.index(d);
    const std::int64_t den = rng.uniform(1, bound);
    for (Label a = 0; a < tree.alphabet_size(node.size()); ++a) {
      const Prefix child = child_of(node, a);
      Vec delta = zeros(d);
      Rational target(rng.uniform(1, den), den);
      target.canonicalize();
      delta[j] = target - delta_S(tree, node, a)[j];
      detail::shift_subtree(tree, child, delta);
    }
  }
  return tree;
}

struct Disagreement {
  std::size_t instance_index = 0;
  std::uint64_t instance_seed = 0;
  std::string detail;
  Json instance;
};

struct CheckStats {
  std::string name;
  std::size_t instances = 0;
  std::size_t evaluations = 0;
  std::size_t agreements = 0;
  std::vector<Disagreement> disagreements;
};

struct HarnessOptions {
  std::size_t kernel_samples = 3;
  std::size_t class_samples = 20;
  std::size_t function_samples = 3;
  /// Test fixture: report the negation of global_na to the global check.
  bool flip_global_verdict = false;
};

struct HarnessReport {
  GeneratorConfig config;
  std::size_t n_instances = 0;
  std::size_t na_holding = 0;
  std::size_t na_failing = 0;
  std::vector<CheckStats> checks;
  double wall_seconds = 0;

  std::size_t total_disagreements() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.disagreements.size();
    return n;
  }
  bool ok() const { return total_disagreements() == 0; }

  const CheckStats* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Seed of the i-th corpus instance.
inline std::uint64_t instance_seed(std::uint64_t corpus_seed, std::size_t i) {
  return mix_seed(corpus_seed ^ mix_seed(static_cast<std::uint64_t>(i)));
}

/// Random path function on the grid; nonnegative on most paths.
inline std::map<Path, Rational> random_path_function(const ScenarioTree& tree, Rng& rng) {
  std::map<Path, Rational> f;
  const unsigned negative_percent = static_cast<unsigned>(rng.uniform(0, 30));
  for (const auto& path : tree.paths()) {
    Rational v(rng.uniform(0, 6), rng.uniform(1, 6));
    v.canonicalize();
    if (rng.percent(negative_percent)) v = -v - Rational(1, 6);
    f[path] = v;
  }
  return f;
}

inline PathFunction as_function(const std::map<Path, Rational>& f) {
  return [&f](const Path& p) { return f.at(p); };
}

namespace detail {

class CheckRecorder {
 public:
  explicit CheckRecorder(std::vector<CheckStats>& checks) : checks_(checks) {}

  void begin_instance(std::size_t index, std::uint64_t seed, const ScenarioTree* tree) {
    index_ = index;
    seed_ = seed;
    tree_ = tree;
    touched_.clear();
  }

  void record(const std::string& name, bool agree, const std::string& detail = {}) {
    CheckStats& c = stats(name);
    if (touched_.insert(name).second) ++c.instances;
    ++c.evaluations;
    if (agree) {
      ++c.agreements;
    } else {
      c.disagreements.push_back({index_, seed_, detail, tree_ ? io::tree_to_json(*tree_) : Json()});
    }
  }

 private:
  CheckStats& stats(const std::string& name) {
    for (auto& c : checks_)
      if (c.name == name) return c;
    checks_.push_back(CheckStats{name, 0, 0, 0, {}});
    return checks_.back();
  }

  std::vector<CheckStats>& checks_;
  std::size_t index_ = 0;
  std::uint64_t seed_ = 0;
  const ScenarioTree* tree_ = nullptr;
  std::set<std::string> touched_;
};

inline bool candidate_is_arbitrage(const ScenarioTree& tree, const ArbitrageCandidate& c, const std::vector<Path>& paths) {
  for (const auto& p : paths)
    if (sgn(terminal_value(tree, c.strategy, p)) < 0) return false;
  return terminal_value(tree, c.strategy, c.profit_path) >= 1;
}

}  // namespace detail

inline const std::vector<std::string>& harness_check_names() {
  static const std::vector<std::string> names{
      "well_formed",         "local_oracle_equivalence", "global_equivalence", "pstar_equivalence",
      "single_prior_equivalence", "class_membership",    "polar_sets",         "domination",
      "section_equivalence", "witness_soundness"};
  return names;
}

/// Runs every executable equivalence on `n_instances` seeded instances.
inline HarnessReport run_all(const GeneratorConfig& config, std::size_t n_instances, const HarnessOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  HarnessReport report;
  report.config = config;
  report.n_instances = n_instances;
  if (n_instances > 0)
    for (const auto& name : harness_check_names()) report.checks.push_back(CheckStats{name, 0, 0, 0, {}});
  detail::CheckRecorder rec(report.checks);

  for (std::size_t i = 0; i < n_instances; ++i) {
    GeneratorConfig cfg = config;
    cfg.seed = instance_seed(config.seed, i);
    const ScenarioTree tree = gen_instance(cfg);
    rec.begin_instance(i, cfg.seed, &tree);
    Rng rng(mix_seed(cfg.seed));

    const auto violations = validate(tree);
    rec.record("well_formed", violations.empty(), violations.empty() ? "" : violations.front().message);
    if (!violations.empty()) continue;

    for (const auto& node : tree.non_terminal_nodes()) {
      const LocalVerdict v = local_na(tree, node);
      const bool oracle = local_na_lp_oracle(v.support);
      rec.record("local_oracle_equivalence", v.holds == oracle, "node \"" + tree.key(node) + "\"");
    }

    const bool na = global_na(tree);
    (na ? report.na_holding : report.na_failing)++;
    {
      const bool reported = options.flip_global_verdict ? !na : na;
      const auto found = global_arbitrage_search(tree);
      bool agree = reported == !found.has_value();
      if (found) agree = agree && detail::candidate_is_arbitrage(tree, *found, relevant_paths(tree));
      rec.record("global_equivalence", agree, std::string("global_na=") + (reported ? "true" : "false"));
    }

    const PStarCertificate cert = construct_pstar(tree);
    rec.record("pstar_equivalence", cert.valid == na, std::string("certificate valid=") + (cert.valid ? "true" : "false"));

    for (std::size_t s = 0; s < options.kernel_samples; ++s) {
      const KernelSelection k = random_kernels(tree, rng);
      const bool geometric = single_prior_na(tree, k);
      const auto found = single_prior_arbitrage_search(tree, k);
      bool agree = geometric == !found.has_value();
      if (found) agree = agree && detail::candidate_is_arbitrage(tree, *found, charged_paths(tree, k));
      rec.record("single_prior_equivalence", agree, "kernel sample " + std::to_string(s));
    }

    if (na) {
      rec.record("polar_sets", polar_sets_equal(tree, cert.kernels), "polar sets differ");
      const Rational floor = Rational(1, 1UL << tree.horizon);
      for (std::size_t s = 0; s < options.class_samples; ++s) {
        const ClassSample sample = sample_class_member(tree, cert.kernels, rng.next());
        rec.record("class_membership", single_prior_na(tree, sample.member), "class sample " + std::to_string(s));
        const KernelSelection dom = dominating_member(tree, cert.kernels, sample.q);
        bool dominated = true;
        for (const auto& path : tree.paths())
          dominated = dominated && path_probability(tree, dom, path) >= floor * path_probability(tree, sample.q, path);
        rec.record("domination", dominated, "class sample " + std::to_string(s));
      }
    }

    for (std::size_t s = 0; s < options.function_samples; ++s) {
      const auto f = random_path_function(tree, rng);
      const std::size_t t = rng.index(tree.horizon);
      const bool sectioned = section_positive(tree, as_function(f), t).complement_polar;
      rec.record("section_equivalence", sectioned == quasi_sure_geq(tree, as_function(f), 0),
                 "function sample " + std::to_string(s) + " at level " + std::to_string(t));
    }

    if (!na) {
      const auto failure = first_relevant_failure(tree);
      bool sound = failure.has_value();
      std::string why = "no failing relevant node";
      if (failure) {
        const ArbitrageWitness w = extract_arbitrage(tree, failure->node, *failure->witness);
        const WitnessCheck check = verify_witness(tree, w);
        sound = check.ok;
        why = check.reason;
      }
      rec.record("witness_soundness", sound, why);
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace io {

inline Json config_to_json(const GeneratorConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["periods"] = {c.periods.lo, c.periods.hi};
  j["dim"] = {c.dim.lo, c.dim.hi};
  j["labels"] = {c.labels.lo, c.labels.hi};
  j["generators"] = {c.generators.lo, c.generators.hi};
  j["denominator_bound"] = c.denominator_bound;
  j["zero_mass_percent"] = c.zero_mass_percent;
  j["balanced_percent"] = c.balanced_percent;
  j["force_arbitrage"] = c.force_arbitrage;
  return j;
}

/// Deterministic unless include_timing is set.
inline Json harness_report_to_json(const HarnessReport& r, bool include_timing = false) {
  Json j;
  j["config"] = config_to_json(r.config);
  j["instances"] = r.n_instances;
  j["na_holding"] = r.na_holding;
  j["na_failing"] = r.na_failing;
  j["disagreements"] = r.total_disagreements();
  j["ok"] = r.ok();
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["instances"] = c.instances;
    e["evaluations"] = c.evaluations;
    e["agreements"] = c.agreements;
    Json dis = Json::array();
    for (const auto& d : c.disagreements) {
      Json x;
      x["instance_index"] = d.instance_index;
      x["instance_seed"] = d.instance_seed;
      x["detail"] = d.detail;
      x["instance"] = d.instance;
      dis.push_back(std::move(x));
    }
    e["disagreements"] = std::move(dis);
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  if (include_timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

}  // namespace io
}  // namespace qsna
