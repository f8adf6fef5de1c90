// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "qsna/qsna.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace qsna;

namespace {

// Pinned sizes and limits.
constexpr std::size_t kLocalNodes = 1000;
constexpr double kLocalSeconds = 60.0;
constexpr std::size_t kCorpusTrees = 200;
constexpr double kCorpusSeconds = 600.0;
constexpr std::size_t kKernelsPerTree = 3;
constexpr std::size_t kKernelPairs = 500;
constexpr std::size_t kClassSamples = 20;
constexpr std::size_t kDominationSamples = 20;
constexpr std::size_t kFunctionsPerTree = 3;
constexpr std::size_t kSectionTriples = 500;
constexpr std::size_t kForcedTrees = 200;
constexpr std::size_t kHarnessInstances = 60;
constexpr std::uint64_t kSeed = 20261014;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("criterion %d %-34s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<ScenarioTree> make_corpus(GeneratorConfig c, std::size_t n, std::uint64_t seed) {
  std::vector<ScenarioTree> out;
  for (std::size_t i = 0; i < n; ++i) {
    c.seed = instance_seed(seed, i);
    out.push_back(gen_instance(c));
  }
  return out;
}

bool is_arbitrage(const ScenarioTree& t, const ArbitrageCandidate& c, const std::vector<Path>& paths) {
  for (const auto& p : paths)
    if (sgn(terminal_value(t, c.strategy, p)) < 0) return false;
  return terminal_value(t, c.strategy, c.profit_path) >= 1;
}

Outcome local_equivalence() {
  GeneratorConfig c;
  c.periods = {1, 1};
  c.dim = {1, 4};
  c.labels = {1, 8};
  c.generators = {1, 5};
  c.denominator_bound = 20;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t disagree = 0, holding = 0;
  const auto trees = make_corpus(c, kLocalNodes, kSeed + 1);
  for (const auto& t : trees) {
    const auto v = local_na(t, {});
    holding += v.holds;
    disagree += v.holds != local_na_lp_oracle(v.support);
  }
  const double secs = seconds_since(t0);
  return {disagree == 0 && trees.size() >= kLocalNodes && secs < kLocalSeconds,
          fmt("nodes=%zu na_holding=%zu disagreements=%zu time=%.2fs (limit %.0fs)", trees.size(), holding, disagree,
              secs, kLocalSeconds)};
}

struct CorpusResults {
  Outcome global, pstar, single, klass, section;
};

CorpusResults corpus_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto trees = make_corpus(GeneratorConfig{}, kCorpusTrees, kSeed + 2);
  std::size_t g_dis = 0, p_dis = 0, cert_fail = 0, na_trees = 0;
  std::size_t pairs = 0, s_dis = 0;
  std::size_t members = 0, m_fail = 0, polar_fail = 0, dom_samples = 0, dom_fail = 0, min_members = SIZE_MAX;
  std::size_t triples = 0, f_dis = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const auto& t = trees[i];
    Rng rng(mix_seed(instance_seed(kSeed + 3, i)));
    const bool na = global_na(t);
    na_trees += na;
    const auto found = global_arbitrage_search(t);
    if (na == found.has_value() || (found && !is_arbitrage(t, *found, relevant_paths(t)))) ++g_dis;

    const auto cert = construct_pstar(t);
    if (cert.valid != na) ++p_dis;
    if (na) {
      for (const auto& ch : cert.checks)
        if (!ch.passed()) ++cert_fail;
      if (cert.checks.size() != [&] {
            std::size_t n = 0;
            for (std::size_t s = 0; s < t.horizon; ++s) n += relevant_nodes_at(t, s).size();
            return n;
          }())
        ++cert_fail;
    }

    for (std::size_t k = 0; k < kKernelsPerTree; ++k, ++pairs) {
      const auto kernels = random_kernels(t, rng);
      const auto f = single_prior_arbitrage_search(t, kernels);
      if (single_prior_na(t, kernels) == f.has_value() || (f && !is_arbitrage(t, *f, charged_paths(t, kernels))))
        ++s_dis;
    }

    if (na) {
      std::size_t here = 0;
      for (std::size_t s = 0; s < kClassSamples; ++s, ++here) {
        const auto sample = sample_class_member(t, cert.kernels, rng.next());
        if (!single_prior_na(t, sample.member)) ++m_fail;
      }
      members += here;
      min_members = std::min(min_members, here);
      if (!polar_sets_equal(t, cert.kernels)) ++polar_fail;
      const Rational floor(1, 1UL << t.horizon);
      for (std::size_t s = 0; s < kDominationSamples; ++s, ++dom_samples) {
        const auto q = random_kernels(t, rng);
        const auto p = dominating_member(t, cert.kernels, q);
        bool ok = single_prior_na(t, p);
        for (const auto& path : t.paths()) ok = ok && path_probability(t, p, path) >= floor * path_probability(t, q, path);
        if (!ok) ++dom_fail;
      }
    }

    for (std::size_t s = 0; s < kFunctionsPerTree; ++s, ++triples) {
      const auto f = random_path_function(t, rng);
      const std::size_t lvl = rng.index(t.horizon);
      if (section_positive(t, as_function(f), lvl).complement_polar != quasi_sure_geq(t, as_function(f), 0)) ++f_dis;
    }
  }
  const double secs = seconds_since(t0);
  const bool timely = secs < kCorpusSeconds;
  CorpusResults r;
  r.global = {g_dis == 0 && trees.size() >= kCorpusTrees && timely,
              fmt("trees=%zu na_holding=%zu disagreements=%zu time=%.2fs (limit %.0fs)", trees.size(), na_trees, g_dis,
                  secs, kCorpusSeconds)};
  r.pstar = {p_dis == 0 && cert_fail == 0 && na_trees > 0,
             fmt("trees=%zu disagreements=%zu failed_node_checks_on_na_trees=%zu", trees.size(), p_dis, cert_fail)};
  r.single = {s_dis == 0 && pairs >= kKernelPairs, fmt("pairs=%zu disagreements=%zu", pairs, s_dis)};
  if (min_members == SIZE_MAX) min_members = 0;
  r.klass = {na_trees > 0 && m_fail == 0 && polar_fail == 0 && dom_fail == 0 && min_members >= kClassSamples &&
                 dom_samples >= kDominationSamples * na_trees,
             fmt("na_trees=%zu members=%zu (min/tree %zu) member_failures=%zu polar_mismatches=%zu "
                 "domination_samples=%zu domination_failures=%zu",
                 na_trees, members, min_members, m_fail, polar_fail, dom_samples, dom_fail)};
  r.section = {f_dis == 0 && triples >= kSectionTriples, fmt("triples=%zu disagreements=%zu", triples, f_dis)};
  return r;
}

Outcome witness_soundness() {
  GeneratorConfig c;
  c.force_arbitrage = true;
  std::size_t verified = 0, total = 0;
  for (const auto& t : make_corpus(c, kForcedTrees, kSeed + 4)) {
    ++total;
    const auto f = first_relevant_failure(t);
    if (!f) continue;
    const auto w = extract_arbitrage(t, f->node, *f->witness);
    verified += verify_witness(t, io::witness_from_json(t, io::parse_json_text(io::witness_to_json(t, w).dump()))).ok;
  }
  return {verified == total && total >= kForcedTrees, fmt("verified=%zu/%zu", verified, total)};
}

Outcome determinism() {
  const GeneratorConfig c = [] {
    GeneratorConfig g;
    g.seed = kSeed + 5;
    return g;
  }();
  const std::string a = io::harness_report_to_json(run_all(c, kHarnessInstances)).dump(2);
  const std::string b = io::harness_report_to_json(run_all(c, kHarnessInstances)).dump(2);
  std::size_t roundtrip_fail = 0, objects = 0;
  GeneratorConfig forced = c;
  forced.force_arbitrage = true;
  for (const bool force : {false, true}) {
    for (const auto& t : make_corpus(force ? forced : c, 100, kSeed + 6)) {
      ++objects;
      const std::string text = io::tree_to_json(t).dump();
      const auto back = io::tree_from_json(io::parse_json_text(text));
      if (!(back == t) || io::tree_to_json(back).dump() != text) ++roundtrip_fail;
      const auto cert = construct_pstar(t);
      ++objects;
      if (!(io::certificate_from_json(t, io::parse_json_text(io::certificate_to_json(t, cert).dump())) == cert))
        ++roundtrip_fail;
      if (const auto f = first_relevant_failure(t)) {
        ++objects;
        const auto w = extract_arbitrage(t, f->node, *f->witness);
        if (!(io::witness_from_json(t, io::parse_json_text(io::witness_to_json(t, w).dump())) == w)) ++roundtrip_fail;
      }
    }
  }
  return {a == b && roundtrip_fail == 0,
          fmt("report_bytes=%zu identical=%s roundtrip_objects=%zu roundtrip_failures=%zu", a.size(),
              a == b ? "yes" : "no", objects, roundtrip_fail)};
}

Outcome degenerate() {
  std::vector<std::string> problems;
  // Flat market: every increment is zero.
  ScenarioTree flat;
  flat.horizon = 2;
  flat.asset_dim = 2;
  flat.alphabets = {{"a", "b", "c"}, {"x", "y"}};
  for (std::size_t s = 0; s <= flat.horizon; ++s)
    for (const auto& n : flat.nodes_at(s)) {
      flat.prices[n] = {Rational(3), Rational(-1, 2)};
      if (s < flat.horizon)
        flat.priors[n] = {ProbVector{Vec(flat.alphabet_size(s), Rational(1, static_cast<unsigned long>(flat.alphabet_size(s))))},
                          ProbVector{[&] {
                            Vec w(flat.alphabet_size(s), Rational(0));
                            w[0] = 1;
                            return w;
                          }()}};
    }
  if (!validate(flat).empty()) problems.push_back("flat tree invalid");
  if (!global_na(flat)) problems.push_back("flat tree: NA should hold");
  for (const auto& n : flat.non_terminal_nodes())
    if (support_D(flat, n) != PointSet{zeros(2)}) problems.push_back("flat tree: D != {0} at \"" + flat.key(n) + "\"");
  if (!construct_pstar(flat).valid) problems.push_back("flat tree: P* invalid");
  if (global_arbitrage_search(flat)) problems.push_back("flat tree: LP found arbitrage");

  // Single path with strictly increasing price.
  ScenarioTree line;
  line.horizon = 3;
  line.asset_dim = 1;
  line.alphabets.assign(3, {"up"});
  for (std::size_t s = 0; s <= 3; ++s) {
    line.prices[Prefix(s, 0)] = {Rational(static_cast<long>(s * s + s), 2)};
    if (s < 3) line.priors[Prefix(s, 0)] = {ProbVector{{Rational(1)}}};
  }
  if (!validate(line).empty()) problems.push_back("line tree invalid");
  if (global_na(line)) problems.push_back("line tree: NA should fail");
  const auto f = first_relevant_failure(line);
  if (!f || !f->node.empty() || !f->witness || *f->witness != Vec{Rational(1)}) {
    problems.push_back("line tree: expected witness 1 at the root");
  } else {
    const auto w = extract_arbitrage(line, f->node, *f->witness);
    if (!verify_witness(line, w).ok) problems.push_back("line tree: witness does not verify");
  }
  if (construct_pstar(line).valid) problems.push_back("line tree: P* should be invalid");

  std::string detail = problems.empty() ? "flat tree and increasing single path as expected" : problems.front();
  if (problems.size() > 1) detail += fmt(" (+%zu more)", problems.size() - 1);
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  report(1, "local oracle equivalence", local_equivalence());
  const CorpusResults r = corpus_checks();
  report(2, "local/global equivalence", r.global);
  report(3, "P* certificate", r.pstar);
  report(4, "single-prior equivalence", r.single);
  report(5, "arbitrage-free class", r.klass);
  report(6, "section positivity", r.section);
  report(7, "witness soundness", witness_soundness());
  report(8, "exactness and determinism", determinism());
  report(9, "degenerate suite", degenerate());
  std::printf("%s: %d of 9 criteria failed, total %.2fs\n", failures ? "FAIL" : "PASS", failures, seconds_since(t0));
  return failures ? 1 : 0;
}
