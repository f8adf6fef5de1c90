// qsna: command-line front end for the quasi-sure no-arbitrage toolkit.
//
// Exit codes: 0 success / NA holds, 1 domain-negative result, 2 input error.

#include "qsna/qsna.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

struct CliConfig {
  std::string input;
  std::string output;
  std::string witness;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::string periods = "1:3";
  std::string dim = "1:3";
  std::string labels = "1:5";
  std::string generators = "1:5";
  std::int64_t denominator_bound = 12;
  unsigned zero_mass = 10;
  unsigned balanced = 90;
  bool force_arbitrage = false;
  std::size_t instances = 100;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

qsna::Range parse_range(const std::string& text, const char* flag) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw InputError(std::string(flag) + ": expected N or LO:HI, got \"" + text + "\"");
    return static_cast<std::int64_t>(v);
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const auto v = to_int(text);
    return {v, v};
  }
  return {to_int(text.substr(0, colon)), to_int(text.substr(colon + 1))};
}

qsna::GeneratorConfig generator_config(const CliConfig& c) {
  qsna::GeneratorConfig g;
  g.seed = c.seed;
  g.periods = parse_range(c.periods, "--periods");
  g.dim = parse_range(c.dim, "--dim");
  g.labels = parse_range(c.labels, "--labels");
  g.generators = parse_range(c.generators, "--generators");
  g.denominator_bound = c.denominator_bound;
  g.zero_mass_percent = c.zero_mass;
  g.balanced_percent = c.balanced;
  g.force_arbitrage = c.force_arbitrage;
  if (auto p = g.problems(); !p.empty()) throw InputError(p.front());
  return g;
}

void emit(const CliConfig& c, const qsna::Json& doc) {
  std::ostringstream text;
  if (c.format == "text")
    qsna::io::render_text(doc, text);
  else
    text << doc.dump(2) << "\n";
  if (c.output.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw InputError("cannot write " + c.output);
    out << text.str();
  }
}

qsna::Json violations_json(const std::vector<qsna::Violation>& vs) {
  qsna::Json a = qsna::Json::array();
  for (const auto& v : vs) a.push_back({{"node", v.node}, {"message", v.message}});
  return a;
}

qsna::ScenarioTree load_valid_tree(const CliConfig& c) {
  if (c.input.empty()) throw InputError("--input is required");
  qsna::ScenarioTree tree = qsna::io::load_tree(c.input);
  const auto vs = qsna::validate(tree);
  if (!vs.empty()) {
    std::string msg = "invalid instance:";
    for (const auto& v : vs) msg += "\n  [" + v.node + "] " + v.message;
    throw InputError(msg);
  }
  return tree;
}

int cmd_validate(const CliConfig& c) {
  if (c.input.empty()) throw InputError("--input is required");
  const qsna::ScenarioTree tree = qsna::io::load_tree(c.input);
  const auto vs = qsna::validate(tree);
  emit(c, {{"valid", vs.empty()}, {"violations", violations_json(vs)}});
  return vs.empty() ? kOk : kNegative;
}

int cmd_check_na(const CliConfig& c) {
  const qsna::ScenarioTree tree = load_valid_tree(c);
  const qsna::Json report = qsna::io::na_report(tree);
  emit(c, report);
  return report["global_na"].get<bool>() ? kOk : kNegative;
}

int cmd_find_arbitrage(const CliConfig& c) {
  const qsna::ScenarioTree tree = load_valid_tree(c);
  const auto failure = qsna::first_relevant_failure(tree);
  if (!failure) {
    std::cerr << "no arbitrage exists\n";
    emit(c, {{"arbitrage_found", false}, {"message", "no arbitrage exists"}});
    return kNegative;
  }
  const qsna::ArbitrageWitness w = qsna::extract_arbitrage(tree, failure->node, *failure->witness);
  qsna::Json doc = qsna::io::witness_to_json(tree, w);
  doc["failing_node"] = tree.key(failure->node);
  doc["local_witness"] = qsna::io::to_json(*failure->witness);
  emit(c, doc);
  return kOk;
}

int cmd_construct_pstar(const CliConfig& c) {
  const qsna::ScenarioTree tree = load_valid_tree(c);
  const qsna::PStarCertificate cert = qsna::construct_pstar(tree);
  emit(c, qsna::io::certificate_to_json(tree, cert));
  return cert.valid ? kOk : kNegative;
}

int cmd_verify_witness(const CliConfig& c) {
  const qsna::ScenarioTree tree = load_valid_tree(c);
  if (c.witness.empty()) throw InputError("--witness is required");
  const qsna::Json doc = qsna::io::parse_json_text(qsna::io::read_file(c.witness));
  qsna::WitnessCheck check;
  try {
    check = qsna::verify_witness(tree, qsna::io::witness_from_json(tree, doc));
  } catch (const qsna::ParseError& e) {
    check = {false, std::string("witness does not match the instance: ") + e.what()};
  }
  emit(c, {{"verified", check.ok}, {"reason", check.reason}});
  return check.ok ? kOk : kNegative;
}

int cmd_gen(const CliConfig& c) {
  emit(c, qsna::io::tree_to_json(qsna::gen_instance(generator_config(c))));
  return kOk;
}

int cmd_harness(const CliConfig& c) {
  qsna::HarnessOptions options;
#ifdef QSNA_INJECT_FAULT
  options.flip_global_verdict = true;
#endif
  const qsna::HarnessReport r = qsna::run_all(generator_config(c), c.instances, options);
  emit(c, qsna::io::harness_report_to_json(r));
  if (c.format == "text") std::cerr << "wall time: " << r.wall_seconds << " s\n";
  return r.ok() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-sure no-arbitrage on finite multi-prior scenario trees"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("-i,--input", cfg.input, "Instance file (canonical JSON)");
    if (needs_input) in->required();
    sub->add_option("-o,--output", cfg.output, "Output file (default: stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };
  auto corpus = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "64-bit seed");
    sub->add_option("--periods", cfg.periods, "Horizon T (N or LO:HI)");
    sub->add_option("--dim", cfg.dim, "Asset dimension d (N or LO:HI)");
    sub->add_option("--labels", cfg.labels, "Labels per level (N or LO:HI)");
    sub->add_option("--generators", cfg.generators, "Generator priors per node (N or LO:HI)");
    sub->add_option("--denominator-bound", cfg.denominator_bound, "Largest denominator on the rational grid");
    sub->add_option("--zero-mass", cfg.zero_mass, "Percent chance a child is pruned");
    sub->add_option("--balanced", cfg.balanced, "Percent chance a node's increments surround the origin");
    sub->add_flag("--force-arbitrage", cfg.force_arbitrage, "Post-edit one relevant node into a local arbitrage");
  };

  std::map<CLI::App*, int (*)(const CliConfig&)> handlers;
  auto* validate = app.add_subcommand("validate", "Check an instance for well-formedness");
  common(validate, true);
  handlers[validate] = cmd_validate;
  auto* check = app.add_subcommand("check-na", "Per-node and global quasi-sure NA verdicts");
  common(check, true);
  handlers[check] = cmd_check_na;
  auto* find = app.add_subcommand("find-arbitrage", "Extract an explicit arbitrage witness");
  common(find, true);
  handlers[find] = cmd_find_arbitrage;
  auto* pstar = app.add_subcommand("construct-pstar", "Build and check the dominating prior P*");
  common(pstar, true);
  handlers[pstar] = cmd_construct_pstar;
  auto* verify = app.add_subcommand("verify-witness", "Re-verify a witness file against an instance");
  common(verify, true);
  verify->add_option("-w,--witness", cfg.witness, "Witness file")->required();
  handlers[verify] = cmd_verify_witness;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  common(gen, false);
  corpus(gen);
  handlers[gen] = cmd_gen;
  auto* harness = app.add_subcommand("harness", "Run the randomized equivalence harness");
  common(harness, false);
  corpus(harness);
  harness->add_option("--instances", cfg.instances, "Number of corpus instances");
  handlers[harness] = cmd_harness;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    for (auto& [sub, handler] : handlers)
      if (sub->parsed()) return handler(cfg);
  } catch (const qsna::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const qsna::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
