// Loads the sample instances, prints the NA verdicts, and shows either the
// P* certificate or an arbitrage witness for each.

#include "qsna/qsna.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> files;
  for (int i = 1; i < argc; ++i) files.emplace_back(argv[i]);
  if (files.empty()) {
    for (const char* name : {"symmetric_two_period.json", "one_period_arbitrage.json", "polar_failure.json",
                             "multi_prior_two_assets.json"})
      files.push_back(std::string(QSNA_SAMPLES_DIR) + "/" + name);
  }

  for (const auto& file : files) {
    const qsna::ScenarioTree tree = qsna::io::load_tree(file);
    std::cout << file << "\n";
    if (auto vs = qsna::validate(tree); !vs.empty()) {
      for (const auto& v : vs) std::cout << "  invalid [" << v.node << "] " << v.message << "\n";
      continue;
    }
    for (const auto& node : tree.non_terminal_nodes()) {
      const qsna::LocalVerdict v = qsna::local_na(tree, node);
      std::cout << "  node \"" << tree.key(node) << "\"" << (qsna::is_relevant_path(tree, node) ? "" : " (polar)")
                << ": " << (v.holds ? "NA" : "arbitrage, h = " + qsna::format_vec(*v.witness)) << "\n";
    }
    if (qsna::global_na(tree)) {
      const qsna::PStarCertificate cert = qsna::construct_pstar(tree);
      std::cout << "  NA(Q^T) holds; P* certificate " << (cert.valid ? "valid" : "INVALID") << "\n";
    } else {
      const auto failure = qsna::first_relevant_failure(tree);
      const qsna::ArbitrageWitness w = qsna::extract_arbitrage(tree, failure->node, *failure->witness);
      std::cout << "  NA(Q^T) fails; profit path \"" << tree.key(w.profit_path) << "\" earns "
                << qsna::pretty_rational(qsna::terminal_value(tree, w.strategy, w.profit_path)) << "\n";
    }
  }
}
