#pragma once

// JSON encoding of instances, witnesses, certificates and verdict reports.
// Rationals are always "numerator/denominator" strings; node keys are
// "/"-joined labels with the root as "".

#include "qsna/priors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace qsna {

using Json = nlohmann::ordered_json;

namespace io {

inline Json to_json(const Rational& r) { return format_rational(r); }

inline Json to_json(const Vec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(format_rational(x));
  return a;
}

inline Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_float()) throw ParseError(where, "floats rejected");
  if (!j.is_string()) throw ParseError(where, "expected a rational string \"p/q\"");
  return parse_rational(j.get<std::string>(), where);
}

inline Vec vec_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of rationals");
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(rational_from_json(j[i], where + "/" + std::to_string(i)));
  return v;
}

inline const Json& require(const Json& j, const char* field, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find(field);
  if (it == j.end()) throw ParseError(where, std::string("missing field \"") + field + "\"");
  return *it;
}

inline std::size_t size_from_json(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ParseError(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline Prefix key_from_json(const ScenarioTree& tree, const std::string& key, const std::string& where) {
  try {
    return tree.parse_key(key);
  } catch (const LookupError& e) {
    throw ParseError(where, e.what());
  }
}

inline Json path_to_json(const ScenarioTree& tree, const Path& path) {
  Json a = Json::array();
  for (std::size_t s = 0; s < path.size(); ++s) a.push_back(tree.alphabets.at(s).at(path[s]));
  return a;
}

inline Path path_from_json(const ScenarioTree& tree, const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of labels");
  Path p;
  for (std::size_t s = 0; s < j.size(); ++s) {
    if (!j[s].is_string()) throw ParseError(where + "/" + std::to_string(s), "expected a label string");
    if (s >= tree.alphabets.size()) throw ParseError(where, "path longer than the horizon");
    const auto& alpha = tree.alphabets[s];
    auto it = std::find(alpha.begin(), alpha.end(), j[s].get<std::string>());
    if (it == alpha.end()) throw ParseError(where + "/" + std::to_string(s), "unknown label");
    p.push_back(static_cast<Label>(it - alpha.begin()));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Instances

inline Json tree_to_json(const ScenarioTree& tree) {
  Json j;
  j["horizon"] = tree.horizon;
  j["asset_dim"] = tree.asset_dim;
  j["alphabets"] = tree.alphabets;
  Json prices = Json::object();
  for (std::size_t t = 0; t <= tree.horizon; ++t)
    for (const auto& node : tree.nodes_at(t)) {
      auto it = tree.prices.find(node);
      if (it != tree.prices.end()) prices[tree.key(node)] = to_json(it->second);
    }
  j["prices"] = std::move(prices);
  Json priors = Json::object();
  for (const auto& node : tree.non_terminal_nodes()) {
    auto it = tree.priors.find(node);
    if (it == tree.priors.end()) continue;
    Json gens = Json::array();
    for (const auto& g : it->second) gens.push_back(to_json(g.weights));
    priors[tree.key(node)] = std::move(gens);
  }
  j["priors"] = std::move(priors);
  return j;
}

inline ScenarioTree tree_from_json(const Json& j) {
  ScenarioTree tree;
  tree.horizon = size_from_json(require(j, "horizon", ""), "/horizon");
  tree.asset_dim = size_from_json(require(j, "asset_dim", ""), "/asset_dim");
  const Json& alphabets = require(j, "alphabets", "");
  if (!alphabets.is_array()) throw ParseError("/alphabets", "expected an array of label arrays");
  for (std::size_t t = 0; t < alphabets.size(); ++t) {
    const std::string where = "/alphabets/" + std::to_string(t);
    if (!alphabets[t].is_array()) throw ParseError(where, "expected an array of labels");
    std::vector<std::string> labels;
    for (const auto& l : alphabets[t]) {
      if (!l.is_string()) throw ParseError(where, "labels must be strings");
      labels.push_back(l.get<std::string>());
    }
    tree.alphabets.push_back(std::move(labels));
  }
  const Json& prices = require(j, "prices", "");
  if (!prices.is_object()) throw ParseError("/prices", "expected an object keyed by node");
  for (const auto& [key, value] : prices.items()) {
    const std::string where = "/prices/" + key;
    tree.prices[key_from_json(tree, key, where)] = vec_from_json(value, where);
  }
  const Json& priors = require(j, "priors", "");
  if (!priors.is_object()) throw ParseError("/priors", "expected an object keyed by node");
  for (const auto& [key, value] : priors.items()) {
    const std::string where = "/priors/" + key;
    if (!value.is_array()) throw ParseError(where, "expected an array of generators");
    std::vector<ProbVector> gens;
    for (std::size_t g = 0; g < value.size(); ++g)
      gens.push_back({vec_from_json(value[g], where + "/" + std::to_string(g))});
    tree.priors[key_from_json(tree, key, where)] = std::move(gens);
  }
  return tree;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "invalid JSON");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ParseError(path, "cannot read file");
  return ss.str();
}

inline ScenarioTree load_tree(const std::string& path) { return tree_from_json(parse_json_text(read_file(path))); }

// ---------------------------------------------------------------------------
// Kernels, strategies, witnesses

inline Json kernels_to_json(const ScenarioTree& tree, const KernelSelection& k) {
  Json j = Json::object();
  for (const auto& node : tree.non_terminal_nodes()) {
    auto it = k.weights.find(node);
    if (it != k.weights.end()) j[tree.key(node)] = to_json(it->second);
  }
  return j;
}

inline KernelSelection kernels_from_json(const ScenarioTree& tree, const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, "expected an object keyed by node");
  KernelSelection k;
  for (const auto& [key, value] : j.items())
    k.weights[key_from_json(tree, key, where + "/" + key)] = vec_from_json(value, where + "/" + key);
  return k;
}

inline Json strategy_to_json(const ScenarioTree& tree, const Strategy& s) {
  Json j;
  j["initial_capital"] = to_json(s.initial_capital);
  Json pos = Json::object();
  for (const auto& node : tree.non_terminal_nodes()) {
    auto it = s.positions.find(node);
    if (it != s.positions.end()) pos[tree.key(node)] = to_json(it->second);
  }
  j["positions"] = std::move(pos);
  return j;
}

inline Strategy strategy_from_json(const ScenarioTree& tree, const Json& j, const std::string& where) {
  Strategy s;
  s.initial_capital = rational_from_json(require(j, "initial_capital", where), where + "/initial_capital");
  const Json& pos = require(j, "positions", where);
  if (!pos.is_object()) throw ParseError(where + "/positions", "expected an object keyed by node");
  for (const auto& [key, value] : pos.items())
    s.positions[key_from_json(tree, key, where + "/positions/" + key)] = vec_from_json(value, where + "/positions/" + key);
  return s;
}

inline Json witness_to_json(const ScenarioTree& tree, const ArbitrageWitness& w) {
  Json j;
  j["strategy"] = strategy_to_json(tree, w.strategy);
  j["measure"] = kernels_to_json(tree, w.measure);
  j["profit_path"] = path_to_json(tree, w.profit_path);
  return j;
}

inline ArbitrageWitness witness_from_json(const ScenarioTree& tree, const Json& j) {
  ArbitrageWitness w;
  w.strategy = strategy_from_json(tree, require(j, "strategy", ""), "/strategy");
  w.measure = kernels_from_json(tree, require(j, "measure", ""), "/measure");
  w.profit_path = path_from_json(tree, require(j, "profit_path", ""), "/profit_path");
  return w;
}

// ---------------------------------------------------------------------------
// Reports

inline Json points_to_json(const PointSet& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

inline Json local_verdict_to_json(const ScenarioTree& tree, const LocalVerdict& v) {
  Json j;
  j["node"] = tree.key(v.node);
  j["relevant"] = is_relevant_path(tree, v.node);
  j["holds"] = v.holds;
  j["support"] = points_to_json(v.support);
  if (v.witness) j["witness"] = to_json(*v.witness);
  if (v.certificate) j["certificate"] = to_json(*v.certificate);
  return j;
}

inline Json keys_to_json(const ScenarioTree& tree, const std::vector<Prefix>& nodes) {
  Json a = Json::array();
  for (const auto& n : nodes) a.push_back(tree.key(n));
  return a;
}

/// Per-node verdicts, per-level Ω_NA summaries, and the global verdict.
inline Json na_report(const ScenarioTree& tree) {
  Json j;
  Json nodes = Json::array();
  for (const auto& node : tree.non_terminal_nodes()) nodes.push_back(local_verdict_to_json(tree, local_na(tree, node)));
  Json levels = Json::array();
  std::vector<Prefix> failing_relevant, failing_irrelevant;
  for (std::size_t t = 0; t < tree.horizon; ++t) {
    const LevelReport r = omega_na(tree, t);
    Json l;
    l["level"] = t;
    l["omega_na"] = keys_to_json(tree, r.holding);
    l["complement_polar"] = r.complement_polar;
    levels.push_back(std::move(l));
    failing_relevant.insert(failing_relevant.end(), r.failing_relevant.begin(), r.failing_relevant.end());
    failing_irrelevant.insert(failing_irrelevant.end(), r.failing_irrelevant.begin(), r.failing_irrelevant.end());
  }
  j["global_na"] = failing_relevant.empty();
  j["failing_relevant_nodes"] = keys_to_json(tree, failing_relevant);
  j["failing_irrelevant_nodes"] = keys_to_json(tree, failing_irrelevant);
  j["levels"] = std::move(levels);
  j["nodes"] = std::move(nodes);
  return j;
}

inline Json certificate_to_json(const ScenarioTree& tree, const PStarCertificate& c) {
  Json j;
  j["valid"] = c.valid;
  j["failing_nodes"] = keys_to_json(tree, c.failing_nodes());
  j["kernels"] = kernels_to_json(tree, c.kernels);
  Json checks = Json::array();
  for (const auto& ch : c.checks) {
    Json e;
    e["node"] = tree.key(ch.node);
    e["aff_match"] = ch.aff_match;
    e["ri_zero"] = ch.ri_zero;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

inline PStarCertificate certificate_from_json(const ScenarioTree& tree, const Json& j) {
  PStarCertificate c;
  const Json& valid = require(j, "valid", "");
  if (!valid.is_boolean()) throw ParseError("/valid", "expected a boolean");
  c.valid = valid.get<bool>();
  c.kernels = kernels_from_json(tree, require(j, "kernels", ""), "/kernels");
  const Json& checks = require(j, "checks", "");
  if (!checks.is_array()) throw ParseError("/checks", "expected an array");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string where = "/checks/" + std::to_string(i);
    const Json& node = require(checks[i], "node", where);
    if (!node.is_string()) throw ParseError(where + "/node", "expected a node key");
    const Json& am = require(checks[i], "aff_match", where);
    const Json& rz = require(checks[i], "ri_zero", where);
    if (!am.is_boolean() || !rz.is_boolean()) throw ParseError(where, "expected boolean checks");
    c.checks.push_back({key_from_json(tree, node.get<std::string>(), where + "/node"), am.get<bool>(), rz.get<bool>()});
  }
  return c;
}

inline Json class_sample_to_json(const ScenarioTree& tree, const ClassSample& s) {
  Json j;
  j["levels"] = to_json(s.levels);
  j["q"] = kernels_to_json(tree, s.q);
  j["member"] = kernels_to_json(tree, s.member);
  return j;
}

/// Flattens a JSON document into "path: value" lines.
inline void render_text(const Json& j, std::ostream& out, const std::string& prefix = "") {
  if (j.is_object()) {
    if (j.empty()) out << prefix << ": {}\n";
    for (const auto& [k, v] : j.items()) render_text(v, out, prefix.empty() ? k : prefix + "." + (k.empty() ? "<root>" : k));
  } else if (j.is_array()) {
    bool scalar = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (scalar) {
      out << prefix << ": [";
      for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ", " : "") << (j[i].is_string() ? j[i].get<std::string>() : j[i].dump());
      out << "]\n";
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], out, prefix + "[" + std::to_string(i) + "]");
    }
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace io
}  // namespace qsna
