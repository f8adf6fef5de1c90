#include "test_support.hpp"

#include <sstream>

using namespace qsna;
using namespace qsna::testing;

namespace {

std::string location_of(const std::string& text) {
  try {
    io::tree_from_json(io::parse_json_text(text));
  } catch (const ParseError& e) {
    return e.location;
  }
  return "<no error>";
}

const char* kOnePeriod = R"({"horizon": 1, "asset_dim": 1, "alphabets": [["a", "b"]],
  "prices": {"": ["0/1"], "a": ["1/1"], "b": [X]}, "priors": {"": [["1/2", "1/2"]]}})";

std::string with(const std::string& value) {
  std::string s = kOnePeriod;
  return s.replace(s.find('X'), 1, value);
}

}  // namespace

TEST(Rationals, JsonFormAlwaysHasDenominator) {
  EXPECT_EQ(io::to_json(q(3)).get<std::string>(), "3/1");
  EXPECT_EQ(io::to_json(q(-6, 4)).get<std::string>(), "-3/2");
  EXPECT_EQ(io::rational_from_json(Json("4/6"), "x"), q(2, 3));
  EXPECT_EQ(io::rational_from_json(Json("7"), "x"), q(7));
  EXPECT_THROW(io::rational_from_json(Json(0.5), "x"), ParseError);
  EXPECT_THROW(io::rational_from_json(Json("0.5"), "x"), ParseError);
  EXPECT_THROW(io::rational_from_json(Json("1e3"), "x"), ParseError);
  EXPECT_THROW(io::rational_from_json(Json(2), "x"), ParseError);
}

TEST(Trees, ParseErrorLocations) {
  EXPECT_EQ(location_of(with("\"-1/1\"")), "<no error>");
  EXPECT_EQ(location_of(with("\"0.5\"")), "/prices/b/0");
  EXPECT_EQ(location_of(with("0.5")), "/prices/b/0");
  EXPECT_EQ(location_of(with("\"1/0\"")), "/prices/b/0");
  EXPECT_EQ(location_of(R"({"asset_dim": 1})"), "");
  EXPECT_EQ(location_of(R"({"horizon": -1, "asset_dim": 1})"), "/horizon");
  EXPECT_EQ(location_of("{not json").rfind("byte ", 0), 0u);

  std::string unknown = with("\"-1/1\"");
  unknown.replace(unknown.find("\"b\": ["), 3, "\"c\"");
  EXPECT_EQ(location_of(unknown), "/prices/c");
}

TEST(Trees, ReadFileErrors) {
  EXPECT_THROW(io::read_file("/nonexistent/qsna.json"), ParseError);
}

TEST(Trees, SamplesLoadAndValidate) {
  for (const char* name : {"symmetric_two_period.json", "one_period_arbitrage.json", "polar_failure.json",
                           "multi_prior_two_assets.json"}) {
    const auto t = samples_tree(name);
    EXPECT_TRUE(validate(t).empty()) << name;
    EXPECT_EQ(io::tree_from_json(io::tree_to_json(t)), t);
  }
}

TEST(Trees, RoundTripProperty) {
  GeneratorConfig c;
  for (std::size_t i = 0; i < 100; ++i) {
    c.seed = instance_seed(61, i);
    c.force_arbitrage = i % 3 == 0;
    const auto t = gen_instance(c);
    const std::string text = io::tree_to_json(t).dump(2);
    const auto back = io::tree_from_json(io::parse_json_text(text));
    EXPECT_EQ(back, t);
    EXPECT_EQ(io::tree_to_json(back).dump(2), text);
  }
}

TEST(Witnesses, RoundTrip) {
  GeneratorConfig c;
  c.force_arbitrage = true;
  for (std::size_t i = 0; i < 50; ++i) {
    c.seed = instance_seed(62, i);
    const auto t = gen_instance(c);
    const auto f = first_relevant_failure(t);
    ASSERT_TRUE(f);
    const auto w = extract_arbitrage(t, f->node, *f->witness);
    const auto text = io::witness_to_json(t, w).dump();
    const auto back = io::witness_from_json(t, io::parse_json_text(text));
    EXPECT_EQ(back, w);
    EXPECT_TRUE(verify_witness(t, back).ok);
  }
}

TEST(Witnesses, BadFieldsReportLocations) {
  const auto t = samples_tree("one_period_arbitrage.json");
  auto expect_at = [&](const std::string& text, const std::string& where) {
    try {
      io::witness_from_json(t, io::parse_json_text(text));
      ADD_FAILURE() << "no error for " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.location, where) << text;
    }
  };
  expect_at(R"({"measure": {}, "profit_path": []})", "");
  expect_at(R"({"strategy": {"initial_capital": "0/1", "positions": {"": ["0.1"]}}, "measure": {}, "profit_path": []})",
            "/strategy/positions//0");
  expect_at(R"({"strategy": {"initial_capital": "0/1", "positions": {}}, "measure": {"zz": ["1/1"]}, "profit_path": []})",
            "/measure/zz");
  expect_at(R"({"strategy": {"initial_capital": "0/1", "positions": {}}, "measure": {}, "profit_path": ["mid"]})",
            "/profit_path/0");
}

TEST(Certificates, RoundTrip) {
  GeneratorConfig c;
  for (std::size_t i = 0; i < 60; ++i) {
    c.seed = instance_seed(63, i);
    const auto t = gen_instance(c);
    const auto cert = construct_pstar(t);
    const auto back = io::certificate_from_json(t, io::parse_json_text(io::certificate_to_json(t, cert).dump()));
    EXPECT_EQ(back, cert);
  }
}

TEST(Reports, NaReportShape) {
  const auto t = samples_tree("polar_failure.json");
  const auto j = io::na_report(t);
  EXPECT_TRUE(j["global_na"].get<bool>());
  EXPECT_EQ(j["failing_relevant_nodes"].size(), 0u);
  EXPECT_EQ(j["failing_irrelevant_nodes"], Json::array({"d"}));
  EXPECT_EQ(j["levels"].size(), 2u);
  EXPECT_EQ(j["nodes"].size(), t.non_terminal_nodes().size());
  EXPECT_EQ(io::na_report(t).dump(), j.dump());
}

TEST(Reports, RenderText) {
  Json j;
  j["a"] = true;
  j["b"] = Json::array({"1/2", "3/1"});
  j["c"]["d"] = 4;
  j["e"] = Json::array({Json{{"x", 1}}});
  std::ostringstream out;
  io::render_text(j, out);
  EXPECT_EQ(out.str(), "a: true\nb: [1/2, 3/1]\nc.d: 4\ne[0].x: 1\n");
}
