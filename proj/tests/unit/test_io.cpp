#include "doctest.h"
#include "setrisk/instances.hpp"
#include "setrisk/io.hpp"

using namespace setrisk;
using namespace setrisk::io;

namespace {

const char* kTree = R"({"d": 2, "T": 1, "nodes": [
  {"id": "0", "parent": null, "time": 0},
  {"id": "u", "parent": "0", "time": 1, "prob": "1/2"},
  {"id": "d", "parent": "0", "time": 1, "prob": "1/2"}]})";

const char* kMarket = R"({"cones": {
  "0": {"bidask": [["1", "1"], ["1", "1"]]},
  "u": {"bidask": [["1", "2"], ["1/2", "1"]]},
  "d": {"bidask": [["1", "1/2"], ["2", "1"]]}}})";

}  // namespace

TEST_CASE("rationals") {
  CHECK(rational_from(json("3/6")) == Rational(1, 2));
  CHECK(rational_from(json(-4)) == Rational(-4));
  CHECK_THROWS_AS(rational_from(json(0.5)), InputError);
  CHECK_THROWS_AS(rational_from(json("1/0")), InputError);
  CHECK(to_json(Vec{ratio(2, 4), Rational(-3)}) == json::array({"1/2", "-3"}));
}

TEST_CASE("tree and market files reproduce instance A") {
  const auto tree = tree_from(parse_json_text(kTree));
  const auto m = market_from(parse_json_text(kMarket), tree);
  const auto a = instance_a();
  const auto x = constant_claim(m.tree, {0, -1});
  CHECK(equals(risk_measure(AcceptanceSpec::market_sum(), x, m, 0),
               risk_measure(AcceptanceSpec::market_sum(), constant_claim(a.tree, {0, -1}), a, 0)));
  const auto again = tree_from(to_json(tree));
  CHECK(to_json(again) == to_json(tree));
  const auto m2 = market_from(to_json(m), again);
  for (std::size_t n = 0; n < m.tree.size(); ++n) CHECK(equals(m2.cones[n].cone.set(), m.cones[n].cone.set()));
  CHECK(to_json(m2) == to_json(m));
}

TEST_CASE("eligible spaces and bad markets") {
  const auto tree = tree_from(parse_json_text(kTree));
  auto j = parse_json_text(kMarket);
  const json basis{{"basis", json::array({json::array({"1", "0"})})}};
  j["eligible"] = {{"0", basis}};
  const auto m = market_from(j, tree);
  CHECK_FALSE(m.eligible_at(0).is_full());
  CHECK(m.eligible_at(1).is_full());
  j["eligible"] = {{"5", basis}};
  CHECK_THROWS_AS(market_from(j, tree), InputError);
  auto bad = parse_json_text(kMarket);
  bad["cones"]["u"]["bidask"] = json::array({json::array({"1", "1/2"}), json::array({"1", "1"})});
  CHECK_THROWS_AS(market_from(bad, tree), InputError);
  auto missing = parse_json_text(kMarket);
  missing["cones"].erase("d");
  CHECK_THROWS_AS(market_from(missing, tree), InputError);
  auto gens = parse_json_text(kMarket);
  gens["cones"]["u"] = json{{"rays", json::array({json::array({"1", "-1"})})}};
  CHECK_THROWS_AS(market_from(gens, tree), InputError);
}

TEST_CASE("claims and measures") {
  const auto a = instance_a();
  const auto x = claim_from(parse_json_text(R"({"claim": {"u": ["0", "1"], "d": ["0", 1]}})"), a.tree);
  CHECK(x.at(a.tree, a.tree.index_of("u")) == Vec{0, 1});
  CHECK(claim_from(claim_to_json(x, a.tree), a.tree).values == x.values);
  CHECK_THROWS_AS(claim_from(parse_json_text(R"({"claim": {"u": ["0", "1"]}})"), a.tree), InputError);
  const auto q = measure_from(
      parse_json_text(R"({"measure": {"1": {"u": "1/3", "d": "2/3"}, "2": {"u": "2/3", "d": "1/3"}}})"), a.tree);
  CHECK(measure_from(measure_to_json(q, a.tree), a.tree) == q);
  CHECK_THROWS_AS(measure_from(parse_json_text(R"({"measure": {"1": {"u": "1/3", "d": "1/3"},
      "2": {"u": "2/3", "d": "1/3"}}})"),
                               a.tree),
                  Error);
}

TEST_CASE("specs") {
  const auto a = instance_a();
  const auto c = spec_from(parse_json_text(R"({"measure": "constructive", "exchange": "solvency",
      "components": [{"kind": "avar", "level": "1/2"}, {"kind": "worst_case"}]})"),
                           a);
  CHECK(c.kind == AcceptanceSpec::Kind::Constructive);
  CHECK(c.components[0] == ScalarComponent::avar(Rational(1, 2)));
  CHECK(spec_from(to_json(c), a).name() == c.name());
  CHECK(spec_from(parse_json_text(R"({"measure": "regulator"})"), a).kind == AcceptanceSpec::Kind::Regulator);
  const auto custom = AcceptanceSpec::custom_set(Polyhedron::orthant(4));
  CHECK(equals(*spec_from(to_json(custom), a).custom, Polyhedron::orthant(4)));
  CHECK_THROWS_AS(spec_from(parse_json_text(R"({"measure": "entropic"})"), a), InputError);
  CHECK_THROWS_AS(spec_from(parse_json_text(R"({"measure": "constructive", "components": [{"kind": "worst_case"}]})"),
                            a),
                  InputError);
  CHECK_THROWS_AS(spec_from(parse_json_text(R"({"measure": "custom", "set": {"dim": 2}})"), a), InputError);
}

TEST_CASE("polyhedra round trip") {
  const auto p = Polyhedron::from_inequalities(3, {{{1, 1, 0}, 1}, {{0, 0, 1}, 0}}, {{{1, -1, 0}, 0}});
  CHECK(equals(polyhedron_from(to_json(p)), p));
  const auto v = Polyhedron::from_generators(2, {{0, 0}, {1, 2}}, {{1, 0}});
  const auto jv = to_json(v);
  CHECK(equals(polyhedron_from(jv), v));
  json gens = jv;
  gens.erase("ineqs");
  gens.erase("eqs");
  CHECK(equals(polyhedron_from(gens), v));
  CHECK(polyhedron_from(to_json(Polyhedron::empty(2))).is_empty());
  CHECK(polyhedron_from(json{{"dim", 2}}).is_whole());
  CHECK_THROWS_AS(polyhedron_from(json{{"dim", 2}, {"ineqs", {{{"a", {"1"}}, {"b", "0"}}}}}), InputError);
}

TEST_CASE("results and reports") {
  const auto a = instance_a();
  const auto r = risk_measure(AcceptanceSpec::market_sum(), constant_claim(a.tree, {0, -1}), a, 0);
  const auto j = to_json(r, a.tree);
  CHECK(j["t"] == 0);
  REQUIRE(j["nodes"].contains("0"));
  CHECK(equals(polyhedron_from(j["nodes"]["0"]), r.nodes[0]));
  CHECK(to_json(SuperhedgingPrice{1, 1, {}}) == json{{"primal", "1"}, {"dual", "1"}});
  const auto approx = approximate(json{{"node", "0"}, {"value", "1/4"}, {"list", {"3/2", "text"}}});
  CHECK(approx["node"] == "0");
  CHECK(approx["value"] == 0.25);
  CHECK(approx["list"][0] == 1.5);
  CHECK(approx["list"][1] == "text");
  CHECK(to_csv_row("u", {Rational(1, 2), Rational(1, 2)}, ExtendedValue::minus_infinity()) == "u,1/2 1/2,-inf");
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_json_text("{\n  \"d\": 2,\n  \"T\": ,\n}", "tree.json");
    FAIL("no error");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("tree.json:3:") != std::string::npos);
    CHECK(what.find("\"T\"") != std::string::npos);
  }
  CHECK_THROWS_AS(load_json("/nonexistent/file.json"), InputError);
  CHECK_THROWS_AS(tree_from(parse_json_text(R"({"d": 2, "nodes": []})")), InputError);
}
