#include "setrisk/instances.hpp"

namespace setrisk {

ScenarioTree one_period_tree(const Rational& p_up, std::size_t d) {
  return ScenarioTree::build(d, 1, {{"0", "", 0, 1}, {"u", "0", 1, p_up}, {"d", "0", 1, 1 - p_up}});
}

ScenarioTree binary_tree(int horizon, std::size_t d) {
  std::vector<ScenarioTree::NodeSpec> specs{{"0", "", 0, 1}};
  std::vector<std::string> level{""};
  for (int t = 1; t <= horizon; ++t) {
    std::vector<std::string> next;
    for (const auto& path : level) {
      for (const char step : {'u', 'd'}) {
        const std::string id = path + step;
        specs.push_back({id, path.empty() ? "0" : path, t, Rational(1, 2)});
        next.push_back(id);
      }
    }
    level = std::move(next);
  }
  return ScenarioTree::build(d, horizon, specs);
}

SolvencyCone frictionless_cone(const Rational& s) { return solvency_cone({{1, s}, {1 / s, 1}}); }

SolvencyCone bid_ask_cone(const Rational& a, const Rational& b) { return solvency_cone({{1, a}, {b, 1}}); }

Rational binomial_price(const std::string& id) {
  Rational s = 1;
  if (id == "0") return s;
  for (const char c : id) s *= c == 'u' ? Rational(2) : Rational(1, 2);
  return s;
}

namespace {

MarketModel frictionless(ScenarioTree tree) {
  std::vector<SolvencyCone> cones;
  for (const auto& n : tree.nodes()) cones.push_back(frictionless_cone(binomial_price(n.id)));
  std::vector<EligibleSpace> eligible(static_cast<std::size_t>(tree.horizon()) + 1, EligibleSpace::full(2));
  return MarketModel(std::move(tree), std::move(cones), std::move(eligible));
}

}  // namespace

MarketModel instance_a() { return frictionless(one_period_tree()); }

MarketModel instance_b() {
  ScenarioTree tree = one_period_tree();
  std::vector<SolvencyCone> cones;
  for (const auto& n : tree.nodes()) {
    if (n.id == "0") cones.push_back(bid_ask_cone(Rational(6, 5), 1));
    if (n.id == "u") cones.push_back(bid_ask_cone(Rational(11, 5), Rational(5, 9)));
    if (n.id == "d") cones.push_back(bid_ask_cone(Rational(11, 20), Rational(20, 9)));
  }
  std::vector<EligibleSpace> eligible(2, EligibleSpace::full(2));
  return MarketModel(std::move(tree), std::move(cones), std::move(eligible));
}

MarketModel instance_c() { return frictionless(binary_tree(2)); }

MarketModel instance_d() { return frictionless(one_period_tree(Rational(1, 3))); }

AdaptedVector constant_claim(const ScenarioTree& tree, const Vec& v) {
  return constant_adapted(tree, tree.horizon(), v);
}

}  // namespace setrisk
