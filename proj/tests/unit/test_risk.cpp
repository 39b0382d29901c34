#include "doctest.h"
#include "setrisk/instances.hpp"
#include "setrisk/risk.hpp"
#include "setrisk/system.hpp"

using namespace setrisk;

namespace {

Rational q(long n, long d = 1) { return ratio(n, d); }

Halfspace ge(Vec a, Rational b) { return Halfspace{std::move(a), std::move(b)}; }

AdaptedVector claim(const ScenarioTree& t, const Vec& up, const Vec& down) {
  return make_adapted(t, 1, {{"u", up}, {"d", down}});
}

}  // namespace

TEST_CASE("regulator closed form") {
  const auto m = instance_a();
  const auto x = claim(m.tree, {1, 0}, {0, 1});
  const auto r = risk_measure(AcceptanceSpec::regulator(), x, m, 0);
  CHECK(equals(r.nodes[0], Polyhedron::orthant(2)));
  const auto r0 = risk_measure(AcceptanceSpec::regulator(), constant_claim(m.tree, {0, 0}), m, 0);
  CHECK(equals(r0.nodes[0], Polyhedron::orthant(2)));
  const auto y = claim(m.tree, {-1, 2}, {-3, 0});
  const auto ry = risk_measure(AcceptanceSpec::regulator(), y, m, 0);
  CHECK(equals(ry.nodes[0], translate(Polyhedron::orthant(2), {3, 0})));
  CHECK(equals(ry, primal_risk(AcceptanceSpec::regulator(), y, m, 0)));
}

TEST_CASE("market sum on the frictionless one-period market is a halfspace") {
  const auto m = instance_a();
  const auto x = constant_claim(m.tree, {0, -1});
  const auto r = risk_measure(AcceptanceSpec::market_sum(), x, m, 0);
  CHECK(equals(r.nodes[0], Polyhedron::from_inequalities(2, {ge({1, 1}, 1)})));
  CHECK(r.nodes[0].contains({1, 0}));
  CHECK(r.nodes[0].contains({0, 1}));
  CHECK_FALSE(r.nodes[0].contains({q(1, 2), q(1, 4)}));
  CHECK(equals(r, primal_risk(AcceptanceSpec::market_sum(), x, m, 0)));
  // At the leaves the price is the spot price.
  const auto r1 = risk_measure(AcceptanceSpec::market_sum(), x, m, 1);
  CHECK(equals(r1.at(m.tree, m.tree.index_of("u")), Polyhedron::from_inequalities(2, {ge({1, 2}, 2)})));
}

TEST_CASE("acceptability of a hedged claim") {
  const auto m = instance_a();
  const auto mk = [&](const Rational& price) { return constant_claim(m.tree, {price, -1}); };
  CHECK(is_acceptable(AcceptanceSpec::market_sum(), mk(1), m, 0));
  CHECK(is_acceptable(AcceptanceSpec::market_sum(), mk(q(3, 2)), m, 0));
  CHECK_FALSE(is_acceptable(AcceptanceSpec::market_sum(), mk(q(99, 100)), m, 0));
  CHECK(is_acceptable(AcceptanceSpec::regulator(), constant_claim(m.tree, {0, 0}), m, 0));
  CHECK_FALSE(is_acceptable(AcceptanceSpec::regulator(), constant_claim(m.tree, {-1, -1}), m, 0));
  CHECK_FALSE(is_acceptable(AcceptanceSpec::market_sum(), constant_claim(m.tree, {-1, -1}), m, 0));
}

TEST_CASE("lp oracle agrees with membership") {
  const auto m = instance_b();
  const auto x = claim(m.tree, {1, -2}, {-1, 1});
  const auto r = risk_measure(AcceptanceSpec::market_sum(), x, m, 0);
  for (const Vec& u : std::vector<Vec>{{0, 0}, {2, 0}, {0, 2}, {1, 1}, {3, -1}, {q(1, 2), q(1, 2)}, {-1, 4}}) {
    CHECK(r.nodes[0].contains(u) == accepts(AcceptanceSpec::market_sum(), x, constant_adapted(m.tree, 0, u), m, 0));
  }
}

TEST_CASE("transaction costs sit between frictionless and no trade") {
  const auto x = constant_claim(instance_b().tree, {0, -1});
  const auto b = risk_measure(AcceptanceSpec::market_sum(), x, instance_b(), 0);
  const auto a = risk_measure(AcceptanceSpec::market_sum(), x, instance_a(), 0);
  const auto reg = risk_measure(AcceptanceSpec::regulator(), x, instance_b(), 0);
  CHECK(contains_set(a, b));
  CHECK(contains_set(b, reg));
  CHECK_FALSE(equals(a, b));
  CHECK(equals(market_extension(AcceptanceSpec::regulator(), x, instance_b(), 0), b));
}

TEST_CASE("stepped evaluators") {
  const auto m = instance_a();
  const auto reg = stepped_risk(AcceptanceSpec::regulator(), m, 0);
  const auto orth = Polyhedron::orthant(2);
  CHECK(equals(reg(0, {orth, orth}), orth));
  const auto v = reg(0, {translate(orth, {1, -2}), translate(orth, {-1, 3})});
  CHECK(equals(v, translate(orth, {1, 3})));
  const auto mk = stepped_risk(AcceptanceSpec::market_sum(), m, 0);
  const auto x = constant_claim(m.tree, {0, -1});
  const auto term = terminal_risk(AcceptanceSpec::market_sum(), x, m);
  CHECK(equals(mk(0, term.nodes), risk_measure(AcceptanceSpec::market_sum(), x, m, 0).nodes[0]));
}

TEST_CASE("composition on the two-period tree") {
  const auto m = instance_c();
  const auto x = make_adapted(m.tree, 2, {{"uu", {1, -1}}, {"ud", {0, 2}}, {"du", {-1, 0}}, {"dd", {2, -3}}});
  for (const auto& spec : {AcceptanceSpec::market_sum(), AcceptanceSpec::regulator()}) {
    const auto family = compose_mptc(spec, x, m);
    REQUIRE(family.size() == 3);
    for (int t = 0; t <= 2; ++t) {
      CHECK(equals(family[static_cast<std::size_t>(t)], risk_measure(spec, x, m, t)));
      CHECK(equals(family[static_cast<std::size_t>(t)], primal_risk(spec, x, m, t)));
    }
  }
}

TEST_CASE("k-compatible closure") {
  const auto m = instance_a();
  const auto x = claim(m.tree, {1, -1}, {-2, 1});
  const auto base = risk_measure(AcceptanceSpec::regulator(), x, m, 0);
  const ConeField none(m.tree.size());
  CHECK(equals(k_compatible_closure(AcceptanceSpec::regulator(), x, m, none, 0), base));
  ConeField orthants(m.tree.size(), Cone::from_inequalities(2, {unit(2, 0), unit(2, 1)}));
  CHECK(equals(k_compatible_closure(AcceptanceSpec::regulator(), x, m, orthants, 0), base));
  const auto sum = risk_measure(AcceptanceSpec::market_sum(), x, m, 0);
  CHECK(equals(k_compatible_closure(AcceptanceSpec::regulator(), x, m, solvency_field(m), 0), sum));
  CHECK(equals(k_compatible_closure(AcceptanceSpec::market_sum(), x, m, solvency_field(m), 0), sum));
}

TEST_CASE("constructive measures") {
  const auto m = instance_a();
  const auto x = claim(m.tree, {1, -1}, {-2, 3});
  const std::vector<ScalarComponent> wc{ScalarComponent::worst_case(), ScalarComponent::worst_case()};
  const auto none = constructive_risk(wc, Exchange::None, x, m);
  CHECK(equals(none.nodes[0], translate(Polyhedron::orthant(2), {2, 1})));
  CHECK(equals(none, risk_measure(AcceptanceSpec::regulator(), x, m, 0)));
  const std::vector<ScalarComponent> avar1{ScalarComponent::avar(1), ScalarComponent::avar(1)};
  CHECK(equals(constructive_risk(avar1, Exchange::Solvency, x, m), constructive_risk(wc, Exchange::Solvency, x, m)));
  // Exchanging at T then taking worst cases equals the regulator closed under terminal trades.
  CHECK(equals(constructive_risk(wc, Exchange::Solvency, x, m),
               k_compatible_closure(AcceptanceSpec::regulator(), x, m, terminal_solvency_field(m), 0)));

  const auto d = instance_d();
  const auto y = claim(d.tree, {0, 0}, {3, 0});
  const std::vector<ScalarComponent> tail{ScalarComponent::avar(q(1, 2)), ScalarComponent::worst_case()};
  const auto r = constructive_risk(tail, Exchange::None, y, d);
  // P(u) = 1/3: the cap 2 fills u and leaves density 1/2 on d, so -(3 * 1/3) = -1.
  CHECK(equals(r.nodes[0], translate(Polyhedron::orthant(2), {-1, 0})));
  CHECK(evaluate_component(tail[0], {0, 3}, {q(1, 3), q(2, 3)}) == -1);
  CHECK(evaluate_component(ScalarComponent::worst_case(), {0, 3}, {q(1, 3), q(2, 3)}) == 0);
}

TEST_CASE("avar densities") {
  const auto v = avar_densities({q(1, 3), q(2, 3)}, q(1, 2));
  CHECK(v.size() == 2);
  CHECK_THROWS_AS(avar_densities({q(1, 2), q(1, 2)}, 1), Error);
  CHECK_THROWS_AS(ScalarComponent::avar(0), InputError);
}

TEST_CASE("custom acceptance set") {
  const auto m = instance_a();
  // Leaf-major coordinates (u1, u2, d1, d2): accept when the sum of asset 1 is nonnegative and asset 2 is too.
  const auto a = Polyhedron::from_inequalities(4, {ge({1, 0, 1, 0}, 0), ge({0, 1, 0, 0}, 0), ge({0, 0, 0, 1}, 0)});
  const auto spec = AcceptanceSpec::custom_set(a);
  CHECK(spec.conical());
  const auto x = claim(m.tree, {1, -1}, {-3, 2});
  const auto r = risk_measure(spec, x, m, 0);
  CHECK(equals(r.nodes[0], translate(Polyhedron::orthant(2), {1, 1})));
  CHECK(equals(r, primal_risk(spec, x, m, 0)));
  const auto r1 = risk_measure(spec, x, m, 1);
  CHECK(r1.nodes.size() == 2);
}

TEST_CASE("flags for degenerate values") {
  const auto m = instance_a();
  const auto spec = AcceptanceSpec::custom_set(Polyhedron::empty(4));
  const auto r = risk_measure(spec, constant_claim(m.tree, {0, 0}), m, 0);
  CHECK(r.nodes[0].is_empty());
  CHECK_FALSE(r.flags.empty());
  const auto all = AcceptanceSpec::custom_set(Polyhedron::whole(4));
  const auto w = risk_measure(all, constant_claim(m.tree, {0, 0}), m, 0);
  CHECK(w.nodes[0].is_whole());
  CHECK_FALSE(w.flags.empty());
}

TEST_CASE("eligible assets restrict the value") {
  const auto a = instance_a();
  const MarketModel m = a.with_eligible({EligibleSpace::first(2, 1), EligibleSpace::first(2, 1)});
  const auto x = constant_claim(m.tree, {0, -1});
  const auto r = risk_measure(AcceptanceSpec::market_sum(), x, m, 0);
  CHECK(r.nodes[0].contains({1, 0}));
  CHECK_FALSE(r.nodes[0].contains({q(1, 2), 0}));
  CHECK_FALSE(r.nodes[0].contains({1, 1}));
}
