#include "doctest.h"
#include "setrisk/duality.hpp"
#include "setrisk/instances.hpp"
#include "setrisk/scalarization.hpp"

using namespace setrisk;

namespace {

Rational q(long n, long d = 1) { return ratio(n, d); }

Halfspace ge(Vec a, Rational b) { return Halfspace{std::move(a), std::move(b)}; }

AdaptedVector claim(const ScenarioTree& t, const Vec& up, const Vec& down) {
  return make_adapted(t, 1, {{"u", up}, {"d", down}});
}

}  // namespace

TEST_CASE("scalarizing simple sets") {
  CHECK(scalarize(Polyhedron::orthant(2), {1, 1}) == ExtendedValue::finite(0));
  const auto h = Polyhedron::from_inequalities(2, {ge({1, 1}, 1)});
  CHECK(scalarize(h, {1, 1}) == ExtendedValue::finite(1));
  CHECK(scalarize(h, {1, 0}) == ExtendedValue::minus_infinity());
  CHECK(scalarize(Polyhedron::empty(2), {1, 1}) == ExtendedValue::plus_infinity());
  CHECK(to_string(ExtendedValue::minus_infinity()) == "-inf");
}

TEST_CASE("scalar risk matches the polyhedron") {
  for (const auto& m : {instance_a(), instance_b()}) {
    const auto x = claim(m.tree, {1, -2}, {-1, 1});
    for (const auto& spec : {AcceptanceSpec::market_sum(), AcceptanceSpec::regulator()}) {
      const auto r = risk_measure(spec, x, m, 0);
      for (const Vec& w : std::vector<Vec>{{1, 0}, {0, 1}, {1, 1}, {1, 3}, {3, 1}}) {
        CHECK(scalar_risk(spec, x, w, m, 0)[0] == scalarize(r.nodes[0], w));
      }
      // Translativity.
      const Vec shift{q(1, 3), -2};
      const auto moved = add_lifted(m.tree, x, constant_adapted(m.tree, 0, shift));
      // A weight inside the dual cone of the market: price 1 without costs, 9/8 with.
      const Vec w = m.frictionless_somewhere() ? Vec{1, 1} : Vec{8, 9};
      const auto a = scalar_risk(spec, x, w, m, 0)[0];
      const auto b = scalar_risk(spec, moved, w, m, 0)[0];
      REQUIRE(a.is_finite());
      CHECK(b.value == a.value - dot(w, shift));
    }
  }
  CHECK_THROWS_AS(scalar_risk(AcceptanceSpec::regulator(), constant_claim(instance_a().tree, {0, 0}), {-1, 1},
                              instance_a(), 0),
                  InputError);
}

TEST_CASE("reconstruction from facet normals") {
  const auto m = instance_b();
  const auto x = claim(m.tree, {1, -2}, {-1, 1});
  const auto spec = AcceptanceSpec::market_sum();
  const auto r = risk_measure(spec, x, m, 0);
  const auto normals = facet_normals(r);
  REQUIRE(normals.size() >= 2);
  const auto full = reconstruct(spec, x, m, 0, normals);
  CHECK(full.exact);
  CHECK(equals(full.result, r));
  const auto partial = reconstruct(spec, x, m, 0, {normals[0]});
  CHECK_FALSE(partial.exact);
  REQUIRE(partial.witness);
  CHECK(partial.result.nodes[0].contains(*partial.witness));
  CHECK_FALSE(r.nodes[0].contains(*partial.witness));

  const auto orth = reconstruct(AcceptanceSpec::regulator(), constant_claim(m.tree, {0, 0}), m, 0, {{1, 1}});
  CHECK_FALSE(orth.exact);
  CHECK(contains_set(orth.result.nodes[0], Polyhedron::orthant(2)));
}

TEST_CASE("simplex grid and weights") {
  CHECK(simplex_grid(4).size() == 5);
  CHECK(to_string(simplex_grid(4)[2][0]) == "1/2");
  CHECK(to_string(simplex_grid(4)[0][0]) == "0");
  CHECK(normalize_weight({2, 6}) == Vec{q(1, 4), q(3, 4)});
  CHECK_THROWS_AS(normalize_weight({0, 0}), InputError);
}

TEST_CASE("superhedging prices") {
  const auto a = instance_a();
  const auto one = constant_claim(a.tree, {0, 1});
  const auto pa = superhedging_price(one, 0, a);
  CHECK(pa.primal == 1);
  CHECK(pa.dual == 1);
  CHECK(superhedging_price(constant_claim(a.tree, {0, 0}), 0, a).primal == 0);

  const auto b = instance_b();
  const auto pb = superhedging_price(one, 0, b);
  CHECK(pb.primal >= 1);
  CHECK(pb.primal <= q(6, 5));
  CHECK(pb.primal == pb.dual);

  auto tree = one_period_tree();
  const MarketModel arb(tree, {frictionless_cone(1), frictionless_cone(2), frictionless_cone(3)},
                        {EligibleSpace::full(2), EligibleSpace::full(2)});
  CHECK_THROWS_AS(superhedging_price(one, 0, arb), InfeasibleModelError);
}

TEST_CASE("dual set of the frictionless market") {
  const auto m = instance_a();
  const auto duals = max_dual_set(AcceptanceSpec::market_sum(), m);
  REQUIRE(duals.members.size() == 1);
  const auto& v = duals.members[0];
  const Vec w = normalize_weight(v.w);
  CHECK(w == Vec{q(1, 2), q(1, 2)});
  CHECK(v.q.weights[0][m.tree.node(m.tree.index_of("u")).position] == q(1, 3));
  CHECK(v.q.weights[1][m.tree.node(m.tree.index_of("u")).position] == q(2, 3));
  CHECK(product_density(m.tree, v.q, v.w) == v.z);

  const auto reg = max_dual_set(AcceptanceSpec::regulator(), m);
  CHECK(reg.members.size() == 4);
  CHECK_THROWS_AS(
      max_dual_set(AcceptanceSpec::constructive({ScalarComponent::worst_case(), ScalarComponent::worst_case()},
                                                Exchange::None),
                   m),
      InputError);
}

TEST_CASE("dual representation equals the primal value") {
  for (const auto& m : {instance_a(), instance_b()}) {
    for (const auto& spec : {AcceptanceSpec::market_sum(), AcceptanceSpec::regulator()}) {
      const auto duals = max_dual_set(spec, m);
      for (const auto& x : {claim(m.tree, {1, -2}, {-1, 1}), claim(m.tree, {q(1, 3), 0}, {-5, q(7, 2)})}) {
        CHECK(equals(evaluate_dual(duals, x, m), risk_measure(spec, x, m, 0)));
      }
      const auto at_zero = evaluate_dual(duals, constant_claim(m.tree, {0, 0}), m);
      CHECK(at_zero.nodes[0].is_cone());
      CHECK(contains_set(at_zero.nodes[0], Polyhedron::orthant(2)));
    }
  }
}

TEST_CASE("penalty functions") {
  const auto m = instance_a();
  const auto spec = AcceptanceSpec::market_sum();
  const auto duals = max_dual_set(spec, m);
  const auto& v = duals.members[0];
  const auto gamma = Polyhedron::from_inequalities(2, {ge(v.w, 0)});
  CHECK(equals(penalty(spec, v.q, v.w, m), gamma));
  // Physical measure is not a pricing measure: the penalty is everything.
  CHECK(penalty(spec, VectorMeasure::physical(m.tree), {1, 1}, m).is_whole());
  // A translated cone shifts the penalty by the expectation of the shift.
  const auto a = acceptance_set(spec, m, m.tree.root());
  const Vec c{1, 0, 1, 0};
  const auto shifted = penalty(translate(a, c), v.q, v.w, m);
  CHECK(equals(shifted, translate(gamma, {1, 0})));
}

TEST_CASE("dual stability") {
  const auto c = instance_c();
  for (const auto& [t, s] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}}) {
    const auto rep = check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::market_sum(), c, t, s);
    CHECK(rep.holds);
    for (const auto& n : rep.nodes) CHECK(n.pastings_checked > 0);
  }
  const auto one = check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::market_sum(), instance_b(), 0, 1);
  CHECK(one.holds);
  const auto hybrid = check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::regulator(), c, 0, 1);
  CHECK_FALSE(hybrid.holds);
  bool witnessed = false;
  for (const auto& n : hybrid.nodes) witnessed = witnessed || n.witness_z.has_value();
  CHECK(witnessed);
  const MarketModel bad = c.with_eligible({EligibleSpace(2, {{1, 1}}), EligibleSpace::full(2), EligibleSpace::full(2)});
  CHECK_THROWS_AS(check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::market_sum(), bad, 0, 1),
                  InputError);
}
