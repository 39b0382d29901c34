#include <random>

#include "doctest.h"
#include "setrisk/lp.hpp"
#include "setrisk/polyhedron.hpp"

using namespace setrisk;

namespace {

Rational q(long n, long d = 1) { return ratio(n, d); }

Halfspace ge(Vec a, Rational b) { return Halfspace{std::move(a), std::move(b)}; }

}  // namespace

TEST_CASE("unit square round trip") {
  const auto sq = Polyhedron::from_inequalities(
      2, {ge({1, 0}, 0), ge({0, 1}, 0), ge({-1, 0}, -1), ge({0, -1}, -1), ge({1, 1}, -5)});
  CHECK(sq.vertices().size() == 4);
  CHECK(sq.inequalities().size() == 4);
  CHECK(sq.is_bounded());
  CHECK(sq.contains({q(1, 2), q(1, 3)}));
  CHECK_FALSE(sq.contains({q(3, 2), 0}));
  const auto again = Polyhedron::from_generators(2, sq.vertices(), {});
  CHECK(equals(sq, again));
}

TEST_CASE("empty and whole are values") {
  const auto e = Polyhedron::from_inequalities(1, {ge({1}, 1), ge({-1}, 0)});
  CHECK(e.is_empty());
  CHECK_FALSE(e.contains({0}));
  CHECK(Polyhedron::whole(3).is_whole());
  CHECK(minkowski_sum(e, Polyhedron::whole(1)).is_empty());
  CHECK(intersect(e, Polyhedron::whole(1)).is_empty());
  CHECK(equals(e, Polyhedron::empty(1)));
  CHECK(contains_set(Polyhedron::whole(1), e));
  CHECK_FALSE(contains_set(e, Polyhedron::whole(1)));
}

TEST_CASE("halfplane keeps its line") {
  const auto h = Polyhedron::from_inequalities(2, {ge({1, 1}, 1)});
  CHECK(h.lines().size() == 1);
  CHECK(h.rays().size() == 1);
  CHECK(h.vertices().size() == 1);
  CHECK(h.inequalities().size() == 1);
  CHECK(h.recedes({1, -1}));
  CHECK(h.recedes({-1, 1}));
  CHECK_FALSE(h.recedes({-1, 0}));
}

TEST_CASE("equations survive conversion") {
  const auto line = Polyhedron::from_inequalities(3, {ge({1, 0, 0}, 0)}, {ge({0, 1, 0}, 2), ge({0, 0, 1}, -1)});
  CHECK(line.equations().size() == 2);
  CHECK(line.contains({5, 2, -1}));
  CHECK_FALSE(line.contains({5, 2, 0}));
  CHECK(line.rays().size() == 1);
}

TEST_CASE("minkowski sum of segments is a parallelogram") {
  const auto a = Polyhedron::from_generators(2, {{0, 0}, {1, 0}}, {});
  const auto b = Polyhedron::from_generators(2, {{0, 0}, {1, 1}}, {});
  const auto s = minkowski_sum(a, b);
  CHECK(s.vertices().size() == 4);
  CHECK(s.contains({1, q(1, 2)}));
  CHECK_FALSE(s.contains({0, 1}));
}

TEST_CASE("dual of a two dimensional cone") {
  const Cone k = Cone::from_generators(2, {{6, -5}, {-1, 1}});
  const Cone d = dual_cone(k);
  CHECK(d.rays().size() == 2);
  CHECK(d.contains({1, 1}));
  CHECK(d.contains({5, 6}));
  CHECK_FALSE(d.contains({1, 0}));
  CHECK(equals(dual_cone(d), k));
}

TEST_CASE("projection routes agree") {
  // A simplex in 3d projected to the first two coordinates.
  const auto p = Polyhedron::from_inequalities(
      3, {ge({1, 0, 0}, 0), ge({0, 1, 0}, 0), ge({0, 0, 1}, 0), ge({-1, -1, -1}, -1), ge({1, -1, 2}, -1)});
  const auto fm = project(p, {0, 1});
  const auto gen = project_generators(p, {0, 1});
  CHECK(equals(fm, gen));
  const auto fm_rev = project(p, {2, 0});
  CHECK(equals(fm_rev, project_generators(p, {2, 0})));
}

TEST_CASE("projection with equalities and unbounded directions") {
  LinearSystem s;
  s.num_vars = 3;
  s.ineqs = {ge({1, 0, -1}, 0), ge({0, 1, -1}, 0)};
  s.eqs = {ge({0, 0, 1}, 2)};
  const auto p = project(s, {0, 1});
  CHECK(equals(p, Polyhedron::from_inequalities(2, {ge({1, 0}, 2), ge({0, 1}, 2)})));
  LinearSystem bad;
  bad.num_vars = 2;
  bad.ineqs = {ge({1, 1}, 1), ge({-1, -1}, 0)};
  CHECK(project(bad, {0}).is_empty());
}

TEST_CASE("random projections match generator images") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Halfspace> rows;
    for (int i = 0; i < 7; ++i) {
      Vec a{coeff(rng), coeff(rng), coeff(rng), coeff(rng)};
      rows.push_back(ge(a, Rational(coeff(rng) - 4)));
    }
    const auto p = Polyhedron::from_inequalities(4, rows);
    if (p.is_empty()) continue;
    CHECK(equals(project(p, {1, 3}), project_generators(p, {1, 3})));
    CHECK(equals(project(p, {0, 1, 2}), project_generators(p, {0, 1, 2})));
    for (const auto& v : p.vertices()) CHECK(p.contains(v));
  }
}

TEST_CASE("lp min over polyhedra") {
  const auto h = Polyhedron::from_inequalities(2, {ge({1, 0}, 1), ge({0, 1}, 2)});
  const auto r = lp_min(h, {1, 3});
  REQUIRE(r.kind == LpMinResult::Kind::Finite);
  CHECK(r.value == 7);
  const auto u = lp_min(h, {1, -1});
  CHECK(u.kind == LpMinResult::Kind::Unbounded);
  CHECK(dot({1, -1}, u.ray) < 0);
  CHECK(h.recedes(u.ray));
  CHECK_THROWS_AS(lp_min(Polyhedron::empty(2), {1, 0}), Error);
}

TEST_CASE("lp duals certify the optimum") {
  LinearProgram lp(2);
  lp.objective = {2, 3};
  lp.add_row({1, 1}, RowSense::GreaterEqual, 4);
  lp.add_row({1, 3}, RowSense::GreaterEqual, 6);
  lp.add_row({1, 0}, RowSense::LessEqual, 10);
  const auto r = solve(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.value == 9);
  Rational by_duals = 0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) by_duals += r.duals[i] * lp.rows[i].rhs;
  CHECK(by_duals == r.value);
}

TEST_CASE("union cover test is exact") {
  const auto p = Polyhedron::from_generators(1, {{0}, {2}}, {});
  const auto a = Polyhedron::from_generators(1, {{0}, {1}}, {});
  const auto b = Polyhedron::from_generators(1, {{1}, {2}}, {});
  const auto gap = Polyhedron::from_generators(1, {{q(3, 2)}, {2}}, {});
  CHECK(contains_union({a, b}, p));
  CHECK_FALSE(contains_union({a, gap}, p));
  const auto sq = Polyhedron::from_generators(2, {{0, 0}, {2, 0}, {0, 2}, {2, 2}}, {});
  const auto left = Polyhedron::from_inequalities(2, {ge({-1, 0}, -1)});
  const auto diag = Polyhedron::from_inequalities(2, {ge({1, 1}, 2)});
  const auto bottom_right = Polyhedron::from_inequalities(2, {ge({1, 0}, 1), ge({0, -1}, -1)});
  CHECK_FALSE(contains_union({left, diag}, sq));
  CHECK(contains_union({left, diag, bottom_right}, sq));
}

TEST_CASE("dimension cap guards conversions") {
  ScopedDimensionCap cap(2);
  CHECK_THROWS_AS(Polyhedron::orthant(3), DimensionCapError);
  CHECK_NOTHROW(Polyhedron::orthant(2));
}

TEST_CASE("point outside witnesses non containment") {
  const auto big = Polyhedron::from_inequalities(2, {ge({1, 0}, 0)});
  const auto small = Polyhedron::orthant(2);
  CHECK(contains_set(big, small));
  const auto w = point_outside(small, big);
  REQUIRE(w.has_value());
  CHECK(big.contains(*w));
  CHECK_FALSE(small.contains(*w));
}

TEST_CASE("translate and scale") {
  const auto k = Polyhedron::orthant(2);
  const auto t = translate(k, {1, -1});
  CHECK(t.contains({1, -1}));
  CHECK_FALSE(t.contains({0, 0}));
  const auto s = scale(Polyhedron::from_generators(1, {{1}, {2}}, {}), q(-1, 2));
  CHECK(equals(s, Polyhedron::from_generators(1, {{q(-1, 2)}, {-1}}, {})));
  CHECK(equals(recession_cone(t), k));
}
