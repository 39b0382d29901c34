// One PASS/FAIL line per acceptance criterion. Oracles are computed here by
// arithmetic or LPs independent of the polyhedral routes under test.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "setrisk/harness.hpp"
#include "setrisk/instances.hpp"
#include "setrisk/lp.hpp"
#include "setrisk/scalarization.hpp"

using namespace setrisk;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok || !pass) {
      pass = pass && ok;
      return;
    }
    pass = false;
    detail = what;
  }
};

struct Criterion {
  int id;
  std::string tolerance;
  double budget_s;
  std::function<Outcome()> run;
};

std::string str(const Vec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + ")";
}

std::string claim_str(const AdaptedVector& x) {
  std::string s;
  for (const auto& v : x.values) s += str(v);
  return s;
}

std::vector<std::pair<std::string, MarketModel>> instances(const std::string& names) {
  std::vector<std::pair<std::string, MarketModel>> out;
  for (const char c : names) {
    if (c == 'A') out.emplace_back("A", instance_a());
    if (c == 'B') out.emplace_back("B", instance_b());
    if (c == 'C') out.emplace_back("C", instance_c());
    if (c == 'D') out.emplace_back("D", instance_d());
  }
  return out;
}

// x in conv(vertices) + cone(rays) + span(lines), by one LP.
bool in_generated(const Polyhedron& p, const Vec& x) {
  if (p.is_empty()) return false;
  const auto& v = p.vertices();
  const auto& r = p.rays();
  const auto& l = p.lines();
  const std::size_t n = v.size() + r.size() + l.size();
  LinearProgram lp(n);
  for (std::size_t k = 0; k < v.size() + r.size(); ++k) lp.nonnegative[k] = true;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    Vec row(n);
    std::size_t k = 0;
    for (const auto& g : v) row[k++] = g[i];
    for (const auto& g : r) row[k++] = g[i];
    for (const auto& g : l) row[k++] = g[i];
    lp.add_row(std::move(row), RowSense::Equal, x[i]);
  }
  Vec ones(n);
  for (std::size_t k = 0; k < v.size(); ++k) ones[k] = 1;
  lp.add_row(std::move(ones), RowSense::Equal, 1);
  return feasible(lp);
}

bool satisfies(const std::vector<Halfspace>& ineqs, const std::vector<Halfspace>& eqs, const Vec& x) {
  for (const auto& h : ineqs) {
    if (dot(h.a, x) < h.b) return false;
  }
  for (const auto& h : eqs) {
    if (dot(h.a, x) != h.b) return false;
  }
  return true;
}

Vec sample_generated(Rng& rng, const Polyhedron& p) {
  Vec x = zeros(p.dim());
  Vec weights;
  Rational total = 0;
  for (std::size_t k = 0; k < p.vertices().size(); ++k) {
    weights.push_back(ratio(static_cast<long>(rng() % 5) + 1, 1));
    total += weights.back();
  }
  for (std::size_t k = 0; k < p.vertices().size(); ++k) x = add(x, scale(p.vertices()[k], weights[k] / total));
  for (const auto& r : p.rays()) x = add(x, scale(r, ratio(static_cast<long>(rng() % 4), 2)));
  for (const auto& l : p.lines()) x = add(x, scale(l, ratio(static_cast<long>(rng() % 5) - 2, 2)));
  return x;
}

// 1. Frictionless pricing collapse on A.
Outcome pricing_collapse() {
  Outcome o;
  const auto a = instance_a();
  const auto r = risk_measure(AcceptanceSpec::market_sum(), constant_claim(a.tree, {0, -1}), a, 0);
  const auto halfspace = Polyhedron::from_inequalities(2, {{{1, 1}, 1}});
  o.require(equals(r.nodes[0], halfspace), "R_0 is not {u1 + u2 >= 1}");
  // Martingale oracle: S_0 = q S_u + (1-q) S_d.
  const Rational s0 = 1, su = 2, sd = ratio(1, 2);
  const Rational q = (s0 - sd) / (su - sd);
  o.require(q == ratio(1, 3), "martingale probability is not 1/3");
  const Rational expected = q * su + (1 - q) * sd;
  const auto p = superhedging_price(constant_claim(a.tree, {0, 1}), 0, a);
  o.require(p.primal == expected && p.dual == expected && expected == 1,
            "price " + to_string(p.primal) + "/" + to_string(p.dual) + " vs E^Q[S_T] = " + to_string(expected));
  o.detail = o.pass ? "R_0 = {u1 + u2 >= 1}, price 1 = E^Q[S_T], Q(u) = 1/3" : o.detail;
  return o;
}

// 2. Recursion equals direct elimination at every t.
Outcome recursion_direct() {
  Outcome o;
  std::size_t cases = 0;
  Rng rng(2);
  for (const auto& [name, m] : instances("ABC")) {
    std::vector<AdaptedVector> claims{constant_claim(m.tree, {0, -1})};
    for (int k = 0; k < 10; ++k) claims.push_back(random_claim(rng, m.tree));
    for (const auto& spec : {AcceptanceSpec::market_sum(), AcceptanceSpec::regulator()}) {
      for (const auto& x : claims) {
        const auto composed = compose_mptc(spec, x, m);
        for (int t = 0; t <= m.tree.horizon(); ++t) {
          ++cases;
          o.require(equals(composed[static_cast<std::size_t>(t)], primal_risk(spec, x, m, t)),
                    name + " " + spec.name() + " t=" + std::to_string(t) + " claim " + claim_str(x));
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " (instance, spec, claim, t) cases equal";
  return o;
}

// 3. Primal equals dual at t = 0.
Outcome primal_dual() {
  Outcome o;
  std::size_t cases = 0;
  Rng rng(3);
  for (const auto& [name, m] : instances("AB")) {
    for (const auto& spec : {AcceptanceSpec::market_sum(), AcceptanceSpec::regulator()}) {
      const DualSet duals = max_dual_set(spec, m);
      o.require(duals.maximal, name + " " + spec.name() + ": dual set not maximal");
      for (int k = 0; k < 50; ++k) {
        const auto x = random_claim(rng, m.tree);
        ++cases;
        o.require(equals(evaluate_dual(duals, x, m), primal_risk(spec, x, m, 0)),
                  name + " " + spec.name() + " claim " + claim_str(x));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " claims equal";
  return o;
}

// 4. Scalar reconstruction with all and with fewer facet normals.
Outcome reconstruction() {
  Outcome o;
  std::size_t exact = 0, supersets = 0, single = 0, trivial = 0;
  Rng rng(4);
  for (const auto& [name, m] : instances("ABCD")) {
    for (int k = 0; k < 50; ++k) {
      const auto x = random_claim(rng, m.tree);
      const AcceptanceSpec spec = k % 2 == 0 ? AcceptanceSpec::market_sum() : AcceptanceSpec::regulator();
      const int t = k % 3 == 0 ? 0 : m.tree.horizon() - 1;
      const auto r = risk_measure(spec, x, m, t);
      const auto normals = facet_normals(r);
      if (normals.empty()) {
        // No facets: every node set is M_t or empty, nothing to reconstruct from.
        ++trivial;
        continue;
      }
      const auto full = reconstruct(spec, x, m, t, normals);
      o.require(full.exact && equals(full.result, r), name + " full normal set, claim " + claim_str(x));
      ++exact;
      if (normals.size() == 1) {
        // The only strict subset is empty and leaves nothing to intersect.
        ++single;
        continue;
      }
      std::vector<Vec> fewer(normals.begin() + 1, normals.end());
      const auto part = reconstruct(spec, x, m, t, fewer);
      bool certified = !part.exact && contains_set(part.result, r) && part.witness && part.witness_node;
      if (certified) {
        const std::size_t n = *part.witness_node;
        certified = part.result.at(m.tree, n).contains(*part.witness) && !r.at(m.tree, n).contains(*part.witness) &&
                    !accepts(spec, x, constant_adapted(m.tree, t, *part.witness), m, t);
      }
      o.require(certified, name + " strict subset of normals, claim " + claim_str(x));
      ++supersets;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(exact) + " exact, " + std::to_string(supersets) + " certified supersets, " +
               std::to_string(single) + " single-facet and " + std::to_string(trivial) + " facet-free values";
  }
  return o;
}

// 5. Superhedging strong duality and the sandwich on B.
Outcome superhedging_sandwich() {
  Outcome o;
  const auto a = instance_a();
  const auto b = instance_b();
  // A's cones contain B's, so any B-hedge is an A-hedge: A's price is a lower bound.
  for (std::size_t n = 0; n < b.tree.size(); ++n) {
    o.require(contains_set(a.cones[n].cone.set(), b.cones[n].cone.set()), "B cone not inside A cone");
  }
  const Rational q = ratio(1, 3), ask0 = ratio(6, 5), bid0 = 1;
  Rng rng(5);
  Rational widest = 0;
  for (int k = 0; k < 50; ++k) {
    const auto x = random_claim(rng, b.tree);
    const auto p = superhedging_price(x, 0, b);
    const Vec& xu = x.values[0];
    const Vec& xd = x.values[1];
    const Rational lower = q * (xu[0] + 2 * xu[1]) + (1 - q) * (xd[0] + ratio(1, 2) * xd[1]);
    // Buy the leafwise maximum at t = 0 and hold it.
    const Rational m1 = std::max(xu[0], xd[0]), m2 = std::max(xu[1], xd[1]);
    const Rational upper = m1 + (m2 > 0 ? ask0 : bid0) * m2;
    o.require(p.primal == p.dual, "duality gap on claim " + claim_str(x));
    o.require(lower <= p.primal && p.primal <= upper,
              "claim " + claim_str(x) + ": " + to_string(p.primal) + " outside [" + to_string(lower) + ", " +
                  to_string(upper) + "]");
    widest = std::max(widest, Rational(upper - lower));
  }
  if (o.pass) o.detail = "50 claims, primal = dual inside the sandwich (widest gap " + to_string(widest) + ")";
  return o;
}

// 6. Constructive projection against a selector grid.
Outcome constructive_grid() {
  Outcome o;
  constexpr int kSteps = 20;  // 21 grid values per leaf
  // Claims are bounded by 2 and boundary samples stay within one unit of a
  // face vertex, so trades of size 7 per leaf reach every sampled point.
  const Rational span = 7, h = 2 * span / kSteps;
  Rng rng(6);
  std::size_t oracle_points = 0, boundary_points = 0;
  Rational worst_gap = 0;
  const std::vector<std::vector<ScalarComponent>> combos{
      {ScalarComponent::worst_case(), ScalarComponent::worst_case()},
      {ScalarComponent::avar(ratio(1, 2)), ScalarComponent::worst_case()},
      {ScalarComponent::avar(ratio(1, 2)), ScalarComponent::avar(ratio(1, 2))}};
  for (const auto& [name, m] : instances("ABD")) {
    const auto& leaves = m.tree.leaves();
    Vec probs;
    for (const std::size_t l : leaves) probs.push_back(m.tree.node(l).prob);
    // Boundary directions of each leaf cone, scaled to unit sup norm.
    std::vector<std::pair<Vec, Vec>> dirs;
    for (const std::size_t l : leaves) {
      const Cone& k = m.cone(l);
      std::vector<Vec> g;
      if (!k.lines().empty()) {
        g = {k.lines()[0], negate(k.lines()[0])};
      } else {
        g = k.rays();
      }
      if (g.size() != 2) throw Error("expected a two dimensional cone with two boundary rays");
      for (auto& v : g) v = scale(v, 1 / std::max(Rational(abs(v[0])), Rational(abs(v[1]))));
      dirs.emplace_back(g[0], g[1]);
    }
    const Rational delta = h;  // h times the largest generator entry, which is 1
    for (const auto& comps : combos) {
      for (int c = 0; c < 3; ++c) {
        const auto x = random_claim(rng, m.tree, 2);
        const auto r = constructive_risk(comps, Exchange::Solvency, x, m).nodes[0];
        std::vector<Vec> grid;
        for (int i = 0; i <= kSteps; ++i) {
          for (int j = 0; j <= kSteps; ++j) {
            const Rational th[2] = {-span + h * i, -span + h * j};
            std::vector<Vec> z;
            for (std::size_t k = 0; k < 2; ++k) {
              const Vec trade = th[k] >= 0 ? scale(dirs[k].first, th[k]) : scale(dirs[k].second, -th[k]);
              z.push_back(sub(x.values[k], trade));
            }
            Vec point;
            for (std::size_t a = 0; a < 2; ++a) point.push_back(evaluate_component(comps[a], {z[0][a], z[1][a]}, probs));
            ++oracle_points;
            o.require(r.contains(point), name + " oracle point " + str(point) + " outside, claim " + claim_str(x));
            grid.push_back(std::move(point));
          }
        }
        for (int s = 0; s < 100; ++s) {
          const auto& facets = r.inequalities();
          if (facets.empty()) break;
          const Halfspace& f = facets[rng() % facets.size()];
          const auto face = intersect(r, Polyhedron::from_inequalities(2, {}, {f}));
          Vec b = sample_generated(rng, Polyhedron::from_generators(2, face.vertices(), {}));
          for (const auto& ray : face.rays()) {
            b = add(b, scale(ray, ratio(static_cast<long>(rng() % 5), 4) / std::max(Rational(abs(ray[0])), Rational(abs(ray[1])))));
          }
          // Distance in the upper-set sense: the smallest e with g <= b + e(1, 1).
          Rational gap = -1;
          for (const auto& g : grid) {
            const Rational e = std::max(Rational(g[0] - b[0]), Rational(g[1] - b[1]));
            if (gap < 0 || e < gap) gap = e;
          }
          ++boundary_points;
          worst_gap = std::max(worst_gap, gap);
          o.require(gap <= delta, name + " boundary point " + str(b) + " at distance " + to_string(gap) +
                                      " > " + to_string(delta) + ", claim " + claim_str(x) + ", set " +
                                      str(r.vertices()[0]));
        }
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(oracle_points) + " oracle points inside, " + std::to_string(boundary_points) +
               " boundary points within " + to_string(h) + " (largest gap " + to_string(worst_gap) + ")";
  }
  return o;
}

// 7. Property suites, 100 cases per property and shipped spec.
Outcome property_suites() {
  Outcome o;
  std::size_t reports = 0;
  for (const auto& [name, m] : instances("ABCD")) {
    for (const auto& spec : shipped_specs(m)) {
      for (const auto& r : property_suite(spec, m, name, 7, 100)) {
        ++reports;
        o.require(r.pass && r.cases >= 100,
                  name + " " + spec.name() + " " + r.name + (r.pass ? ": only " + std::to_string(r.cases) +
                                                                      " cases"
                                                                : ": failed, witness verified " +
                                                                      std::string(r.witness_verified ? "yes" : "no")));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(reports) + " reports, every one passing on >= 100 cases";
  return o;
}

// 8. Dual stability on C and the hybrid counterexample.
Outcome dual_stability() {
  Outcome o;
  const auto c = instance_c();
  for (const auto& [t, s] : {std::pair{0, 1}, std::pair{1, 2}}) {
    const auto st = check_dual_stability(AcceptanceSpec::market_sum(), AcceptanceSpec::market_sum(), c, t, s);
    o.require(st.holds, "market_sum not stable at (" + std::to_string(t) + "," + std::to_string(s) + ")");
  }
  const auto hybrid = stability_check(AcceptanceSpec::market_sum(), AcceptanceSpec::regulator(), c, 0, 1);
  o.require(!hybrid.pass && hybrid.witness_verified, "hybrid did not fail with a verified witness");
  if (o.pass) o.detail = "holds at (0,1) and (1,2); hybrid fails with witness " + hybrid.witness.dump();
  return o;
}

// 9. Polyhedral engine soundness on random polyhedra.
Outcome engine_soundness() {
  Outcome o;
  Rng rng(9);
  std::size_t bounded = 0, with_lines = 0, empties = 0;
  auto coeff = [&] { return Rational(static_cast<long>(rng() % 7) - 3); };
  for (int k = 0; k < 200; ++k) {
    const std::size_t dim = 1 + rng() % 4;
    std::vector<Halfspace> ineqs, eqs;
    const std::size_t rows = rng() % (2 * dim + 2);
    for (std::size_t i = 0; i < rows; ++i) {
      Vec a(dim);
      for (auto& v : a) v = coeff();
      ineqs.push_back({a, coeff()});
    }
    if (dim > 1 && rng() % 5 == 0) {
      Vec a(dim);
      for (auto& v : a) v = coeff();
      eqs.push_back({a, coeff()});
    }
    const std::string tag = "polyhedron " + std::to_string(k) + " (dim " + std::to_string(dim) + ")";
    const auto p = Polyhedron::from_inequalities(dim, ineqs, eqs);
    if (p.is_empty()) {
      ++empties;
      // No sampled point satisfies the raw system.
      for (int s = 0; s < 20; ++s) o.require(!satisfies(ineqs, eqs, random_vec(rng, dim, 4)), tag + " empty but satisfiable");
      continue;
    }
    bounded += p.is_bounded();
    with_lines += !p.lines().empty();
    // H -> V -> H round trip, and every generator against the raw rows.
    const auto q = Polyhedron::from_generators(dim, p.vertices(), p.rays(), p.lines());
    o.require(equals(p, q), tag + " round trip");
    for (const auto& v : p.vertices()) o.require(satisfies(ineqs, eqs, v), tag + " vertex violates a row");
    for (const auto& r : p.rays()) {
      bool ok = true;
      for (const auto& h : ineqs) ok = ok && dot(h.a, r) >= 0;
      for (const auto& h : eqs) ok = ok && dot(h.a, r) == 0;
      o.require(ok, tag + " ray leaves the set");
    }
    // Membership three ways on random points.
    for (int s = 0; s < 15; ++s) {
      const Vec x = s % 2 ? sample_generated(rng, p) : random_vec(rng, dim, 3, 2);
      const bool raw = satisfies(ineqs, eqs, x);
      o.require(raw == p.contains(x) && raw == in_generated(p, x), tag + " membership of " + str(x));
    }
    // Dual cone involution on the recession cone and on its dual.
    const auto rec = Cone::from_generators(dim, p.rays(), p.lines());
    const auto dual = dual_cone(rec);
    o.require(equals(dual_cone(dual).set(), rec.set()), tag + " dual involution");
    for (const auto& y : dual.rays()) {
      for (const auto& x : rec.rays()) o.require(dot(y, x) >= 0, tag + " dual pairing");
    }
    // Projection by elimination against generator images and sampled lifts.
    if (dim >= 2) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < dim; ++i) {
        if (rng() % 2) keep.push_back(i);
      }
      if (keep.empty()) keep.push_back(0);
      const auto proj = project(p, keep);
      o.require(equals(proj, project_generators(p, keep)), tag + " projection routes");
      for (int s = 0; s < 10; ++s) {
        const Vec x = sample_generated(rng, p);
        Vec y;
        for (const auto i : keep) y.push_back(x[i]);
        o.require(proj.contains(y), tag + " image of a sample outside the projection");
        // A random point of the target space lies in proj iff the fiber LP is feasible.
        const Vec z = s % 2 ? sample_generated(rng, proj) : random_vec(rng, keep.size(), 3, 2);
        LinearProgram lp(dim);
        for (const auto& h : ineqs) lp.add_row(h.a, RowSense::GreaterEqual, h.b);
        for (const auto& h : eqs) lp.add_row(h.a, RowSense::Equal, h.b);
        for (std::size_t j = 0; j < keep.size(); ++j) lp.add_row(unit(dim, keep[j]), RowSense::Equal, z[j]);
        o.require(feasible(lp) == proj.contains(z), tag + " lift of " + str(z));
      }
    }
  }
  if (o.pass) {
    o.detail = "200 polyhedra (" + std::to_string(bounded) + " bounded, " + std::to_string(with_lines) +
               " with lines, " + std::to_string(empties) + " empty)";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exact", 1, pricing_collapse},
      {2, "exact", 30, recursion_direct},
      {3, "exact", 30, primal_dual},
      {4, "exact", 30, reconstruction},
      {5, "exact", 10, superhedging_sandwich},
      {6, "delta = h * max|l| = 7/10", 60, constructive_grid},
      {7, "zero failures", 120, property_suites},
      {8, "exact", 30, dual_stability},
      {9, "zero failures", 60, engine_soundness},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.detail = "over the " + std::to_string(static_cast<int>(c.budget_s)) + " s budget; " + o.detail;
      o.pass = false;
    }
    all = all && o.pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs (budget %gs)", secs, c.budget_s);
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  tol=" << c.tolerance
              << "  time=" << timing << "  " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
