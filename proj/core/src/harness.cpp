#include "setrisk/harness.hpp"

#include <algorithm>
#include <numeric>

#include "setrisk/instances.hpp"
#include "setrisk/lp.hpp"
#include "setrisk/system.hpp"

namespace setrisk {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json claim_json(const ScenarioTree& tree, const AdaptedVector& x) {
  json o = json::object();
  for (const std::size_t n : tree.nodes_at(x.time)) o[tree.node(n).id] = vec_json(x.at(tree, n));
  return o;
}

CheckReport make_report(std::string name, std::string instance, std::uint64_t seed) {
  CheckReport r;
  r.name = std::move(name);
  r.instance = std::move(instance);
  r.seed = seed;
  r.pass = true;
  return r;
}

void fail(CheckReport& r, json witness, bool verified, std::string details) {
  if (!r.pass) return;  // keep the first witness
  r.pass = false;
  r.witness = std::move(witness);
  r.witness_verified = verified;
  r.details = std::move(details);
}

// Membership through the generators: x = sum l_v v + sum m_r r + sum n_l l,
// l in the simplex, m >= 0. Independent of the inequality description.
bool in_hull(const Polyhedron& p, const Vec& x) {
  if (p.is_empty()) return false;
  const auto& vs = p.vertices();
  const auto& rs = p.rays();
  const auto& ls = p.lines();
  const std::size_t nv = vs.size() + rs.size() + ls.size();
  LinearProgram lp(nv);
  for (std::size_t j = 0; j < vs.size() + rs.size(); ++j) lp.nonnegative[j] = true;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    Vec row(nv);
    std::size_t j = 0;
    for (const auto& v : vs) row[j++] = v[i];
    for (const auto& r : rs) row[j++] = r[i];
    for (const auto& l : ls) row[j++] = l[i];
    lp.add_row(std::move(row), RowSense::Equal, x[i]);
  }
  Vec conv(nv);
  for (std::size_t j = 0; j < vs.size(); ++j) conv[j] = 1;
  lp.add_row(std::move(conv), RowSense::Equal, 1);
  return feasible(lp);
}

// A random point of p built from its generators.
Vec sample_point(Rng& rng, const Polyhedron& p) {
  std::uniform_int_distribution<std::size_t> pick(0, p.vertices().size() - 1);
  Vec x = p.vertices()[pick(rng)];
  std::uniform_int_distribution<int> coin(0, 3);
  for (const auto& r : p.rays()) {
    const int c = coin(rng);
    if (c > 0) x = add(x, scale(r, ratio(c, 2)));
  }
  for (const auto& l : p.lines()) x = add(x, scale(l, ratio(coin(rng) - 1, 2)));
  return x;
}

// A point just outside p near the sample x, or nothing for the whole space.
std::optional<Vec> outside_point(Rng& rng, const Polyhedron& p, const Vec& x) {
  if (p.inequalities().empty() && p.equations().empty()) return std::nullopt;
  std::vector<Halfspace> rows = p.inequalities();
  for (const auto& h : p.equations()) rows.push_back(h);
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  const Halfspace& h = rows[pick(rng)];
  const Rational step = (dot(h.a, x) - h.b + Rational(1, 7)) / dot(h.a, h.a);
  return sub(x, scale(h.a, step));
}

AdaptedVector adapted_from(const ScenarioTree& tree, int t, std::vector<Vec> values) {
  AdaptedVector a;
  a.time = t;
  a.values = std::move(values);
  check_adapted(tree, a);
  return a;
}

// A time-t vector zero except at node n.
AdaptedVector at_node(const MarketModel& m, int t, std::size_t n, const Vec& u) {
  std::vector<Vec> values(m.tree.nodes_at(t).size(), zeros(m.dim()));
  values[m.tree.node(n).position] = u;
  return adapted_from(m.tree, t, std::move(values));
}

// Node-wise lambda X + (1 - lambda) Y with lambda a time-t adapted scalar.
AdaptedVector mix(const ScenarioTree& tree, const AdaptedVector& x, const AdaptedVector& y, const Vec& lambda, int t) {
  AdaptedVector z = x;
  const auto& leaves = tree.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Rational& l = lambda[tree.node(tree.ancestor_at(leaves[k], t)).position];
    for (std::size_t i = 0; i < z.values[k].size(); ++i) z.values[k][i] = l * x.values[k][i] + (1 - l) * y.values[k][i];
  }
  return z;
}

std::vector<int> allowed_times(const AcceptanceSpec& spec, const ScenarioTree& tree) {
  if (spec.kind == AcceptanceSpec::Kind::Constructive) return {0};
  std::vector<int> ts(static_cast<std::size_t>(tree.horizon()) + 1);
  std::iota(ts.begin(), ts.end(), 0);
  return ts;
}

// First node where two results differ, with a point in one but not the other.
struct Difference {
  std::size_t node;
  Vec point;
  bool in_first;
};

std::optional<Difference> difference(const MarketModel& m, const RiskResult& a, const RiskResult& b) {
  const auto& nodes = m.tree.nodes_at(a.t);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (auto p = point_outside(b.nodes[k], a.nodes[k])) return Difference{nodes[k], *p, true};
    if (auto p = point_outside(a.nodes[k], b.nodes[k])) return Difference{nodes[k], *p, false};
  }
  return std::nullopt;
}

json difference_json(const MarketModel& m, const Difference& d) {
  return json{{"node", m.tree.node(d.node).id}, {"point", vec_json(d.point)}};
}

}  // namespace

json CheckReport::to_json() const {
  json o{{"check", name}, {"instance", instance}, {"pass", pass}, {"seed", seed}, {"cases", cases}};
  if (!measure.empty()) o["measure"] = measure;
  if (!verdict) o["verdict"] = "precondition failed";
  if (!pass) {
    o["witness"] = witness;
    o["witness_verified"] = witness_verified;
  }
  if (!details.empty()) o["details"] = details;
  return o;
}

Rational random_rational(Rng& rng, long range, long max_den) {
  std::uniform_int_distribution<long> den(1, max_den);
  const long q = den(rng);
  std::uniform_int_distribution<long> num(-range * q, range * q);
  return ratio(num(rng), q);
}

Vec random_vec(Rng& rng, std::size_t d, long range, long max_den) {
  Vec v(d);
  for (auto& x : v) x = random_rational(rng, range, max_den);
  return v;
}

AdaptedVector random_claim(Rng& rng, const ScenarioTree& tree, long range) {
  std::vector<Vec> values;
  for (std::size_t k = 0; k < tree.num_leaves(); ++k) values.push_back(random_vec(rng, tree.dim(), range));
  return adapted_from(tree, tree.horizon(), std::move(values));
}

AdaptedVector random_eligible(Rng& rng, const MarketModel& m, int t, long range) {
  const auto& basis = m.eligible_at(t).basis();
  std::vector<Vec> values;
  for (std::size_t k = 0; k < m.tree.nodes_at(t).size(); ++k) {
    Vec v = zeros(m.dim());
    for (const auto& b : basis) v = add(v, scale(b, random_rational(rng, range, 3)));
    values.push_back(std::move(v));
  }
  return adapted_from(m.tree, t, std::move(values));
}

bool node_member(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t, std::size_t n,
                 const Vec& u) {
  if (m.tree.node(n).time != t) throw InputError("node_member: node is not at time t");
  if (!m.eligible_at(t).contains(u)) return false;
  const std::size_t d = m.dim();
  SystemBuilder b;
  if (spec.kind == AcceptanceSpec::Kind::Custom) {
    std::map<std::size_t, std::size_t> first;
    for (const std::size_t v : m.tree.nodes_at(t)) {
      first[v] = b.add_vars(d);
      add_eligible(b, m.eligible_at(t), first[v]);
    }
    for (std::size_t i = 0; i < d; ++i) b.add_eq(Affine::var(first[n] + i) - Affine::value(u[i]));
    add_custom_acceptance(b, spec, m, shifted_claim(m, x, t, m.tree.root(), first));
    return feasible(b.program(Affine{}));
  }
  const AdaptedVector y = add_lifted(m.tree, x, at_node(m, t, n, u));
  add_local_acceptance(b, spec, m, n, shifted_claim(m, y, t, n, {}));
  return feasible(b.program(Affine{}));
}

DynamicSpec DynamicSpec::uniform(const AcceptanceSpec& spec, const MarketModel& m) {
  return DynamicSpec{std::vector<AcceptanceSpec>(static_cast<std::size_t>(m.tree.horizon()) + 1, spec)};
}

std::string DynamicSpec::name() const {
  bool same = true;
  for (const auto& s : per_time) same = same && s.name() == per_time.front().name();
  if (same) return per_time.front().name();
  std::string out = "hybrid(";
  for (std::size_t t = 0; t < per_time.size(); ++t) out += (t ? "," : "") + per_time[t].name();
  return out + ")";
}

bool recursion_member(const AcceptanceSpec& spec, const RiskResult& later, const MarketModel& m, std::size_t n,
                      const Vec& u) {
  const ScenarioTree& tree = m.tree;
  const int t = tree.node(n).time;
  if (later.t != t + 1) throw InputError("recursion_member: successor result must be one period later");
  if (!m.eligible_at(t).contains(u)) return false;
  const std::size_t d = m.dim();
  SystemBuilder b;
  std::map<std::size_t, std::size_t> z;
  for (const std::size_t c : tree.node(n).children) {
    z[c] = b.add_vars(d);
    AffineVec zv;
    for (std::size_t i = 0; i < d; ++i) zv.push_back(Affine::var(z[c] + i));
    b.add_in(later.at(tree, c), zv);
  }
  std::vector<AffineVec> y;
  for (const std::size_t l : tree.leaves_under(n)) {
    const std::size_t c = tree.ancestor_at(l, t + 1);
    AffineVec e;
    for (std::size_t i = 0; i < d; ++i) e.push_back(Affine::value(u[i]) - Affine::var(z[c] + i));
    y.push_back(std::move(e));
  }
  add_local_acceptance(b, spec, m, n, y);
  return feasible(b.program(Affine{}));
}

Polyhedron product_set(const RiskResult& r) {
  const std::size_t blocks = r.nodes.size();
  const std::size_t d = r.nodes.front().dim();
  const std::size_t dim = d * blocks;
  std::vector<Halfspace> ineqs, eqs;
  for (std::size_t k = 0; k < blocks; ++k) {
    if (r.nodes[k].is_empty()) return Polyhedron::empty(dim);
    auto embed = [&](const Halfspace& h) {
      Halfspace out{zeros(dim), h.b};
      for (std::size_t i = 0; i < d; ++i) out.a[k * d + i] = h.a[i];
      return out;
    };
    for (const auto& h : r.nodes[k].inequalities()) ineqs.push_back(embed(h));
    for (const auto& h : r.nodes[k].equations()) eqs.push_back(embed(h));
  }
  return Polyhedron::from_inequalities(dim, std::move(ineqs), std::move(eqs));
}

CheckReport check_decomposability(const Polyhedron& d_set, const MarketModel& m, int t,
                                  const std::vector<NodePartition>& partitions, std::uint64_t seed,
                                  std::size_t samples) {
  CheckReport rep = make_report("decomposability", "", seed);
  const std::size_t d = m.dim();
  const std::size_t count = m.tree.nodes_at(t).size();
  if (d_set.dim() != d * count) throw InputError("decomposability: set dimension does not match the time-t nodes");
  for (const auto& part : partitions) {
    std::vector<int> seen(count, 0);
    for (const auto& block : part) {
      for (const std::size_t n : block) {
        if (n >= m.tree.size() || m.tree.node(n).time != t) throw InputError("partition block holds a foreign node");
        ++seen[m.tree.node(n).position];
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
      throw InputError("partition must cover every time-t node exactly once");
    }
  }
  if (d_set.is_empty()) {
    rep.details = "empty set";
    return rep;
  }
  Rng rng(seed);
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    const auto& part = partitions[p];
    std::vector<Polyhedron> shadows;
    std::vector<std::vector<std::size_t>> coords;
    for (const auto& block : part) {
      std::vector<std::size_t> c;
      for (const std::size_t n : block) {
        for (std::size_t i = 0; i < d; ++i) c.push_back(m.tree.node(n).position * d + i);
      }
      shadows.push_back(project(d_set, c));
      coords.push_back(std::move(c));
    }
    for (std::size_t s = 0; s < samples; ++s) {
      ++rep.cases;
      const Vec a = sample_point(rng, d_set);
      const Vec b = sample_point(rng, d_set);
      std::vector<Vec> probes{a};
      for (std::size_t j = 0; j < part.size(); ++j) {
        Vec glued = b;
        for (const std::size_t c : coords[j]) glued[c] = a[c];
        probes.push_back(glued);
        if (!d_set.contains(glued)) {
          const bool verified = in_hull(d_set, a) && in_hull(d_set, b) && !in_hull(d_set, glued);
          fail(rep, json{{"partition", p}, {"block", j}, {"a", vec_json(a)}, {"b", vec_json(b)},
                         {"glued", vec_json(glued)}},
               verified, "gluing two members along the partition leaves the set");
        }
      }
      if (auto out = outside_point(rng, d_set, a)) probes.push_back(*out);
      // Partition property: membership iff every block restriction is in the block's shadow.
      for (const auto& x : probes) {
        bool blocks_ok = true;
        for (std::size_t j = 0; j < part.size(); ++j) {
          Vec r;
          for (const std::size_t c : coords[j]) r.push_back(x[c]);
          blocks_ok = blocks_ok && shadows[j].contains(r);
        }
        if (blocks_ok != d_set.contains(x)) {
          fail(rep, json{{"partition", p}, {"point", vec_json(x)}, {"member", d_set.contains(x)}},
               in_hull(d_set, x) == d_set.contains(x), "block restrictions do not decide membership");
        }
      }
    }
  }
  return rep;
}

CheckReport check_decomposability(const RiskResult& r, const MarketModel& m,
                                  const std::vector<NodePartition>& partitions, std::uint64_t seed,
                                  std::size_t samples) {
  CheckReport rep = check_decomposability(product_set(r), m, r.t, partitions, seed, samples);
  rep.instance = r.measure;
  return rep;
}

CheckReport selector_equivalence(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t,
                                 std::uint64_t seed, std::size_t samples) {
  CheckReport rep = make_report("selector_equivalence", "", seed);
  const ScenarioTree& tree = m.tree;
  const RiskResult r = risk_measure(spec, x, m, t);
  if (std::any_of(r.nodes.begin(), r.nodes.end(), [](const Polyhedron& p) { return p.is_empty(); })) {
    // No selectors; the oracle must reject every candidate.
    ++rep.cases;
    if (accepts(spec, x, constant_adapted(tree, t, zeros(m.dim())), m, t) && !is_acceptable(spec, x, m, t)) {
      fail(rep, json{{"claim", claim_json(tree, x)}}, true, "empty value but the oracle accepts");
    }
    rep.details = "empty node set";
    return rep;
  }
  Rng rng(seed);
  auto draw = [&] {
    std::vector<Vec> v;
    for (const auto& p : r.nodes) v.push_back(sample_point(rng, p));
    return adapted_from(tree, t, std::move(v));
  };
  for (std::size_t s = 0; s < samples; ++s) {
    ++rep.cases;
    const AdaptedVector u = draw();
    if (!accepts(spec, x, u, m, t)) {
      fail(rep, json{{"claim", claim_json(tree, x)}, {"selector", claim_json(tree, u)}}, true,
           "a mixed selector of the node sets is rejected by the acceptance oracle");
    }
    // Just outside at one node.
    std::uniform_int_distribution<std::size_t> pick(0, r.nodes.size() - 1);
    const std::size_t k = pick(rng);
    if (auto out = outside_point(rng, r.nodes[k], u.values[k])) {
      AdaptedVector v = u;
      v.values[k] = *out;
      if (accepts(spec, x, v, m, t)) {
        fail(rep, json{{"claim", claim_json(tree, x)}, {"selector", claim_json(tree, v)}}, !in_hull(r.nodes[k], *out),
             "a point outside the node set is accepted");
      }
    }
    // Node-wise mixtures of selectors.
    const AdaptedVector w = draw();
    Vec lambda;
    for (std::size_t j = 0; j < r.nodes.size(); ++j) lambda.push_back(ratio(static_cast<long>(rng() % 5), 4));
    AdaptedVector mixed = u;
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      mixed.values[j] = add(scale(u.values[j], lambda[j]), scale(w.values[j], 1 - lambda[j]));
    }
    if (!accepts(spec, x, mixed, m, t)) {
      fail(rep, json{{"claim", claim_json(tree, x)}, {"selector", claim_json(tree, mixed)}}, true,
           "a node-wise mixture of selectors is rejected");
    }
    if (spec.conical() && !accepts(spec, Rational(2) * x, Rational(2) * u, m, t)) {
      fail(rep, json{{"claim", claim_json(tree, x)}, {"selector", claim_json(tree, u)}}, true,
           "scaling the claim and the selector by 2 leaves the acceptance set");
    }
  }
  using Kind = AcceptanceSpec::Kind;
  if ((spec.kind == Kind::MarketSum || spec.kind == Kind::Regulator) && t < tree.horizon()) {
    ++rep.cases;
    const auto family = compose_mptc(spec, x, m);
    if (const auto diff = difference(m, family[static_cast<std::size_t>(t)], r)) {
      const bool direct = node_member(spec, x, m, t, diff->node, diff->point);
      const bool composed =
          recursion_member(spec, family[static_cast<std::size_t>(t) + 1], m, diff->node, diff->point);
      fail(rep, difference_json(m, *diff), direct != composed, "selector recursion differs from the direct value");
    }
  }
  return rep;
}

CheckReport portfolio_equivalence(const AcceptanceSpec& spec, const ConeField& field, const AdaptedVector& x,
                                  const MarketModel& m, int t, const RiskResult* direct, std::uint64_t seed,
                                  std::size_t samples) {
  CheckReport rep = make_report("portfolio_equivalence", "", seed);
  const ScenarioTree& tree = m.tree;
  const RiskResult closure = k_compatible_closure(spec, x, m, field, t);
  const RiskResult base = risk_measure(spec, x, m, t);
  auto with_trades = [&](std::size_t n, const Vec& u) {
    if (!m.eligible_at(t).contains(u)) return false;
    SystemBuilder b;
    const AdaptedVector y = add_lifted(tree, x, at_node(m, t, n, u));
    add_local_acceptance(b, spec, m, n, shifted_claim(m, y, t, n, {}), &field);
    return feasible(b.program(Affine{}));
  };
  ++rep.cases;
  if (!contains_set(closure, base)) {
    const auto diff = difference(m, base, closure);
    fail(rep, difference_json(m, *diff), node_member(spec, x, m, t, diff->node, diff->point),
         "the closure misses part of the base value");
  }
  if (direct) {
    ++rep.cases;
    if (const auto diff = difference(m, closure, *direct)) {
      fail(rep, difference_json(m, *diff), with_trades(diff->node, diff->point) == diff->in_first,
           "the closure differs from the K-compatible measure");
    }
  }
  Rng rng(seed);
  const auto& nodes = tree.nodes_at(t);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (closure.nodes[k].is_empty()) continue;
      ++rep.cases;
      const Vec u = sample_point(rng, closure.nodes[k]);
      if (!with_trades(nodes[k], u)) {
        fail(rep, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(u)}}, true,
             "a point of the closure is not reachable by trades");
      }
      if (auto out = outside_point(rng, closure.nodes[k], u); out && with_trades(nodes[k], *out)) {
        fail(rep, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*out)}},
             !in_hull(closure.nodes[k], *out), "a point outside the closure is reachable by trades");
      }
    }
  }
  // Property transfer.
  ++rep.cases;
  const AdaptedVector y = random_claim(rng, tree);
  const RiskResult cy = k_compatible_closure(spec, y, m, field, t);
  const Rational lambda(1, 3);
  const RiskResult cm = k_compatible_closure(spec, lambda * x + (1 - lambda) * y, m, field, t);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Polyhedron left = minkowski_sum(scale(closure.nodes[k], lambda), scale(cy.nodes[k], 1 - lambda));
    if (auto p = point_outside(cm.nodes[k], left)) {
      fail(rep, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"other", claim_json(tree, y)}},
           !cm.nodes[k].contains(*p), "convexity is not inherited by the closure");
    }
  }
  if (spec.conical()) {
    ++rep.cases;
    const RiskResult c2 = k_compatible_closure(spec, Rational(2) * x, m, field, t);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (!equals(c2.nodes[k], scale(closure.nodes[k], 2))) {
        fail(rep, json{{"node", tree.node(nodes[k]).id}}, true, "homogeneity is not inherited by the closure");
      }
    }
  }
  return rep;
}

CheckReport mptc_check(const DynamicSpec& spec, const MarketModel& m, std::uint64_t seed, std::size_t claims) {
  CheckReport rep = make_report("mptc", "", seed);
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  const int T = tree.horizon();
  if (spec.per_time.size() != static_cast<std::size_t>(T) + 1) throw InputError("mptc_check: one spec per time");
  Rng rng(seed);

  // Normalization: R_t(0) is a cone containing 0 that R_t(X) absorbs.
  for (int t = 0; t <= T; ++t) {
    const RiskResult zero = risk_measure(spec.at(t), constant_claim(tree, zeros(d)), m, t);
    bool ok = std::all_of(zero.nodes.begin(), zero.nodes.end(),
                          [&](const Polyhedron& p) { return !p.is_empty() && p.is_cone(); });
    for (int j = 0; ok && j < 3; ++j) {
      const RiskResult r = risk_measure(spec.at(t), random_claim(rng, tree), m, t);
      for (std::size_t k = 0; k < r.nodes.size(); ++k) ok = ok && equals(minkowski_sum(r.nodes[k], zero.nodes[k]), r.nodes[k]);
    }
    if (!ok) {
      rep.pass = false;
      rep.verdict = false;
      rep.details = "precondition failed: the measure is not normalized at t = " + std::to_string(t);
      return rep;
    }
  }

  std::vector<StepEvaluator> steps;
  for (int t = 0; t < T; ++t) steps.push_back(stepped_risk(spec.at(t), m, t));

  for (std::size_t c = 0; c < claims; ++c) {
    const AdaptedVector x = random_claim(rng, tree);
    // (a) backward recursion against direct evaluation.
    ++rep.cases;
    const auto family = compose_with(steps, risk_measure(spec.at(T), x, m, T), m);
    for (int t = T - 1; t >= 0; --t) {
      const RiskResult direct = risk_measure(spec.at(t), x, m, t);
      if (const auto diff = difference(m, family[static_cast<std::size_t>(t)], direct)) {
        const bool in_direct = node_member(spec.at(t), x, m, t, diff->node, diff->point);
        const bool in_composed =
            recursion_member(spec.at(t), family[static_cast<std::size_t>(t) + 1], m, diff->node, diff->point);
        json w = difference_json(m, *diff);
        w["claim"] = claim_json(tree, x);
        w["t"] = t;
        w["in_direct"] = in_direct;
        w["in_composed"] = in_composed;
        fail(rep, std::move(w), in_direct != in_composed, "recursion and direct evaluation differ");
      }
    }

    // (b) X in A_t iff X = X_s + X_{t,s} with X_s in A_s and X_{t,s} in A_t, F_s-measurable.
    for (int t = 0; t < T; ++t) {
      const int s = t + 1;
      ++rep.cases;
      const RiskResult direct = risk_measure(spec.at(t), x, m, t);
      std::vector<Vec> shift;
      for (const auto& p : direct.nodes) {
        Vec u = p.is_empty() ? zeros(d) : sample_point(rng, p);
        const Rational nudge(static_cast<long>(rng() % 3) - 1, 4);
        for (std::size_t i = 0; i < d; ++i) u[i] += nudge;
        shift.push_back(m.eligible_at(t).contains(u) ? u : zeros(d));
      }
      const AdaptedVector xs = add_lifted(tree, x, adapted_from(tree, t, shift));
      const bool accepted = accepts(spec.at(t), xs, constant_adapted(tree, t, zeros(d)), m, t);
      SystemBuilder b;
      std::map<std::size_t, std::size_t> w;
      for (const std::size_t v : tree.nodes_at(s)) {
        w[v] = b.add_vars(d);
        add_eligible(b, m.eligible_at(s), w[v]);
      }
      for (const std::size_t v : tree.nodes_at(s)) {
        std::vector<AffineVec> rest;
        for (const std::size_t l : tree.leaves_under(v)) {
          AffineVec e;
          for (std::size_t i = 0; i < d; ++i) e.push_back(Affine::value(xs.at(tree, l)[i]) - Affine::var(w[v] + i));
          rest.push_back(std::move(e));
        }
        add_local_acceptance(b, spec.at(s), m, v, rest);
      }
      for (const std::size_t n : tree.nodes_at(t)) {
        std::vector<AffineVec> part;
        for (const std::size_t l : tree.leaves_under(n)) {
          AffineVec e;
          for (std::size_t i = 0; i < d; ++i) e.push_back(Affine::var(w[tree.ancestor_at(l, s)] + i));
          part.push_back(std::move(e));
        }
        add_local_acceptance(b, spec.at(t), m, n, part);
      }
      const bool decomposes = feasible(b.program(Affine{}));
      if (accepted != decomposes) {
        fail(rep, json{{"claim", claim_json(tree, xs)}, {"t", t}, {"accepted", accepted}, {"decomposes", decomposes}},
             is_acceptable(spec.at(t), xs, m, t) == accepted, "acceptance set is not the sum A_s + A_{t,s}");
      }
    }

    // (c) R_s(X) covered by the R_s(Y_j) implies R_t(X) covered by the R_t(Y_j).
    for (int t = 0; t < T; ++t) {
      const int s = t + 1;
      std::vector<AdaptedVector> ys;
      for (int j = 0; j < 3; ++j) {
        AdaptedVector shift = random_eligible(rng, m, s, 1);
        if (j == 0 && rng() % 2 == 0) {
          for (auto& v : shift.values) {
            for (auto& e : v) e = -abs(e);
          }
        }
        ys.push_back(add_lifted(tree, x, shift));
      }
      std::vector<Polyhedron> cover_s, cover_t;
      for (const auto& y : ys) {
        cover_s.push_back(product_set(risk_measure(spec.at(s), y, m, s)));
        cover_t.push_back(product_set(risk_measure(spec.at(t), y, m, t)));
      }
      if (!contains_union(cover_s, product_set(risk_measure(spec.at(s), x, m, s)))) continue;
      ++rep.cases;
      const RiskResult rt = risk_measure(spec.at(t), x, m, t);
      const Polyhedron big = product_set(rt);
      if (!contains_union(cover_t, big)) {
        json w{{"claim", claim_json(tree, x)}, {"t", t}, {"family", json::array()}};
        for (const auto& y : ys) w["family"].push_back(claim_json(tree, y));
        // Look for an uncovered point and confirm it node by node.
        bool verified = false;
        for (const auto& c : cover_t) {
          const auto p = point_outside(c, big);
          if (!p || std::any_of(cover_t.begin(), cover_t.end(), [&](const Polyhedron& q) { return q.contains(*p); })) {
            continue;
          }
          w["point"] = vec_json(*p);
          verified = true;
          break;
        }
        fail(rep, std::move(w), verified, "covering at s does not propagate to t");
      }
    }
  }
  return rep;
}

CheckReport locality_check(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  CheckReport rep = make_report("locality", "", 0);
  const ScenarioTree& tree = m.tree;
  const RiskResult r = risk_measure(spec, x, m, t);
  for (const std::size_t n : tree.nodes_at(t)) {
    ++rep.cases;
    const AdaptedVector local = restrict_to(tree, x, n);
    const RiskResult rl = risk_measure(spec, local, m, t);
    const Polyhedron& a = r.at(tree, n);
    const Polyhedron& b = rl.at(tree, n);
    std::optional<Vec> p = point_outside(b, a);
    if (!p) p = point_outside(a, b);
    if (p) {
      const bool in_x = node_member(spec, x, m, t, n, *p);
      const bool in_local = node_member(spec, local, m, t, n, *p);
      fail(rep,
           json{{"node", tree.node(n).id}, {"point", vec_json(*p)}, {"claim", claim_json(tree, x)},
                {"in_value", in_x}, {"in_local_value", in_local}},
           in_x != in_local, "the value at a node depends on the claim outside it");
    }
  }
  return rep;
}

std::vector<CheckReport> property_suite(const AcceptanceSpec& spec, const MarketModel& m,
                                        const std::string& instance, std::uint64_t seed, std::size_t cases) {
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  const auto times = allowed_times(spec, tree);
  Rng rng(seed);
  auto pick_time = [&] { return times[rng() % times.size()]; };

  CheckReport mono = make_report("monotonicity", instance, seed);
  CheckReport trans = make_report("translativity", instance, seed);
  CheckReport conv = make_report("conditional_convexity", instance, seed);
  CheckReport homog = make_report("positive_homogeneity", instance, seed);
  CheckReport norm = make_report("normalization", instance, seed);
  CheckReport local = make_report("locality", instance, seed);
  CheckReport decomp = make_report("decomposability", instance, seed);
  CheckReport select = make_report("selector_equivalence", instance, seed);

  std::map<int, RiskResult> at_zero;
  for (const int t : times) at_zero[t] = risk_measure(spec, constant_claim(tree, zeros(d)), m, t);
  const std::vector<Rational> factors{Rational(1, 2), Rational(2), Rational(3)};

  auto merge = [](CheckReport& into, const CheckReport& from) {
    into.cases += from.cases;
    if (!from.pass) fail(into, from.witness, from.witness_verified, from.details);
  };

  for (std::size_t c = 0; c < cases; ++c) {
    const int t = pick_time();
    const auto& nodes = tree.nodes_at(t);
    const AdaptedVector x = random_claim(rng, tree);
    const RiskResult rx = risk_measure(spec, x, m, t);

    {  // Y >= X implies R_t(Y) contains R_t(X).
      std::vector<Vec> bump;
      for (std::size_t k = 0; k < tree.num_leaves(); ++k) {
        Vec v = random_vec(rng, d, 2);
        for (auto& e : v) e = abs(e);
        bump.push_back(std::move(v));
      }
      const AdaptedVector y = x + adapted_from(tree, tree.horizon(), bump);
      const RiskResult ry = risk_measure(spec, y, m, t);
      ++mono.cases;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (auto p = point_outside(ry.nodes[k], rx.nodes[k])) {
          fail(mono, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"x", claim_json(tree, x)},
                          {"y", claim_json(tree, y)}},
               node_member(spec, x, m, t, nodes[k], *p) && !node_member(spec, y, m, t, nodes[k], *p),
               "a larger claim has a smaller risk set");
        }
      }
    }
    {  // R_t(X + m) = R_t(X) - m.
      const AdaptedVector shift = random_eligible(rng, m, t);
      const AdaptedVector xm = add_lifted(tree, x, shift);
      const RiskResult r = risk_measure(spec, xm, m, t);
      ++trans.cases;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Polyhedron expect = translate(rx.nodes[k], negate(shift.values[k]));
        std::optional<Vec> p = point_outside(expect, r.nodes[k]);
        if (!p) p = point_outside(r.nodes[k], expect);
        if (p) {
          fail(trans, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"x", claim_json(tree, x)},
                           {"m", claim_json(tree, shift)}},
               node_member(spec, xm, m, t, nodes[k], *p) !=
                   node_member(spec, x, m, t, nodes[k], add(*p, shift.values[k])),
               "translation by an eligible portfolio is not exact");
        }
      }
    }
    {  // Node-wise lambda mixtures.
      const AdaptedVector y = random_claim(rng, tree);
      const RiskResult ry = risk_measure(spec, y, m, t);
      Vec lambda;
      for (std::size_t k = 0; k < nodes.size(); ++k) lambda.push_back(ratio(static_cast<long>(rng() % 7), 6));
      const AdaptedVector z = mix(tree, x, y, lambda, t);
      const RiskResult rz = risk_measure(spec, z, m, t);
      ++conv.cases;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Polyhedron left = minkowski_sum(scale(rx.nodes[k], lambda[k]), scale(ry.nodes[k], 1 - lambda[k]));
        if (auto p = point_outside(rz.nodes[k], left)) {
          fail(conv, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"lambda", to_string(lambda[k])},
                          {"x", claim_json(tree, x)}, {"y", claim_json(tree, y)}},
               !node_member(spec, z, m, t, nodes[k], *p), "a mixture of risk sets leaves the risk set of the mixture");
        }
      }
    }
    if (spec.conical()) {
      const Rational f = factors[c % factors.size()];
      const RiskResult r = risk_measure(spec, f * x, m, t);
      ++homog.cases;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Polyhedron expect = scale(rx.nodes[k], f);
        std::optional<Vec> p = point_outside(expect, r.nodes[k]);
        if (!p) p = point_outside(r.nodes[k], expect);
        if (p) {
          fail(homog, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"factor", to_string(f)},
                           {"x", claim_json(tree, x)}},
               node_member(spec, f * x, m, t, nodes[k], *p) != node_member(spec, x, m, t, nodes[k], scale(*p, 1 / f)),
               "scaling the claim does not scale the risk set");
        }
      }
    }
    {  // R_t(X) + R_t(0) = R_t(X).
      ++norm.cases;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Polyhedron sum = minkowski_sum(rx.nodes[k], at_zero[t].nodes[k]);
        if (auto p = point_outside(rx.nodes[k], sum)) {
          fail(norm, json{{"node", tree.node(nodes[k]).id}, {"point", vec_json(*p)}, {"x", claim_json(tree, x)}},
               !node_member(spec, x, m, t, nodes[k], *p), "adding the value at zero enlarges the risk set");
        }
      }
    }
    {
      CheckReport l = locality_check(spec, x, m, t);
      l.cases = 1;
      merge(local, l);
    }
    {
      std::vector<NodePartition> parts{{nodes}};
      NodePartition singletons;
      for (const std::size_t n : nodes) singletons.push_back({n});
      if (nodes.size() > 1) parts.push_back(singletons);
      CheckReport dr = check_decomposability(rx, m, parts, rng(), 2);
      dr.cases = 1;
      merge(decomp, dr);
    }
    {
      CheckReport sr = selector_equivalence(spec, x, m, t, rng(), 2);
      sr.cases = 1;
      merge(select, sr);
    }
  }
  std::vector<CheckReport> out{mono, trans, conv};
  if (spec.conical()) out.push_back(homog);
  for (auto* r : {&norm, &local, &decomp, &select}) out.push_back(*r);
  for (auto& r : out) r.instance = instance + "/" + spec.name();
  return out;
}

CheckReport stability_check(const AcceptanceSpec& outer, const AcceptanceSpec& inner, const MarketModel& m, int t,
                            int s) {
  CheckReport rep = make_report("dual_stability", "", 0);
  const StabilityReport st = check_dual_stability(outer, inner, m, t, s);
  rep.details = "t=" + std::to_string(t) + " s=" + std::to_string(s);
  for (const auto& n : st.nodes) {
    rep.cases += 1 + n.pastings_checked;
    if (n.lhs_in_rhs && n.rhs_in_lhs && n.pasting_ok) continue;
    json w{{"node", n.node}, {"lhs_in_rhs", n.lhs_in_rhs}, {"rhs_in_lhs", n.rhs_in_lhs}, {"pasting_ok", n.pasting_ok}};
    bool verified = false;
    if (n.witness_z && n.witness_y) {
      w["z"] = vec_json(*n.witness_z);
      w["y"] = vec_json(*n.witness_y);
      w["side"] = n.witness_side;
      // Recompute E[z·Y | n] from the tree.
      const std::size_t node = m.tree.index_of(n.node);
      const auto leaves = m.tree.leaves_under(node);
      Rational pairing = 0;
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        const Rational p = m.tree.conditional_prob(leaves[k], node);
        for (std::size_t i = 0; i < m.dim(); ++i) {
          pairing += p * (*n.witness_z)[k * m.dim() + i] * (*n.witness_y)[k * m.dim() + i];
        }
      }
      w["pairing"] = to_string(pairing);
      verified = sgn(pairing) < 0;
    }
    fail(rep, std::move(w), verified, rep.details + ": dual cones differ");
  }
  return rep;
}

CheckReport primal_dual_check(const AcceptanceSpec& spec, const MarketModel& m, std::uint64_t seed,
                              std::size_t claims) {
  CheckReport rep = make_report("primal_dual", "", seed);
  const DualSet duals = max_dual_set(spec, m);
  Rng rng(seed);
  for (std::size_t c = 0; c < claims; ++c) {
    ++rep.cases;
    const AdaptedVector x = random_claim(rng, m.tree);
    const RiskResult primal = risk_measure(spec, x, m, 0);
    const RiskResult dual = evaluate_dual(duals, x, m);
    if (const auto diff = difference(m, primal, dual)) {
      // Check the point against every dual halfspace directly.
      bool in_dual = m.eligible_at(0).contains(diff->point);
      for (const auto& v : duals.members) {
        const AdaptedVector e = conditional_expectation(m.tree, Rational(-1) * x, v.q, 0);
        in_dual = in_dual && dot(v.w, diff->point) >= dot(v.w, e.values[0]);
      }
      json w = difference_json(m, *diff);
      w["claim"] = claim_json(m.tree, x);
      fail(rep, std::move(w), node_member(spec, x, m, 0, diff->node, diff->point) != in_dual,
           "dual representation differs from the primal value");
    }
  }
  rep.details = std::to_string(duals.members.size()) + " dual generators";
  return rep;
}

std::vector<AcceptanceSpec> shipped_specs(const MarketModel& m) {
  const std::size_t d = m.dim();
  std::vector<ScalarComponent> tail(d, ScalarComponent::worst_case());
  tail[0] = ScalarComponent::avar(Rational(1, 2));
  return {AcceptanceSpec::regulator(), AcceptanceSpec::market_sum(),
          AcceptanceSpec::constructive(std::vector<ScalarComponent>(d, ScalarComponent::worst_case()), Exchange::None),
          AcceptanceSpec::constructive(std::move(tail), Exchange::Solvency)};
}

namespace {

bool time_consistent_kind(const AcceptanceSpec& spec) {
  return spec.kind == AcceptanceSpec::Kind::Regulator || spec.kind == AcceptanceSpec::Kind::MarketSum;
}

void tag(std::vector<CheckReport>& out, CheckReport r, const std::string& instance, const std::string& measure) {
  r.instance = instance;
  r.measure = measure;
  out.push_back(std::move(r));
}

}  // namespace

std::vector<CheckReport> run_suite(const std::string& suite, const MarketModel& m, const std::string& instance,
                                   const SuiteOptions& opt) {
  static const std::vector<std::string> known{"all",       "properties",     "mptc", "stability",
                                              "duality",   "counterexamples"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) throw InputError("unknown suite \"" + suite + "\"");
  const auto specs = opt.specs.empty() ? shipped_specs(m) : opt.specs;
  const bool all = suite == "all";
  std::vector<CheckReport> out;
  if (suite == "counterexamples") return counterexamples(m, instance, opt.seed);
  if (all || suite == "properties") {
    for (const auto& spec : specs) {
      for (auto& r : property_suite(spec, m, instance, opt.seed, opt.cases)) tag(out, std::move(r), instance, spec.name());
    }
  }
  if (all || suite == "mptc") {
    for (const auto& spec : specs) {
      if (!time_consistent_kind(spec)) continue;
      tag(out, mptc_check(DynamicSpec::uniform(spec, m), m, opt.seed, opt.claims), instance, spec.name());
    }
  }
  if (all || suite == "stability") {
    for (const auto& spec : specs) {
      if (!time_consistent_kind(spec)) continue;
      for (int t = 0; t < m.tree.horizon(); ++t) {
        for (int s = t + 1; s <= m.tree.horizon(); ++s) tag(out, stability_check(spec, spec, m, t, s), instance, spec.name());
      }
    }
  }
  if (all || suite == "duality") {
    for (const auto& spec : specs) {
      if (!time_consistent_kind(spec)) continue;
      tag(out, primal_dual_check(spec, m, opt.seed, opt.claims), instance, spec.name());
    }
  }
  return out;
}

std::vector<CheckReport> counterexamples(const MarketModel& m, const std::string& instance, std::uint64_t seed) {
  std::vector<CheckReport> out;
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  const int horizon = tree.horizon();
  if (horizon < 1) return out;

  // Regulator at the root, market sums afterwards.
  DynamicSpec hybrid{std::vector<AcceptanceSpec>(static_cast<std::size_t>(horizon) + 1, AcceptanceSpec::market_sum())};
  hybrid.per_time[0] = AcceptanceSpec::regulator();
  tag(out, mptc_check(hybrid, m, seed, 10), instance, hybrid.name());

  // With s = T the one-step market sum already holds K_T, so the pair is
  // only inconsistent when trading continues after s.
  if (horizon >= 2) {
    tag(out, stability_check(AcceptanceSpec::market_sum(), AcceptanceSpec::regulator(), m, 0, 1), instance,
        "outer market_sum, inner regulator");
  }

  const auto& leaves = tree.leaves();
  if (leaves.size() >= 2 && d >= 2) {
    // Couples the first asset of the first two leaves; eligible space span(e_1).
    const std::size_t dim = d * leaves.size();
    std::vector<Halfspace> rows;
    Vec a = zeros(dim);
    a[0] = 1;
    a[d] = 1;
    rows.push_back({a, 0});
    for (std::size_t k = 0; k < dim; ++k) {
      if (k != 0 && k != d) rows.push_back({unit(dim, k), 0});
    }
    std::vector<EligibleSpace> spaces = m.eligible;
    spaces.back() = EligibleSpace::first(d, 1);
    const MarketModel restricted = m.with_eligible(spaces);
    std::map<std::string, Vec> values;
    for (std::size_t k = 0; k < leaves.size(); ++k) values[tree.node(leaves[k]).id] = zeros(d);
    values[tree.node(leaves[0]).id] = Vec(d, Rational(1));
    Vec second = zeros(d);
    second[1] = -1;
    values[tree.node(leaves[1]).id] = second;
    const auto coupled = AcceptanceSpec::custom_set(Polyhedron::from_inequalities(dim, std::move(rows)));
    tag(out, locality_check(coupled, make_adapted(tree, horizon, values), restricted, horizon), instance,
        "custom coupled leaves");
  }

  const auto& nodes = tree.nodes_at(1);
  if (nodes.size() >= 2) {
    // The first two time-1 nodes carry equal positions; not closed under gluing.
    const std::size_t dim = d * nodes.size();
    std::vector<Halfspace> ineqs, eqs;
    for (std::size_t k = 0; k < dim; ++k) {
      if (k < d || k >= 2 * d) ineqs.push_back({unit(dim, k), 0});
    }
    for (std::size_t i = 0; i < d; ++i) eqs.push_back({sub(unit(dim, i), unit(dim, d + i)), 0});
    std::vector<std::vector<std::size_t>> singletons;
    for (const std::size_t n : nodes) singletons.push_back({n});
    const auto tied = Polyhedron::from_inequalities(dim, std::move(ineqs), std::move(eqs));
    tag(out, check_decomposability(tied, m, 1, {{nodes}, singletons}, seed), instance, "custom tied nodes");
  }
  return out;
}

}  // namespace setrisk
