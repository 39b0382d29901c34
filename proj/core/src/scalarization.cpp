#include "setrisk/scalarization.hpp"

#include <set>

#include "setrisk/system.hpp"

namespace setrisk {

std::string to_string(const ExtendedValue& v) {
  switch (v.kind) {
    case ExtendedValue::Kind::MinusInfinity:
      return "-inf";
    case ExtendedValue::Kind::PlusInfinity:
      return "+inf";
    case ExtendedValue::Kind::Finite:
      break;
  }
  return to_string(v.value);
}

ExtendedValue scalarize(const Polyhedron& node_set, const Vec& w) {
  if (node_set.is_empty()) return ExtendedValue::plus_infinity();
  const LpMinResult r = lp_min(node_set, w);
  if (r.kind == LpMinResult::Kind::Unbounded) return ExtendedValue::minus_infinity();
  return ExtendedValue::finite(r.value);
}

ExtendedValue scalarize(const RiskResult& r, const Vec& w, const ScenarioTree& tree, std::size_t node) {
  if (tree.node(node).time != r.t) throw InputError("scalarize: node is not at the result's time");
  return scalarize(r.at(tree, node), w);
}

void check_weight(const MarketModel& m, int t, const Vec& w) {
  if (!m.eligible_at(t).admits_weight(w)) {
    throw InputError("weight " + to_string(w) + " is negative on eligible positive positions or orthogonal to them");
  }
}

std::vector<ExtendedValue> scalar_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const Vec& w,
                                       const MarketModel& m, int t) {
  if (t < 0 || t > m.tree.horizon()) throw InputError("scalar_risk: time out of range");
  if (x.time != m.tree.horizon()) throw InputError("claims must be measurable at the horizon");
  check_weight(m, t, w);
  const std::size_t d = m.dim();
  const auto& nodes = m.tree.nodes_at(t);
  std::vector<ExtendedValue> out;
  auto run = [](const SystemBuilder& b, const Affine& objective) {
    const LpResult r = solve(b.program(objective));
    if (r.status == LpStatus::Infeasible) return ExtendedValue::plus_infinity();
    if (r.status == LpStatus::Unbounded) return ExtendedValue::minus_infinity();
    return ExtendedValue::finite(r.value);
  };
  if (spec.kind == AcceptanceSpec::Kind::Custom) {
    // The joint system couples the nodes; minimise one node at a time.
    SystemBuilder b;
    std::map<std::size_t, std::size_t> u_first;
    for (const std::size_t n : nodes) {
      u_first[n] = b.add_vars(d);
      add_eligible(b, m.eligible_at(t), u_first[n]);
    }
    add_custom_acceptance(b, spec, m, shifted_claim(m, x, t, m.tree.root(), u_first));
    for (const std::size_t n : nodes) {
      Affine obj;
      for (std::size_t i = 0; i < d; ++i) obj += Affine::var(u_first[n] + i, w[i]);
      out.push_back(run(b, obj));
    }
    return out;
  }
  if (spec.kind == AcceptanceSpec::Kind::Constructive && t != 0) {
    throw InputError("constructive risk measures are evaluated at t = 0 only");
  }
  for (const std::size_t n : nodes) {
    SystemBuilder b;
    const std::size_t u = b.add_vars(d);
    add_eligible(b, m.eligible_at(t), u);
    add_local_acceptance(b, spec, m, n, shifted_claim(m, x, t, n, {{n, u}}));
    Affine obj;
    for (std::size_t i = 0; i < d; ++i) obj += Affine::var(u + i, w[i]);
    out.push_back(run(b, obj));
  }
  return out;
}

Reconstruction reconstruct(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t,
                           const std::vector<Vec>& weights) {
  if (weights.empty()) throw InputError("reconstruct: weight list is empty");
  const std::size_t d = m.dim();
  const auto& nodes = m.tree.nodes_at(t);
  std::vector<std::vector<Halfspace>> cuts(nodes.size());
  std::vector<bool> empty(nodes.size(), false);
  for (const auto& w : weights) {
    const auto values = scalar_risk(spec, x, w, m, t);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (values[k].kind == ExtendedValue::Kind::PlusInfinity) empty[k] = true;
      if (values[k].is_finite()) cuts[k].push_back(Halfspace{w, values[k].value});
    }
  }
  Reconstruction out;
  out.result.t = t;
  out.result.measure = spec.name() + "+reconstructed";
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (empty[k]) {
      out.result.nodes.push_back(Polyhedron::empty(d));
      continue;
    }
    Polyhedron p = Polyhedron::from_inequalities(d, cuts[k]);
    if (!m.eligible_at(t).is_full()) p = intersect(p, m.eligible_at(t).subspace());
    out.result.nodes.push_back(std::move(p));
  }
  annotate(out.result, m);
  const RiskResult truth = risk_measure(spec, x, m, t);
  out.exact = true;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (const auto w = point_outside(truth.nodes[k], out.result.nodes[k])) {
      out.exact = false;
      out.witness = *w;
      out.witness_node = nodes[k];
      break;
    }
  }
  return out;
}

std::vector<Vec> facet_normals(const RiskResult& r) {
  std::set<Vec> seen;
  std::vector<Vec> out;
  for (const auto& p : r.nodes) {
    if (p.is_empty()) continue;
    for (const auto& h : p.inequalities()) {
      const Vec n = primitive(h.a);
      if (seen.insert(n).second) out.push_back(n);
    }
  }
  return out;
}

Vec normalize_weight(const Vec& w) {
  Rational sum = 0;
  for (const auto& x : w) {
    if (sgn(x) < 0) throw InputError("weights must be nonnegative to normalise");
    sum += x;
  }
  if (sgn(sum) == 0) throw InputError("zero weight");
  return scale(w, 1 / sum);
}

std::vector<Vec> simplex_grid(std::size_t k) {
  if (k == 0) throw InputError("grid resolution must be positive");
  std::vector<Vec> out;
  for (std::size_t j = 0; j <= k; ++j) {
    const Rational a = ratio(static_cast<long>(j), static_cast<long>(k));
    out.push_back({a, 1 - a});
  }
  return out;
}

SuperhedgingPrice superhedging_price(const AdaptedVector& x, std::size_t asset, const MarketModel& m) {
  const std::size_t d = m.dim();
  if (asset >= d) throw InputError("asset index out of range");
  if (!find_consistent_price_system(m)) {
    throw InfeasibleModelError("no strictly consistent price system; superhedging prices are not meaningful");
  }
  const ScenarioTree& tree = m.tree;
  std::vector<EligibleSpace> spaces(m.eligible);
  spaces[0] = EligibleSpace(d, {unit(d, asset)});
  const MarketModel single = m.with_eligible(std::move(spaces));
  const auto primal = scalar_risk(AcceptanceSpec::market_sum(), Rational(-1) * x, unit(d, asset), single, 0);
  if (!primal[0].is_finite()) throw Error("superhedging primal LP is not finite: " + to_string(primal[0]));

  // max sum_w y(w)·X(w) s.t. sum_w y_i(w) = 1 and Z(n) = sum_{w below n} y(w) in K(n)^+.
  const auto& leaves = tree.leaves();
  const std::size_t nv = leaves.size() * d;
  LinearProgram lp(nv);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) lp.objective[k * d + i] = -x.values[k][i];
  }
  Vec norm = zeros(nv);
  for (std::size_t k = 0; k < leaves.size(); ++k) norm[k * d + asset] = 1;
  lp.add_row(norm, RowSense::Equal, 1);
  auto aggregate = [&](std::size_t n, const Vec& g) {
    Vec row = zeros(nv);
    for (const std::size_t l : tree.leaves_under(n)) {
      for (std::size_t i = 0; i < d; ++i) row[tree.node(l).position * d + i] = g[i];
    }
    return row;
  };
  for (std::size_t n = 0; n < tree.size(); ++n) {
    for (const auto& g : m.cone(n).rays()) lp.add_row(aggregate(n, g), RowSense::GreaterEqual, 0);
    for (const auto& l : m.cone(n).lines()) lp.add_row(aggregate(n, l), RowSense::Equal, 0);
  }
  const LpResult dual = solve(lp);
  if (dual.status != LpStatus::Optimal) throw Error("superhedging dual LP is not finite");
  SuperhedgingPrice out;
  out.primal = primal[0].value;
  out.dual = -dual.value;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    Vec z = zeros(d);
    for (const std::size_t l : tree.leaves_under(n)) {
      for (std::size_t i = 0; i < d; ++i) z[i] += dual.x[tree.node(l).position * d + i];
    }
    out.price_process.push_back(std::move(z));
  }
  if (out.primal != out.dual) {
    throw Error("superhedging duality gap: primal " + to_string(out.primal) + ", dual " + to_string(out.dual));
  }
  return out;
}

}  // namespace setrisk
