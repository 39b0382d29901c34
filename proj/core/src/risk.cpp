#include "setrisk/risk.hpp"

#include <algorithm>
#include <numeric>

#include "setrisk/system.hpp"

namespace setrisk {

ScalarComponent ScalarComponent::avar(const Rational& level) {
  if (sgn(level) <= 0 || level > 1) throw InputError("AVaR level must lie in (0,1]");
  return ScalarComponent{Kind::AVaR, level};
}

AcceptanceSpec AcceptanceSpec::regulator() { return AcceptanceSpec{}; }

AcceptanceSpec AcceptanceSpec::market_sum() {
  AcceptanceSpec s;
  s.kind = Kind::MarketSum;
  return s;
}

AcceptanceSpec AcceptanceSpec::constructive(std::vector<ScalarComponent> components, Exchange exchange) {
  AcceptanceSpec s;
  s.kind = Kind::Constructive;
  s.components = std::move(components);
  s.exchange = exchange;
  return s;
}

AcceptanceSpec AcceptanceSpec::custom_set(Polyhedron acceptance) {
  AcceptanceSpec s;
  s.kind = Kind::Custom;
  s.custom = std::move(acceptance);
  return s;
}

bool AcceptanceSpec::conical() const {
  if (kind == Kind::Custom) return custom && custom->is_cone();
  return true;
}

std::string AcceptanceSpec::name() const {
  switch (kind) {
    case Kind::Regulator:
      return "regulator";
    case Kind::MarketSum:
      return "market_sum";
    case Kind::Custom:
      return "custom";
    case Kind::Constructive: {
      std::string out = "constructive(";
      for (std::size_t i = 0; i < components.size(); ++i) {
        if (i > 0) out += ",";
        const auto& c = components[i];
        out += c.kind == ScalarComponent::Kind::WorstCase ? std::string("worst") : "avar(" + to_string(c.level) + ")";
      }
      out += exchange == Exchange::Solvency ? ";solvency)" : ";none)";
      return out;
    }
  }
  return "unknown";
}

bool equals(const RiskResult& a, const RiskResult& b) {
  if (a.t != b.t || a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    if (!equals(a.nodes[k], b.nodes[k])) return false;
  }
  return true;
}

bool contains_set(const RiskResult& big, const RiskResult& small) {
  if (big.t != small.t || big.nodes.size() != small.nodes.size()) return false;
  for (std::size_t k = 0; k < big.nodes.size(); ++k) {
    if (!contains_set(big.nodes[k], small.nodes[k])) return false;
  }
  return true;
}

void annotate(RiskResult& r, const MarketModel& m) {
  r.flags.clear();
  const auto& nodes = m.tree.nodes_at(r.t);
  const Polyhedron& plus = m.eligible_at(r.t).positive_part();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Polyhedron& p = r.nodes[k];
    const std::string& id = m.tree.node(nodes[k]).id;
    if (p.is_empty()) {
      r.flags.push_back("empty:" + id);
      continue;
    }
    if (equals(p, m.eligible_at(r.t).subspace())) r.flags.push_back("whole:" + id);
    for (const auto& ray : plus.rays()) {
      if (!p.recedes(ray)) {
        r.flags.push_back("not-upper:" + id);
        break;
      }
    }
  }
}

namespace {

void check_inputs(const AdaptedVector& x, const MarketModel& m, int t) {
  if (t < 0 || t > m.tree.horizon()) {
    throw InputError("time " + std::to_string(t) + " outside [0, " + std::to_string(m.tree.horizon()) + "]");
  }
  if (x.time != m.tree.horizon()) throw InputError("claims must be measurable at the horizon");
  check_adapted(m.tree, x);
}

Polyhedron restrict_to_eligible(const Polyhedron& p, const EligibleSpace& space) {
  return space.is_full() ? p : intersect(p, space.subspace());
}

RiskResult finish(RiskResult r, const MarketModel& m, std::string name) {
  r.measure = std::move(name);
  annotate(r, m);
  return r;
}

std::vector<std::size_t> first_coords(std::size_t d) {
  std::vector<std::size_t> keep(d);
  std::iota(keep.begin(), keep.end(), 0);
  return keep;
}

RiskResult projected_local(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t,
                           const ConeField* extra) {
  const std::size_t d = m.dim();
  RiskResult r;
  r.t = t;
  for (const std::size_t n : m.tree.nodes_at(t)) {
    SystemBuilder b;
    const std::size_t u = b.add_vars(d);
    add_eligible(b, m.eligible_at(t), u);
    add_local_acceptance(b, spec, m, n, shifted_claim(m, x, t, n, {{n, u}}), extra);
    r.nodes.push_back(project(b.build(), first_coords(d)));
  }
  return r;
}

RiskResult projected_custom(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  const std::size_t d = m.dim();
  const auto& nodes = m.tree.nodes_at(t);
  SystemBuilder b;
  std::map<std::size_t, std::size_t> u_first;
  for (const std::size_t n : nodes) {
    u_first[n] = b.add_vars(d);
    add_eligible(b, m.eligible_at(t), u_first[n]);
  }
  add_custom_acceptance(b, spec, m, shifted_claim(m, x, t, m.tree.root(), u_first));
  const LinearSystem sys = b.build();
  RiskResult r;
  r.t = t;
  for (const std::size_t n : nodes) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d; ++i) keep.push_back(u_first[n] + i);
    r.nodes.push_back(project(sys, keep));
  }
  return r;
}

}  // namespace

RiskResult risk_measure(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  check_inputs(x, m, t);
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  using Kind = AcceptanceSpec::Kind;
  switch (spec.kind) {
    case Kind::Regulator: {
      RiskResult r;
      r.t = t;
      for (const std::size_t n : tree.nodes_at(t)) {
        Vec h;
        for (std::size_t i = 0; i < d; ++i) {
          std::optional<Rational> worst;
          for (const std::size_t l : tree.leaves_under(n)) {
            const Rational loss = -x.at(tree, l)[i];
            if (!worst || loss > *worst) worst = loss;
          }
          h.push_back(*worst);
        }
        r.nodes.push_back(restrict_to_eligible(translate(Polyhedron::orthant(d), h), m.eligible_at(t)));
      }
      return finish(std::move(r), m, spec.name());
    }
    case Kind::MarketSum: {
      // D_T(w) = -X(w) + K_T(w); D_s(n) = (intersection over children) + K_s(n).
      std::vector<Polyhedron> level;
      for (const std::size_t l : tree.leaves()) level.push_back(translate(m.cone(l).set(), negate(x.at(tree, l))));
      for (int s = tree.horizon() - 1; s >= t; --s) {
        std::vector<Polyhedron> next;
        for (const std::size_t n : tree.nodes_at(s)) {
          std::vector<Polyhedron> kids;
          for (const std::size_t c : tree.node(n).children) kids.push_back(level[tree.node(c).position]);
          next.push_back(minkowski_sum(intersect_all(d, kids), m.cone(n).set()));
        }
        level = std::move(next);
      }
      RiskResult r;
      r.t = t;
      for (auto& p : level) r.nodes.push_back(restrict_to_eligible(p, m.eligible_at(t)));
      return finish(std::move(r), m, spec.name());
    }
    case Kind::Constructive: {
      if (t != 0) throw InputError("constructive risk measures are evaluated at t = 0 only");
      return constructive_risk(spec.components, spec.exchange, x, m);
    }
    case Kind::Custom:
      return finish(projected_custom(spec, x, m, t), m, spec.name());
  }
  throw Error("risk_measure: unknown spec");
}

RiskResult primal_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  check_inputs(x, m, t);
  if (spec.kind == AcceptanceSpec::Kind::Custom) return finish(projected_custom(spec, x, m, t), m, spec.name());
  return finish(projected_local(spec, x, m, t, nullptr), m, spec.name());
}

StepEvaluator stepped_risk(const AcceptanceSpec& spec, const MarketModel& m, int t) {
  using Kind = AcceptanceSpec::Kind;
  if (spec.kind != Kind::Regulator && spec.kind != Kind::MarketSum) {
    throw InputError("stepped evaluators exist for regulator and market_sum only");
  }
  if (t < 0 || t >= m.tree.horizon()) throw InputError("stepped_risk: t must lie in [0, T)");
  const bool market = spec.kind == Kind::MarketSum;
  return [&m, t, market](std::size_t n, const std::vector<Polyhedron>& succ) {
    const ScenarioTree& tree = m.tree;
    const std::size_t d = m.dim();
    if (tree.node(n).time != t) throw Error("step evaluator applied at a node of another time");
    const auto& kids = tree.node(n).children;
    if (succ.size() != kids.size()) throw Error("step evaluator needs one set per successor");
    std::vector<Polyhedron> parts;
    for (std::size_t j = 0; j < kids.size(); ++j) {
      parts.push_back(minkowski_sum(succ[j], market ? m.cone(kids[j]).set() : Polyhedron::orthant(d)));
    }
    Polyhedron v = intersect_all(d, parts);
    if (market) v = minkowski_sum(v, m.cone(n).set());
    return restrict_to_eligible(v, m.eligible_at(t));
  };
}

RiskResult terminal_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m) {
  return risk_measure(spec, x, m, m.tree.horizon());
}

std::vector<RiskResult> compose_with(const std::vector<StepEvaluator>& steps, const RiskResult& terminal,
                                     const MarketModel& m) {
  const ScenarioTree& tree = m.tree;
  const int T = tree.horizon();
  if (steps.size() < static_cast<std::size_t>(T)) throw Error("compose_with: one evaluator per time before T");
  std::vector<RiskResult> out(static_cast<std::size_t>(T) + 1);
  out[static_cast<std::size_t>(T)] = terminal;
  for (int t = T - 1; t >= 0; --t) {
    RiskResult r;
    r.t = t;
    r.measure = terminal.measure;
    const RiskResult& later = out[static_cast<std::size_t>(t) + 1];
    for (const std::size_t n : tree.nodes_at(t)) {
      std::vector<Polyhedron> succ;
      for (const std::size_t c : tree.node(n).children) succ.push_back(later.at(tree, c));
      r.nodes.push_back(steps[static_cast<std::size_t>(t)](n, succ));
    }
    annotate(r, m);
    out[static_cast<std::size_t>(t)] = std::move(r);
  }
  return out;
}

std::vector<RiskResult> compose_mptc(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m) {
  std::vector<StepEvaluator> steps;
  for (int t = 0; t < m.tree.horizon(); ++t) steps.push_back(stepped_risk(spec, m, t));
  return compose_with(steps, terminal_risk(spec, x, m), m);
}

ConeField solvency_field(const MarketModel& m) {
  ConeField f;
  for (std::size_t n = 0; n < m.tree.size(); ++n) f.emplace_back(m.cone(n));
  return f;
}

ConeField terminal_solvency_field(const MarketModel& m) {
  ConeField f(m.tree.size());
  for (const std::size_t l : m.tree.leaves()) f[l] = m.cone(l);
  return f;
}

RiskResult k_compatible_closure(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m,
                                const ConeField& field, int t) {
  check_inputs(x, m, t);
  using Kind = AcceptanceSpec::Kind;
  if (spec.kind != Kind::Regulator && spec.kind != Kind::MarketSum) {
    throw InputError("k_compatible_closure supports regulator and market_sum specs");
  }
  if (field.size() != m.tree.size()) throw InputError("cone field needs one entry per node");
  for (const auto& c : field) {
    if (c && c->dim() != m.dim()) throw InputError("cone field entry has the wrong dimension");
  }
  return finish(projected_local(spec, x, m, t, &field), m, spec.name() + "+closure");
}

RiskResult market_extension(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  RiskResult r = k_compatible_closure(spec, x, m, solvency_field(m), t);
  r.measure = spec.name() + "+market";
  return r;
}

RiskResult constructive_risk(const std::vector<ScalarComponent>& components, Exchange exchange,
                             const AdaptedVector& x, const MarketModel& m) {
  check_inputs(x, m, 0);
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  if (components.size() != d) throw InputError("constructive measure needs one component per asset");
  const auto& leaves = tree.leaves();
  SystemBuilder b;
  const std::size_t r = b.add_vars(d);
  std::vector<std::size_t> z(leaves.size());
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    z[k] = b.add_vars(d);
    AffineVec gap;  // X(w) - Z(w)
    for (std::size_t i = 0; i < d; ++i) gap.push_back(Affine::value(x.values[k][i]) - Affine::var(z[k] + i));
    if (exchange == Exchange::Solvency) {
      b.add_in(m.cone(leaves[k]).set(), gap);
    } else {
      for (const auto& e : gap) b.add_ge(e);
    }
  }
  Vec probs;
  for (const std::size_t l : leaves) probs.push_back(tree.node(l).prob);
  for (std::size_t i = 0; i < d; ++i) {
    const ScalarComponent& c = components[i];
    if (c.kind == ScalarComponent::Kind::WorstCase || c.level == 1) {
      for (std::size_t k = 0; k < leaves.size(); ++k) b.add_ge(Affine::var(r + i) + Affine::var(z[k] + i));
    } else {
      for (const auto& xi : avar_densities(probs, c.level)) {
        Affine e = Affine::var(r + i);
        for (std::size_t k = 0; k < leaves.size(); ++k) e += Affine::var(z[k] + i, probs[k] * xi[k]);
        b.add_ge(e);
      }
    }
  }
  RiskResult out;
  out.t = 0;
  out.nodes.push_back(restrict_to_eligible(project(b.build(), first_coords(d)), m.eligible_at(0)));
  return finish(std::move(out), m, AcceptanceSpec::constructive(components, exchange).name());
}

Rational evaluate_component(const ScalarComponent& c, const Vec& payoff, const Vec& probs) {
  if (payoff.empty() || payoff.size() != probs.size()) throw Error("evaluate_component: size mismatch");
  if (c.kind == ScalarComponent::Kind::WorstCase || c.level == 1) {
    Rational worst = -payoff[0];
    for (const auto& v : payoff) worst = std::max(worst, Rational(-v));
    return worst;
  }
  const Rational cap = 1 / (1 - c.level);
  std::vector<std::size_t> order(payoff.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return payoff[a] < payoff[b]; });
  Rational mass = 1;
  Rational value = 0;
  for (const std::size_t k : order) {
    if (sgn(mass) <= 0) break;
    const Rational take = std::min(mass, Rational(cap * probs[k]));
    value += take * -payoff[k];
    mass -= take;
  }
  return value;
}

bool is_acceptable(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t) {
  const RiskResult r = risk_measure(spec, x, m, t);
  const Vec origin = zeros(m.dim());
  return std::all_of(r.nodes.begin(), r.nodes.end(), [&](const Polyhedron& p) { return p.contains(origin); });
}

bool accepts(const AcceptanceSpec& spec, const AdaptedVector& x, const AdaptedVector& u, const MarketModel& m,
             int t) {
  check_inputs(x, m, t);
  if (u.time != t) throw InputError("accepts: u must be measurable at t");
  check_adapted(m.tree, u);
  for (const auto& v : u.values) {
    if (!m.eligible_at(t).contains(v)) return false;
  }
  const AdaptedVector y = add_lifted(m.tree, x, u);
  if (spec.kind == AcceptanceSpec::Kind::Custom) {
    SystemBuilder b;
    add_custom_acceptance(b, spec, m, shifted_claim(m, y, t, m.tree.root(), {}));
    return feasible(b.program(Affine{}));
  }
  for (const std::size_t n : m.tree.nodes_at(t)) {
    SystemBuilder b;
    add_local_acceptance(b, spec, m, n, shifted_claim(m, y, t, n, {}));
    if (!feasible(b.program(Affine{}))) return false;
  }
  return true;
}

}  // namespace setrisk
