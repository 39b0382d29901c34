#include "setrisk/system.hpp"

namespace setrisk {

Affine Affine::var(std::size_t j, const Rational& c) {
  Affine a;
  if (sgn(c) != 0) a.terms[j] = c;
  return a;
}

Affine Affine::value(const Rational& c) {
  Affine a;
  a.constant = c;
  return a;
}

Affine& Affine::operator+=(const Affine& o) {
  for (const auto& [j, c] : o.terms) {
    Rational& slot = terms[j];
    slot += c;
    if (sgn(slot) == 0) terms.erase(j);
  }
  constant += o.constant;
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  for (const auto& [j, c] : o.terms) {
    Rational& slot = terms[j];
    slot -= c;
    if (sgn(slot) == 0) terms.erase(j);
  }
  constant -= o.constant;
  return *this;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }

Affine operator*(const Rational& c, Affine a) {
  if (sgn(c) == 0) return Affine{};
  for (auto& [j, v] : a.terms) v *= c;
  a.constant *= c;
  return a;
}

Rational evaluate(const Affine& e, const Vec& x) {
  Rational v = e.constant;
  for (const auto& [j, c] : e.terms) v += c * x[j];
  return v;
}

std::size_t SystemBuilder::add_vars(std::size_t count) {
  const std::size_t first = num_vars_;
  num_vars_ += count;
  return first;
}

void SystemBuilder::add_ge(const Affine& e) { ge_.push_back(e); }
void SystemBuilder::add_eq(const Affine& e) { eq_.push_back(e); }

void SystemBuilder::add_in(const Polyhedron& set, const AffineVec& v) {
  if (v.size() != set.dim()) throw Error("add_in: dimension mismatch");
  if (set.is_empty()) {
    add_ge(Affine::value(-1));
    return;
  }
  auto row = [&](const Halfspace& h) {
    Affine e = Affine::value(-h.b);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (sgn(h.a[i]) != 0) e += h.a[i] * v[i];
    }
    return e;
  };
  for (const auto& h : set.inequalities()) add_ge(row(h));
  for (const auto& h : set.equations()) add_eq(row(h));
}

LinearSystem SystemBuilder::build() const {
  LinearSystem s;
  s.num_vars = num_vars_;
  auto dense = [&](const Affine& e) {
    Halfspace h{zeros(num_vars_), -e.constant};
    for (const auto& [j, c] : e.terms) h.a[j] = c;
    return h;
  };
  for (const auto& e : ge_) s.ineqs.push_back(dense(e));
  for (const auto& e : eq_) s.eqs.push_back(dense(e));
  return s;
}

LinearProgram SystemBuilder::program(const Affine& objective) const {
  LinearProgram lp(num_vars_);
  for (const auto& [j, c] : objective.terms) lp.objective[j] = c;
  const LinearSystem s = build();
  for (const auto& h : s.ineqs) lp.add_row(h.a, RowSense::GreaterEqual, h.b);
  for (const auto& h : s.eqs) lp.add_row(h.a, RowSense::Equal, h.b);
  return lp;
}

std::vector<Vec> avar_densities(const Vec& probs, const Rational& level) {
  if (level <= 0 || level >= 1) throw Error("avar_densities: level must lie in (0,1)");
  const Rational cap = 1 / (1 - level);
  const std::size_t n = probs.size();
  std::vector<Halfspace> ineqs;
  for (std::size_t k = 0; k < n; ++k) {
    ineqs.push_back(Halfspace{unit(n, k), Rational(0)});
    ineqs.push_back(Halfspace{scale(unit(n, k), -1), -cap});
  }
  const auto poly = Polyhedron::from_inequalities(n, std::move(ineqs), {Halfspace{probs, Rational(1)}});
  return poly.vertices();
}

namespace {

AffineVec cone_vars(SystemBuilder& b, const Cone& cone) {
  const std::size_t d = cone.dim();
  const std::size_t first = b.add_vars(d);
  AffineVec v;
  for (std::size_t i = 0; i < d; ++i) v.push_back(Affine::var(first + i));
  b.add_in(cone.set(), v);
  return v;
}

void subtract_into(AffineVec& target, const AffineVec& v) {
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= v[i];
}

}  // namespace

void add_local_acceptance(SystemBuilder& b, const AcceptanceSpec& spec, const MarketModel& m, std::size_t n,
                          const std::vector<AffineVec>& y, const ConeField* extra) {
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  const auto leaves = tree.leaves_under(n);
  if (y.size() != leaves.size()) throw Error("add_local_acceptance: one expression per leaf required");
  using Kind = AcceptanceSpec::Kind;

  if (spec.kind == Kind::Custom) throw Error("add_local_acceptance: custom specs are global");

  if (spec.kind == Kind::Constructive) {
    if (extra) throw Error("constructive specs take their exchanges from the acceptance spec");
    if (spec.components.size() != d) throw InputError("constructive spec needs one component per asset");
    std::vector<AffineVec> z(leaves.size());
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      const std::size_t first = b.add_vars(d);
      for (std::size_t i = 0; i < d; ++i) z[k].push_back(Affine::var(first + i));
      AffineVec diff = y[k];
      subtract_into(diff, z[k]);
      if (spec.exchange == Exchange::Solvency) {
        b.add_in(m.cone(leaves[k]).set(), diff);
      } else {
        for (const auto& e : diff) b.add_ge(e);
      }
    }
    Vec probs;
    for (const std::size_t l : leaves) probs.push_back(tree.conditional_prob(l, n));
    for (std::size_t i = 0; i < d; ++i) {
      const ScalarComponent& c = spec.components[i];
      if (c.kind == ScalarComponent::Kind::WorstCase || c.level == 1) {
        for (std::size_t k = 0; k < leaves.size(); ++k) b.add_ge(z[k][i]);
      } else {
        for (const auto& xi : avar_densities(probs, c.level)) {
          Affine e;
          for (std::size_t k = 0; k < leaves.size(); ++k) e += (probs[k] * xi[k]) * z[k][i];
          b.add_ge(e);
        }
      }
    }
    return;
  }

  const bool market = spec.kind == Kind::MarketSum;
  // Trades chosen at each internal node of the subtree, summed along paths.
  std::map<std::size_t, AffineVec> trade;
  const int t0 = tree.node(n).time;
  for (int t = t0; t < tree.horizon(); ++t) {
    for (const std::size_t v : tree.descendants_at(n, t)) {
      AffineVec total(d);
      if (market) {
        const AffineVec k = cone_vars(b, m.cone(v));
        for (std::size_t i = 0; i < d; ++i) total[i] += k[i];
      }
      if (extra && (*extra)[v]) {
        const AffineVec k = cone_vars(b, *(*extra)[v]);
        for (std::size_t i = 0; i < d; ++i) total[i] += k[i];
      }
      trade[v] = std::move(total);
    }
  }
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const std::size_t leaf = leaves[k];
    AffineVec rest = y[k];
    for (std::size_t v = leaf; v != n;) {
      v = *tree.node(v).parent;
      subtract_into(rest, trade[v]);
      if (v == n) break;
    }
    if (extra && (*extra)[leaf]) subtract_into(rest, cone_vars(b, *(*extra)[leaf]));
    if (market) {
      b.add_in(m.cone(leaf).set(), rest);
    } else {
      for (const auto& e : rest) b.add_ge(e);
    }
  }
}

void add_custom_acceptance(SystemBuilder& b, const AcceptanceSpec& spec, const MarketModel& m,
                           const std::vector<AffineVec>& y) {
  if (spec.kind != AcceptanceSpec::Kind::Custom || !spec.custom) throw Error("add_custom_acceptance: not a custom spec");
  const std::size_t d = m.dim();
  if (y.size() != m.tree.num_leaves()) throw Error("add_custom_acceptance: one expression per leaf required");
  if (spec.custom->dim() != d * y.size()) throw InputError("custom acceptance set has the wrong dimension");
  AffineVec flat;
  for (const auto& v : y) flat.insert(flat.end(), v.begin(), v.end());
  b.add_in(*spec.custom, flat);
}

std::vector<AffineVec> shifted_claim(const MarketModel& m, const AdaptedVector& x, int t, std::size_t n,
                                     const std::map<std::size_t, std::size_t>& u_first) {
  const ScenarioTree& tree = m.tree;
  std::vector<AffineVec> y;
  for (const std::size_t l : tree.leaves_under(n)) {
    const std::size_t a = tree.ancestor_at(l, t);
    const Vec& xv = x.at(tree, l);
    AffineVec e;
    for (std::size_t i = 0; i < m.dim(); ++i) {
      Affine ai = Affine::value(xv[i]);
      if (const auto it = u_first.find(a); it != u_first.end()) ai += Affine::var(it->second + i);
      e.push_back(std::move(ai));
    }
    y.push_back(std::move(e));
  }
  return y;
}

void add_eligible(SystemBuilder& b, const EligibleSpace& space, std::size_t first) {
  if (space.is_full()) return;
  AffineVec u;
  for (std::size_t i = 0; i < space.dim(); ++i) u.push_back(Affine::var(first + i));
  b.add_in(space.subspace(), u);
}

}  // namespace setrisk
