#include "setrisk/market.hpp"

#include "setrisk/lp.hpp"

namespace setrisk {

SolvencyCone solvency_cone(const std::vector<Vec>& pi) {
  const std::size_t d = pi.size();
  if (d == 0) throw InputError("bid-ask matrix is empty");
  for (const auto& row : pi) {
    if (row.size() != d) throw InputError("bid-ask matrix must be square");
  }
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < d; ++i) {
    if (pi[i][i] != 1) throw InputError("bid-ask diagonal entries must equal 1");
    gens.push_back(unit(d, i));
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      if (sgn(pi[i][j]) < 0) throw InputError("bid-ask entries must be nonnegative");
      if (sgn(pi[i][j]) == 0) continue;
      if (sgn(pi[j][i]) > 0 && pi[i][j] * pi[j][i] < 1) {
        throw InputError("inconsistent bid-ask pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         "): product " + to_string(pi[i][j] * pi[j][i]) + " < 1");
      }
      Vec g = scale(unit(d, i), pi[i][j]);
      g[j] -= 1;
      gens.push_back(std::move(g));
    }
  }
  Cone k = Cone::from_generators(d, std::move(gens));
  if (k.set().is_whole()) throw InputError("solvency cone is the whole space");
  const bool proper = k.is_pointed();
  return SolvencyCone{std::move(k), proper};
}

SolvencyCone no_trade_cone(std::size_t d) { return SolvencyCone{Cone(Polyhedron::orthant(d)), true}; }

EligibleSpace::EligibleSpace(std::size_t d, std::vector<Vec> basis)
    : d_(d), basis_(std::move(basis)), subspace_(Polyhedron::point(zeros(d))), positive_(Polyhedron::point(zeros(d))) {
  for (const auto& b : basis_) {
    if (b.size() != d) throw InputError("eligible basis vector has wrong length");
  }
  subspace_ = Polyhedron::from_generators(d, {zeros(d)}, {}, basis_);
  positive_ = intersect(subspace_, Polyhedron::orthant(d));
  if (positive_.rays().empty()) throw InputError("eligible space has no nonzero nonnegative element");
}

EligibleSpace EligibleSpace::full(std::size_t d) {
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < d; ++i) basis.push_back(unit(d, i));
  return EligibleSpace(d, std::move(basis));
}

EligibleSpace EligibleSpace::first(std::size_t d, std::size_t n) {
  if (n < 1 || n > d) throw InputError("eligible asset count must lie in [1, d]");
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < n; ++i) basis.push_back(unit(d, i));
  return EligibleSpace(d, std::move(basis));
}

bool EligibleSpace::admits_weight(const Vec& w) const {
  if (w.size() != d_) return false;
  for (const auto& r : positive_.rays()) {
    if (sgn(dot(w, r)) < 0) return false;
  }
  for (const auto& b : basis_) {
    if (sgn(dot(w, b)) != 0) return true;
  }
  return false;
}

MarketModel::MarketModel(ScenarioTree t, std::vector<SolvencyCone> c, std::vector<EligibleSpace> e)
    : tree(std::move(t)), cones(std::move(c)), eligible(std::move(e)) {
  if (cones.size() != tree.size()) throw InputError("market needs one solvency cone per node");
  for (const auto& k : cones) {
    if (k.cone.dim() != tree.dim()) throw InputError("solvency cone dimension differs from the tree's");
    for (std::size_t i = 0; i < tree.dim(); ++i) {
      if (!k.cone.contains(unit(tree.dim(), i))) throw InputError("solvency cone does not contain the orthant");
    }
  }
  if (eligible.size() != static_cast<std::size_t>(tree.horizon()) + 1) {
    throw InputError("market needs one eligible space per time");
  }
  for (const auto& s : eligible) {
    if (s.dim() != tree.dim()) throw InputError("eligible space dimension differs from the tree's");
  }
}

bool MarketModel::frictionless_somewhere() const {
  for (const auto& k : cones) {
    if (!k.proper) return true;
  }
  return false;
}

MarketModel MarketModel::with_eligible(std::vector<EligibleSpace> spaces) const {
  return MarketModel(tree, cones, std::move(spaces));
}

bool k_order_geq(const MarketModel& m, const AdaptedVector& x, const AdaptedVector& y) {
  const auto& leaves = m.tree.leaves();
  check_adapted(m.tree, x);
  check_adapted(m.tree, y);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (!m.cone(leaves[k]).contains(sub(x.values[k], y.values[k]))) return false;
  }
  return true;
}

Rational k_norm(const MarketModel& m, const AdaptedVector& x, std::size_t n) {
  const std::size_t d = m.dim();
  if (n < 1 || n > d) throw InputError("k_norm: n must lie in [1, d]");
  if (x.time != m.tree.horizon()) throw InputError("k_norm: claim must be terminal");
  Vec one = zeros(d);
  for (std::size_t i = 0; i < n; ++i) one[i] = 1;
  Rational best = 0;
  const auto& leaves = m.tree.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const Polyhedron& cone = m.cone(leaves[k]).set();
    const Vec& v = x.values[k];
    Rational lo = 0;
    std::optional<Rational> hi;
    auto fail = [] { throw Error("k_norm: no finite bound exists for this claim"); };
    auto require = [&](const Rational& alpha, const Rational& beta, bool equality) {
      if (sgn(alpha) == 0) {
        if (equality ? sgn(beta) != 0 : sgn(beta) > 0) fail();
        return;
      }
      const Rational c = beta / alpha;
      if (equality) {
        if (c > lo) lo = c;
        if (!hi || c < *hi) hi = c;
      } else if (sgn(alpha) > 0) {
        if (c > lo) lo = c;
      } else if (!hi || c < *hi) {
        hi = c;
      }
    };
    for (const auto& h : cone.inequalities()) {
      const Rational alpha = dot(h.a, one);
      const Rational ax = dot(h.a, v);
      require(alpha, ax, false);
      require(alpha, -ax, false);
    }
    for (const auto& h : cone.equations()) {
      const Rational alpha = dot(h.a, one);
      const Rational ax = dot(h.a, v);
      require(alpha, ax, true);
      require(alpha, -ax, true);
    }
    if (hi && *hi < lo) fail();
    if (lo > best) best = lo;
  }
  return best;
}

std::optional<PriceSystem> find_consistent_price_system(const MarketModel& m) {
  const std::size_t d = m.dim();
  const ScenarioTree& tree = m.tree;
  const std::size_t nz = tree.size() * d;
  const std::size_t eps = nz;
  LinearProgram lp(nz + 1);
  auto var = [d](std::size_t node, std::size_t i) { return node * d + i; };
  for (std::size_t n = 0; n < tree.size(); ++n) {
    if (!tree.is_leaf(n)) {
      for (std::size_t i = 0; i < d; ++i) {
        Vec row = zeros(nz + 1);
        row[var(n, i)] = -1;
        for (const std::size_t c : tree.node(n).children) row[var(c, i)] = tree.node(c).branch_prob;
        lp.add_row(std::move(row), RowSense::Equal, 0);
      }
    }
    for (const auto& g : m.cone(n).rays()) {
      Vec row = zeros(nz + 1);
      for (std::size_t i = 0; i < d; ++i) row[var(n, i)] = g[i];
      row[eps] = -1;
      lp.add_row(std::move(row), RowSense::GreaterEqual, 0);
    }
    for (const auto& l : m.cone(n).lines()) {
      Vec row = zeros(nz + 1);
      for (std::size_t i = 0; i < d; ++i) row[var(n, i)] = l[i];
      lp.add_row(std::move(row), RowSense::Equal, 0);
    }
  }
  Vec norm = zeros(nz + 1);
  norm[var(tree.root(), 0)] = 1;
  lp.add_row(std::move(norm), RowSense::Equal, 1);
  Vec cap = zeros(nz + 1);
  cap[eps] = 1;
  lp.add_row(std::move(cap), RowSense::LessEqual, 1);
  lp.objective[eps] = -1;
  const LpResult r = solve(lp);
  if (r.status != LpStatus::Optimal || sgn(r.x[eps]) <= 0) return std::nullopt;
  PriceSystem ps;
  ps.slack = r.x[eps];
  for (std::size_t n = 0; n < tree.size(); ++n) {
    ps.z.emplace_back(r.x.begin() + static_cast<std::ptrdiff_t>(var(n, 0)),
                      r.x.begin() + static_cast<std::ptrdiff_t>(var(n, 0) + d));
  }
  return ps;
}

}  // namespace setrisk
