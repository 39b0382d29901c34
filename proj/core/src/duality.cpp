#include "setrisk/duality.hpp"

#include <numeric>

#include "setrisk/system.hpp"

namespace setrisk {

namespace {

using Kind = AcceptanceSpec::Kind;

// Local leaf index within the subtree at n.
std::map<std::size_t, std::size_t> local_leaf_index(const ScenarioTree& tree, std::size_t n) {
  std::map<std::size_t, std::size_t> idx;
  const auto leaves = tree.leaves_under(n);
  for (std::size_t k = 0; k < leaves.size(); ++k) idx[leaves[k]] = k;
  return idx;
}

// Pairing weight of each coordinate: P(leaf | n), repeated d times.
Vec pairing_weights(const MarketModel& m, std::size_t n) {
  Vec out;
  for (const std::size_t l : m.tree.leaves_under(n)) {
    for (std::size_t i = 0; i < m.dim(); ++i) out.push_back(m.tree.conditional_prob(l, n));
  }
  return out;
}

Vec hadamard(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// Generators of a cone as a list of rays with both orientations of lines.
std::vector<Vec> all_directions(const Polyhedron& cone) {
  std::vector<Vec> out = cone.rays();
  for (const auto& l : cone.lines()) {
    out.push_back(l);
    out.push_back(negate(l));
  }
  return out;
}

Cone dual_with_weights(const Polyhedron& cone, const Vec& weights) {
  if (!cone.is_cone()) throw InputError("dual of a set that is not a cone");
  std::vector<Vec> normals, eqs;
  for (const auto& r : cone.rays()) normals.push_back(hadamard(r, weights));
  for (const auto& l : cone.lines()) eqs.push_back(hadamard(l, weights));
  return Cone::from_inequalities(cone.dim(), std::move(normals), std::move(eqs));
}

std::size_t coordinate_count(const EligibleSpace& space) {
  const std::size_t d = space.dim();
  for (std::size_t n = 1; n <= d; ++n) {
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < n; ++i) basis.push_back(unit(d, i));
    const auto candidate = Polyhedron::from_generators(d, {zeros(d)}, {}, basis);
    if (equals(candidate, space.subspace())) return n;
  }
  throw InputError("dual stability requires eligible spaces of the form R^n x {0}");
}

}  // namespace

Polyhedron acceptance_set_from(const AcceptanceSpec& spec, const MarketModel& m, std::size_t n, int from) {
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  const auto idx = local_leaf_index(tree, n);
  const std::size_t dim = d * idx.size();
  switch (spec.kind) {
    case Kind::Regulator:
      return Polyhedron::orthant(dim);
    case Kind::MarketSum: {
      std::vector<Vec> rays, lines;
      auto spread = [&](std::size_t v, const Vec& g) {
        Vec y = zeros(dim);
        for (const std::size_t l : tree.leaves_under(v)) {
          for (std::size_t i = 0; i < d; ++i) y[idx.at(l) * d + i] = g[i];
        }
        return y;
      };
      const int start = std::max(from, tree.node(n).time);
      for (int t = start; t <= tree.horizon(); ++t) {
        for (const std::size_t v : tree.descendants_at(n, t)) {
          for (const auto& g : m.cone(v).rays()) rays.push_back(spread(v, g));
          for (const auto& g : m.cone(v).lines()) lines.push_back(spread(v, g));
        }
      }
      return Polyhedron::from_generators(dim, {zeros(dim)}, std::move(rays), std::move(lines));
    }
    case Kind::Custom:
      if (n != tree.root() || from != 0 || !spec.custom) throw InputError("custom acceptance sets live at the root");
      return *spec.custom;
    case Kind::Constructive:
      break;
  }
  throw InputError("acceptance sets are materialised for regulator, market_sum and custom specs");
}

Polyhedron acceptance_set(const AcceptanceSpec& spec, const MarketModel& m, std::size_t n) {
  return acceptance_set_from(spec, m, n, m.tree.node(n).time);
}

Cone dual_acceptance_cone(const Polyhedron& acceptance, const MarketModel& m, std::size_t n) {
  const Vec weights = pairing_weights(m, n);
  if (acceptance.dim() != weights.size()) throw InputError("acceptance set has the wrong dimension");
  return dual_with_weights(acceptance, weights);
}

std::optional<DualVariable> factor(const ScenarioTree& tree, const Vec& z) {
  const std::size_t d = tree.dim();
  const auto& leaves = tree.leaves();
  if (z.size() != d * leaves.size()) throw Error("factor: density has the wrong length");
  for (const auto& v : z) {
    if (sgn(v) < 0) return std::nullopt;
  }
  DualVariable out;
  out.z = z;
  out.w = zeros(d);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) out.w[i] += tree.node(leaves[k]).prob * z[k * d + i];
  }
  out.q.weights.assign(d, Vec(leaves.size()));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      const Rational p = tree.node(leaves[k]).prob;
      out.q.weights[i][k] = sgn(out.w[i]) > 0 ? p * z[k * d + i] / out.w[i] : p;
    }
  }
  return out;
}

Vec product_density(const ScenarioTree& tree, const VectorMeasure& q, const Vec& w) {
  const std::size_t d = tree.dim();
  const auto& leaves = tree.leaves();
  Vec z(d * leaves.size());
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) z[k * d + i] = w[i] * q.weights[i][k] / tree.node(leaves[k]).prob;
  }
  return z;
}

DualSet max_dual_set(const AcceptanceSpec& spec, const MarketModel& m) {
  if (!spec.conical()) throw InputError("max_dual_set needs a conical acceptance set");
  const Polyhedron a = acceptance_set(spec, m, m.tree.root());
  const Cone dual = dual_acceptance_cone(a, m, m.tree.root());
  DualSet out;
  out.maximal = true;
  out.rays = all_directions(dual.set());
  for (std::size_t r = 0; r < out.rays.size(); ++r) {
    auto v = factor(m.tree, out.rays[r]);
    if (!v || !m.eligible_at(0).admits_weight(v->w)) {
      ++out.dropped;
      continue;
    }
    v->source_ray = r;
    out.members.push_back(std::move(*v));
  }
  return out;
}

RiskResult evaluate_dual(const DualSet& duals, const AdaptedVector& x, const MarketModel& m) {
  const std::size_t d = m.dim();
  const AdaptedVector loss = Rational(-1) * x;
  std::vector<Halfspace> cuts;
  for (const auto& v : duals.members) {
    const AdaptedVector e = conditional_expectation(m.tree, loss, v.q, 0);
    cuts.push_back(Halfspace{v.w, dot(v.w, e.values[0])});
  }
  Polyhedron p = Polyhedron::from_inequalities(d, std::move(cuts));
  if (!m.eligible_at(0).is_full()) p = intersect(p, m.eligible_at(0).subspace());
  RiskResult r;
  r.t = 0;
  r.measure = "dual";
  r.nodes.push_back(std::move(p));
  annotate(r, m);
  return r;
}

Polyhedron penalty(const Polyhedron& acceptance, const VectorMeasure& q, const Vec& w, const MarketModel& m) {
  const std::size_t d = m.dim();
  const std::size_t leaves = m.tree.num_leaves();
  check_measure(m.tree, q);
  if (acceptance.dim() != d * leaves) throw InputError("acceptance set has the wrong dimension");
  SystemBuilder b;
  const std::size_t y = b.add_vars(d);
  const std::size_t z = b.add_vars(d * leaves);
  AffineVec zv;
  for (std::size_t j = 0; j < d * leaves; ++j) zv.push_back(Affine::var(z + j));
  b.add_in(acceptance, zv);
  for (std::size_t i = 0; i < d; ++i) {
    Affine e = Affine::var(y + i, -1);
    for (std::size_t k = 0; k < leaves; ++k) e += Affine::var(z + k * d + i, q.weights[i][k]);
    b.add_eq(e);
  }
  std::vector<std::size_t> keep(d);
  std::iota(keep.begin(), keep.end(), y);
  const Polyhedron image = project(b.build(), keep);
  const Polyhedron gamma = Polyhedron::from_inequalities(d, {Halfspace{w, Rational(0)}});
  Polyhedron out = minkowski_sum(image, gamma);
  if (!m.eligible_at(0).is_full()) out = intersect(out, m.eligible_at(0).subspace());
  return out;
}

Polyhedron penalty(const AcceptanceSpec& spec, const VectorMeasure& q, const Vec& w, const MarketModel& m) {
  return penalty(acceptance_set(spec, m, m.tree.root()), q, w, m);
}

StabilityReport check_dual_stability(const AcceptanceSpec& outer, const AcceptanceSpec& inner, const MarketModel& m,
                                     int t, int s) {
  const ScenarioTree& tree = m.tree;
  const std::size_t d = m.dim();
  if (t < 0 || s <= t || s > tree.horizon()) throw InputError("dual stability needs 0 <= t < s <= T");
  std::vector<std::size_t> coords;
  for (int r = 0; r <= tree.horizon(); ++r) coords.push_back(coordinate_count(m.eligible_at(r)));
  const std::size_t ns = coords[static_cast<std::size_t>(s)];

  StabilityReport report;
  report.t = t;
  report.s = s;
  report.holds = true;
  for (const std::size_t n : tree.nodes_at(t)) {
    StabilityNodeReport nr;
    nr.node = tree.node(n).id;
    const auto leaves = tree.leaves_under(n);
    const auto idx = local_leaf_index(tree, n);
    const std::size_t dim = d * leaves.size();
    const auto snodes = tree.descendants_at(n, s);
    const std::size_t sdim = d * snodes.size();

    const Polyhedron a_t = acceptance_set_from(outer, m, n, t);
    const Polyhedron a_s = acceptance_set_from(inner, m, n, s);
    const Cone lhs = dual_acceptance_cone(a_t, m, n);
    const Cone a_s_dual = dual_acceptance_cone(a_s, m, n);

    // A_t ∩ L(F_s), M_s-valued, in s-node coordinates.
    std::vector<Halfspace> ts_ineqs, ts_eqs;
    auto substitute = [&](const Halfspace& h) {
      Halfspace out{zeros(sdim), h.b};
      for (std::size_t j = 0; j < snodes.size(); ++j) {
        for (const std::size_t l : tree.leaves_under(snodes[j])) {
          for (std::size_t i = 0; i < d; ++i) out.a[j * d + i] += h.a[idx.at(l) * d + i];
        }
      }
      return out;
    };
    for (const auto& h : a_t.inequalities()) ts_ineqs.push_back(substitute(h));
    for (const auto& h : a_t.equations()) ts_eqs.push_back(substitute(h));
    for (std::size_t j = 0; j < snodes.size(); ++j) {
      for (std::size_t i = ns; i < d; ++i) ts_eqs.push_back(Halfspace{unit(sdim, j * d + i), Rational(0)});
    }
    const Polyhedron a_ts = Polyhedron::from_inequalities(sdim, std::move(ts_ineqs), std::move(ts_eqs));
    Vec s_weights;
    for (const std::size_t v : snodes) {
      for (std::size_t i = 0; i < d; ++i) s_weights.push_back(tree.conditional_prob(v, n));
    }
    const Cone a_ts_dual = dual_with_weights(a_ts, s_weights);

    // E_s[z] as a linear map from leaf to s-node coordinates.
    auto lift_row = [&](const Vec& c) {
      Vec row = zeros(dim);
      for (std::size_t j = 0; j < snodes.size(); ++j) {
        for (const std::size_t l : tree.leaves_under(snodes[j])) {
          const Rational p = tree.conditional_prob(l, snodes[j]);
          for (std::size_t i = 0; i < d; ++i) row[idx.at(l) * d + i] = c[j * d + i] * p;
        }
      }
      return row;
    };
    std::vector<Halfspace> rhs_ineqs = a_s_dual.set().inequalities();
    std::vector<Halfspace> rhs_eqs = a_s_dual.set().equations();
    for (const auto& h : a_ts_dual.set().inequalities()) rhs_ineqs.push_back(Halfspace{lift_row(h.a), Rational(0)});
    for (const auto& h : a_ts_dual.set().equations()) rhs_eqs.push_back(Halfspace{lift_row(h.a), Rational(0)});
    const Cone rhs(Polyhedron::from_inequalities(dim, std::move(rhs_ineqs), std::move(rhs_eqs)));

    nr.lhs_generators = all_directions(lhs.set()).size();
    nr.rhs_generators = all_directions(rhs.set()).size();
    nr.lhs_in_rhs = contains_set(rhs.set(), lhs.set());
    nr.rhs_in_lhs = contains_set(lhs.set(), rhs.set());

    const Vec weights = pairing_weights(m, n);
    auto pairing = [&](const Vec& z, const Vec& y) { return dot(hadamard(z, weights), y); };
    if (!nr.rhs_in_lhs) {
      const Vec z = *point_outside(lhs.set(), rhs.set());
      for (const auto& y : all_directions(a_t)) {
        if (sgn(pairing(z, y)) < 0) {
          nr.witness_z = z;
          nr.witness_y = y;
          nr.witness_side = "rhs-only";
          break;
        }
      }
    } else if (!nr.lhs_in_rhs) {
      const Vec z = *point_outside(rhs.set(), lhs.set());
      std::vector<Vec> candidates = all_directions(a_s);
      for (const auto& g : all_directions(a_ts)) {
        Vec y = zeros(dim);
        for (std::size_t j = 0; j < snodes.size(); ++j) {
          for (const std::size_t l : tree.leaves_under(snodes[j])) {
            for (std::size_t i = 0; i < d; ++i) y[idx.at(l) * d + i] = g[j * d + i];
          }
        }
        candidates.push_back(std::move(y));
      }
      for (const auto& y : candidates) {
        if (sgn(pairing(z, y)) < 0) {
          nr.witness_z = z;
          nr.witness_y = y;
          nr.witness_side = "lhs-only";
          break;
        }
      }
    }

    // Pasting: replace the density below one s-node by any member of the
    // s-level cone with the same conditional expectation there.
    nr.pasting_ok = true;
    const ScenarioTree local = tree.subtree(n);
    const int s_local = s - t;
    for (const auto& z : all_directions(lhs.set())) {
      const auto qv = factor(local, z);
      if (!qv) continue;
      for (const std::size_t v : snodes) {
        const auto sub_leaves = tree.leaves_under(v);
        const std::size_t sub_dim = d * sub_leaves.size();
        Vec target = zeros(d);
        for (const std::size_t l : sub_leaves) {
          const Rational p = tree.conditional_prob(l, v);
          for (std::size_t i = 0; i < d; ++i) target[i] += p * z[idx.at(l) * d + i];
        }
        const Cone fiber_cone = dual_acceptance_cone(acceptance_set_from(inner, m, v, s), m, v);
        std::vector<Halfspace> fix;
        for (std::size_t i = 0; i < d; ++i) {
          Vec a = zeros(sub_dim);
          for (std::size_t k = 0; k < sub_leaves.size(); ++k) a[k * d + i] = tree.conditional_prob(sub_leaves[k], v);
          fix.push_back(Halfspace{std::move(a), target[i]});
        }
        const Polyhedron fiber = intersect(fiber_cone.set(), Polyhedron::from_inequalities(sub_dim, {}, fix));
        if (fiber.is_empty() || !fiber.is_bounded()) {
          nr.pasting_ok = false;
          continue;
        }
        for (const auto& zp : fiber.vertices()) {
          Vec patched = z;
          for (std::size_t k = 0; k < sub_leaves.size(); ++k) {
            for (std::size_t i = 0; i < d; ++i) patched[idx.at(sub_leaves[k]) * d + i] = zp[k * d + i];
          }
          // R follows Q outside v and the measure of zp below v.
          VectorMeasure r = qv->q;
          for (std::size_t i = 0; i < d; ++i) {
            if (sgn(target[i]) == 0) continue;
            Rational qmass = 0;
            for (const std::size_t l : sub_leaves) qmass += qv->q.weights[i][idx.at(l)];
            for (std::size_t k = 0; k < sub_leaves.size(); ++k) {
              const Rational p = tree.conditional_prob(sub_leaves[k], v);
              r.weights[i][idx.at(sub_leaves[k])] = qmass * p * zp[k * d + i] / target[i];
            }
          }
          const VectorMeasure pasted = pasting(local, qv->q, r, s_local);
          const Vec zs = product_density(local, pasted, qv->w);
          ++nr.pastings_checked;
          if (zs != patched || !lhs.contains(zs)) nr.pasting_ok = false;
        }
      }
    }
    if (!nr.lhs_in_rhs || !nr.rhs_in_lhs || !nr.pasting_ok) report.holds = false;
    report.nodes.push_back(std::move(nr));
  }
  return report;
}

}  // namespace setrisk
