#include "setrisk/polyhedron.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "setrisk/lp.hpp"

namespace setrisk {

namespace {

thread_local std::size_t g_dimension_cap = 12;

void check_cap(std::size_t dim, const char* what) {
  if (dim > g_dimension_cap) {
    throw DimensionCapError(std::string(what) + ": ambient dimension " + std::to_string(dim) + " exceeds cap " +
                            std::to_string(g_dimension_cap));
  }
}

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : words_((n + 63) / 64, 0) {}

  void resize(std::size_t n) { words_.resize((n + 63) / 64, 0); }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  Bitset operator&(const Bitset& o) const {
    Bitset r;
    r.words_.resize(std::max(words_.size(), o.words_.size()), 0);
    for (std::size_t w = 0; w < std::min(words_.size(), o.words_.size()); ++w) r.words_[w] = words_[w] & o.words_[w];
    return r;
  }
  bool subset_of(const Bitset& o) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const std::uint64_t other = w < o.words_.size() ? o.words_[w] : 0;
      if ((words_[w] & ~other) != 0) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct DDRay {
  Vec v;
  Bitset zero;
};

// v - (m·v / m·l) l, rescaled to a primitive vector.
Vec eliminate_along(const Vec& v, const Vec& l, const Rational& mv, const Rational& ml) {
  if (sgn(mv) == 0) return v;
  Vec out = sub(v, scale(l, mv / ml));
  return is_zero(out) ? out : primitive(out);
}

Halfspace normalized(Halfspace h) {
  if (is_zero(h.a)) return h;
  Vec p = primitive(h.a);
  // primitive() applies a positive factor; recover it from a nonzero entry.
  for (std::size_t i = 0; i < h.a.size(); ++i) {
    if (sgn(h.a[i]) != 0) {
      const Rational factor = p[i] / h.a[i];
      h.b *= factor;
      break;
    }
  }
  h.a = std::move(p);
  return h;
}

Halfspace oriented_equation(Halfspace h) {
  h = normalized(std::move(h));
  for (const auto& x : h.a) {
    if (sgn(x) != 0) {
      if (sgn(x) < 0) {
        h.a = negate(h.a);
        h.b = -h.b;
      }
      break;
    }
  }
  return h;
}

}  // namespace

std::size_t dimension_cap() { return g_dimension_cap; }

ScopedDimensionCap::ScopedDimensionCap(std::size_t cap) : previous_(g_dimension_cap) { g_dimension_cap = cap; }
ScopedDimensionCap::~ScopedDimensionCap() { g_dimension_cap = previous_; }

ConeGenerators double_description(std::size_t dim, const std::vector<Vec>& ineqs, const std::vector<Vec>& eqs) {
  std::vector<Vec> lines;
  lines.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) lines.push_back(unit(dim, i));
  std::vector<DDRay> rays;

  // Equalities only shrink the lineality space: no rays exist yet.
  for (const auto& m : eqs) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (sgn(dot(m, lines[i])) != 0) {
        pick = i;
        break;
      }
    }
    if (!pick) continue;
    const Vec l = lines[*pick];
    const Rational ml = dot(m, l);
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(*pick));
    for (auto& other : lines) other = eliminate_along(other, l, dot(m, other), ml);
  }

  for (std::size_t k = 0; k < ineqs.size(); ++k) {
    const Vec& m = ineqs[k];
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (sgn(dot(m, lines[i])) != 0) {
        pick = i;
        break;
      }
    }
    if (pick) {
      Vec l = lines[*pick];
      Rational ml = dot(m, l);
      if (sgn(ml) < 0) {
        l = negate(l);
        ml = -ml;
      }
      lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(*pick));
      for (auto& other : lines) other = eliminate_along(other, l, dot(m, other), ml);
      for (auto& r : rays) {
        r.v = eliminate_along(r.v, l, dot(m, r.v), ml);
        r.zero.resize(k + 1);
        r.zero.set(k);
      }
      DDRay nr{primitive(l), Bitset(k + 1)};
      for (std::size_t j = 0; j < k; ++j) nr.zero.set(j);
      rays.push_back(std::move(nr));
      continue;
    }

    std::vector<std::size_t> pos, neg;
    std::vector<Rational> val(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
      val[i] = dot(m, rays[i].v);
      rays[i].zero.resize(k + 1);
      const int s = sgn(val[i]);
      if (s > 0) pos.push_back(i);
      else if (s < 0) neg.push_back(i);
      else rays[i].zero.set(k);
    }
    if (neg.empty()) continue;

    std::vector<DDRay> next;
    next.reserve(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
      if (sgn(val[i]) >= 0) next.push_back(rays[i]);
    }
    for (const std::size_t p : pos) {
      for (const std::size_t q : neg) {
        const Bitset common = rays[p].zero & rays[q].zero;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          if (common.subset_of(rays[r].zero)) adjacent = false;
        }
        if (!adjacent) continue;
        Vec combo = sub(scale(rays[q].v, val[p]), scale(rays[p].v, val[q]));
        if (is_zero(combo)) continue;
        DDRay nr{primitive(combo), common};
        nr.zero.resize(k + 1);
        nr.zero.set(k);
        next.push_back(std::move(nr));
      }
    }
    rays = std::move(next);
  }

  ConeGenerators out;
  out.lines = std::move(lines);
  for (auto& l : out.lines) l = primitive(l);
  std::set<Vec> seen;
  for (auto& r : rays) {
    if (is_zero(r.v)) continue;
    if (seen.insert(r.v).second) out.rays.push_back(std::move(r.v));
  }
  return out;
}

std::optional<VRep> to_generators(std::size_t dim, const HRep& h) {
  check_cap(dim, "to_generators");
  std::vector<Vec> rows, eq_rows;
  rows.reserve(h.ineqs.size() + 1);
  for (const auto& hs : h.ineqs) {
    Vec row = hs.a;
    row.push_back(-hs.b);
    rows.push_back(std::move(row));
  }
  Vec tau = zeros(dim + 1);
  tau[dim] = 1;
  rows.push_back(std::move(tau));
  for (const auto& hs : h.eqs) {
    Vec row = hs.a;
    row.push_back(-hs.b);
    eq_rows.push_back(std::move(row));
  }
  const ConeGenerators g = double_description(dim + 1, rows, eq_rows);
  VRep v;
  for (const auto& r : g.rays) {
    Vec x(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(dim));
    if (sgn(r[dim]) > 0) {
      v.vertices.push_back(scale(x, 1 / r[dim]));
    } else {
      v.rays.push_back(primitive(x));
    }
  }
  for (const auto& l : g.lines) {
    Vec x(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(dim));
    v.lines.push_back(primitive(x));
  }
  if (v.vertices.empty()) return std::nullopt;
  std::sort(v.vertices.begin(), v.vertices.end());
  std::sort(v.rays.begin(), v.rays.end());
  return v;
}

HRep to_inequalities(std::size_t dim, const VRep& v) {
  check_cap(dim, "to_inequalities");
  std::vector<Vec> rows, eq_rows;
  for (const auto& x : v.vertices) {
    Vec row = x;
    row.push_back(1);
    rows.push_back(std::move(row));
  }
  for (const auto& r : v.rays) {
    Vec row = r;
    row.push_back(0);
    rows.push_back(std::move(row));
  }
  for (const auto& l : v.lines) {
    Vec row = l;
    row.push_back(0);
    eq_rows.push_back(std::move(row));
  }
  const ConeGenerators g = double_description(dim + 1, rows, eq_rows);
  HRep h;
  for (const auto& r : g.rays) {
    Vec a(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(dim));
    if (is_zero(a)) continue;
    h.ineqs.push_back(Halfspace{std::move(a), -r[dim]});
  }
  for (const auto& l : g.lines) {
    Vec a(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(dim));
    if (is_zero(a)) continue;
    h.eqs.push_back(oriented_equation(Halfspace{std::move(a), -l[dim]}));
  }
  std::sort(h.ineqs.begin(), h.ineqs.end(), [](const Halfspace& x, const Halfspace& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return h;
}

Polyhedron Polyhedron::from_inequalities(std::size_t dim, std::vector<Halfspace> ineqs, std::vector<Halfspace> eqs) {
  for (const auto& h : ineqs) {
    if (h.a.size() != dim) throw Error("from_inequalities: row dimension mismatch");
  }
  for (const auto& h : eqs) {
    if (h.a.size() != dim) throw Error("from_inequalities: row dimension mismatch");
  }
  auto v = to_generators(dim, HRep{std::move(ineqs), std::move(eqs)});
  if (!v) return empty(dim);
  Polyhedron p;
  p.dim_ = dim;
  p.empty_ = false;
  p.h_ = to_inequalities(dim, *v);
  p.v_ = std::move(*v);
  return p;
}

Polyhedron Polyhedron::from_generators(std::size_t dim, std::vector<Vec> vertices, std::vector<Vec> rays,
                                       std::vector<Vec> lines) {
  if (vertices.empty()) {
    if (!rays.empty() || !lines.empty()) throw Error("from_generators: rays or lines without a vertex");
    return empty(dim);
  }
  for (const auto* group : {&vertices, &rays, &lines}) {
    for (const auto& x : *group) {
      if (x.size() != dim) throw Error("from_generators: generator dimension mismatch");
    }
  }
  const HRep h = to_inequalities(dim, VRep{std::move(vertices), std::move(rays), std::move(lines)});
  auto v = to_generators(dim, h);
  if (!v) throw Error("from_generators: inconsistent conversion");
  Polyhedron p;
  p.dim_ = dim;
  p.empty_ = false;
  p.h_ = h;
  p.v_ = std::move(*v);
  return p;
}

Polyhedron Polyhedron::empty(std::size_t dim) {
  Polyhedron p;
  p.dim_ = dim;
  p.empty_ = true;
  p.h_.ineqs.push_back(Halfspace{zeros(dim), Rational(1)});
  return p;
}

Polyhedron Polyhedron::whole(std::size_t dim) {
  Polyhedron p;
  p.dim_ = dim;
  p.empty_ = false;
  p.v_.vertices.push_back(zeros(dim));
  for (std::size_t i = 0; i < dim; ++i) p.v_.lines.push_back(unit(dim, i));
  return p;
}

Polyhedron Polyhedron::point(const Vec& x) {
  std::vector<Halfspace> eqs;
  for (std::size_t i = 0; i < x.size(); ++i) eqs.push_back(Halfspace{unit(x.size(), i), x[i]});
  Polyhedron p;
  p.dim_ = x.size();
  p.empty_ = false;
  p.h_.eqs = std::move(eqs);
  p.v_.vertices.push_back(x);
  return p;
}

Polyhedron Polyhedron::orthant(std::size_t dim) {
  std::vector<Halfspace> ineqs;
  for (std::size_t i = 0; i < dim; ++i) ineqs.push_back(Halfspace{unit(dim, i), Rational(0)});
  return from_inequalities(dim, std::move(ineqs));
}

bool Polyhedron::is_cone() const {
  if (empty_) return false;
  auto zero_rhs = [](const Halfspace& h) { return sgn(h.b) == 0; };
  return std::all_of(h_.ineqs.begin(), h_.ineqs.end(), zero_rhs) &&
         std::all_of(h_.eqs.begin(), h_.eqs.end(), zero_rhs);
}

bool Polyhedron::contains(const Vec& x) const {
  if (empty_) return false;
  for (const auto& h : h_.eqs) {
    if (dot(h.a, x) != h.b) return false;
  }
  for (const auto& h : h_.ineqs) {
    if (dot(h.a, x) < h.b) return false;
  }
  return true;
}

bool Polyhedron::recedes(const Vec& d) const {
  if (empty_) return false;
  for (const auto& h : h_.eqs) {
    if (sgn(dot(h.a, d)) != 0) return false;
  }
  for (const auto& h : h_.ineqs) {
    if (sgn(dot(h.a, d)) < 0) return false;
  }
  return true;
}

Cone::Cone(Polyhedron set) : set_(std::move(set)) {
  if (!set_.is_cone()) throw Error("Cone: set is not a cone through the origin");
}

Cone Cone::from_generators(std::size_t dim, std::vector<Vec> rays, std::vector<Vec> lines) {
  return Cone(Polyhedron::from_generators(dim, {zeros(dim)}, std::move(rays), std::move(lines)));
}

Cone Cone::from_inequalities(std::size_t dim, std::vector<Vec> normals, std::vector<Vec> eq_normals) {
  std::vector<Halfspace> ineqs, eqs;
  for (auto& n : normals) ineqs.push_back(Halfspace{std::move(n), Rational(0)});
  for (auto& n : eq_normals) eqs.push_back(Halfspace{std::move(n), Rational(0)});
  return Cone(Polyhedron::from_inequalities(dim, std::move(ineqs), std::move(eqs)));
}

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim() != q.dim()) throw Error("intersect: dimension mismatch");
  if (p.is_empty() || q.is_empty()) return Polyhedron::empty(p.dim());
  std::vector<Halfspace> ineqs = p.inequalities();
  ineqs.insert(ineqs.end(), q.inequalities().begin(), q.inequalities().end());
  std::vector<Halfspace> eqs = p.equations();
  eqs.insert(eqs.end(), q.equations().begin(), q.equations().end());
  return Polyhedron::from_inequalities(p.dim(), std::move(ineqs), std::move(eqs));
}

Polyhedron intersect_all(std::size_t dim, const std::vector<Polyhedron>& sets) {
  std::vector<Halfspace> ineqs, eqs;
  for (const auto& s : sets) {
    if (s.dim() != dim) throw Error("intersect_all: dimension mismatch");
    if (s.is_empty()) return Polyhedron::empty(dim);
    ineqs.insert(ineqs.end(), s.inequalities().begin(), s.inequalities().end());
    eqs.insert(eqs.end(), s.equations().begin(), s.equations().end());
  }
  return Polyhedron::from_inequalities(dim, std::move(ineqs), std::move(eqs));
}

Polyhedron minkowski_sum(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim() != q.dim()) throw Error("minkowski_sum: dimension mismatch");
  if (p.is_empty() || q.is_empty()) return Polyhedron::empty(p.dim());
  std::vector<Vec> vertices;
  for (const auto& a : p.vertices()) {
    for (const auto& b : q.vertices()) vertices.push_back(add(a, b));
  }
  std::vector<Vec> rays = p.rays();
  rays.insert(rays.end(), q.rays().begin(), q.rays().end());
  std::vector<Vec> lines = p.lines();
  lines.insert(lines.end(), q.lines().begin(), q.lines().end());
  return Polyhedron::from_generators(p.dim(), std::move(vertices), std::move(rays), std::move(lines));
}

Polyhedron translate(const Polyhedron& p, const Vec& shift) {
  if (p.is_empty()) return p;
  Polyhedron out = p;
  for (auto& v : out.v_.vertices) v = add(v, shift);
  std::sort(out.v_.vertices.begin(), out.v_.vertices.end());
  for (auto& h : out.h_.ineqs) h.b += dot(h.a, shift);
  for (auto& h : out.h_.eqs) h.b += dot(h.a, shift);
  return out;
}

Polyhedron scale(const Polyhedron& p, const Rational& factor) {
  if (p.is_empty()) return p;
  if (sgn(factor) == 0) return Polyhedron::point(zeros(p.dim()));
  if (sgn(factor) < 0) {
    std::vector<Vec> vertices, rays, lines = p.lines();
    for (const auto& v : p.vertices()) vertices.push_back(scale(v, factor));
    for (const auto& r : p.rays()) rays.push_back(negate(r));
    return Polyhedron::from_generators(p.dim(), std::move(vertices), std::move(rays), std::move(lines));
  }
  Polyhedron out = p;
  for (auto& v : out.v_.vertices) v = scale(v, factor);
  for (auto& h : out.h_.ineqs) h.b *= factor;
  for (auto& h : out.h_.eqs) h.b *= factor;
  return out;
}

Polyhedron recession_cone(const Polyhedron& p) {
  if (p.is_empty()) return p;
  return Polyhedron::from_generators(p.dim(), {zeros(p.dim())}, p.rays(), p.lines());
}

Polyhedron linear_image(const Polyhedron& p, const std::vector<Vec>& matrix) {
  const std::size_t out_dim = matrix.size();
  if (p.is_empty()) return Polyhedron::empty(out_dim);
  auto apply = [&](const Vec& x) {
    Vec y(out_dim);
    for (std::size_t i = 0; i < out_dim; ++i) y[i] = dot(matrix[i], x);
    return y;
  };
  std::vector<Vec> vertices, rays, lines;
  for (const auto& v : p.vertices()) vertices.push_back(apply(v));
  for (const auto& r : p.rays()) {
    Vec y = apply(r);
    if (!is_zero(y)) rays.push_back(std::move(y));
  }
  for (const auto& l : p.lines()) {
    Vec y = apply(l);
    if (!is_zero(y)) lines.push_back(std::move(y));
  }
  return Polyhedron::from_generators(out_dim, std::move(vertices), std::move(rays), std::move(lines));
}

namespace {

struct FmState {
  std::vector<Halfspace> ineqs;
  std::vector<Halfspace> eqs;
  bool infeasible = false;
};

// Drops trivial rows, merges parallel inequalities, detects 0 >= b > 0.
void tidy(FmState& s) {
  std::map<Vec, Rational> best;
  for (auto& h : s.ineqs) {
    Halfspace n = normalized(std::move(h));
    if (is_zero(n.a)) {
      if (sgn(n.b) > 0) s.infeasible = true;
      continue;
    }
    auto [it, inserted] = best.emplace(n.a, n.b);
    if (!inserted && it->second < n.b) it->second = n.b;
  }
  s.ineqs.clear();
  for (auto& [a, b] : best) s.ineqs.push_back(Halfspace{a, b});
  std::vector<Halfspace> eqs;
  std::set<std::pair<Vec, Rational>> seen;
  for (auto& h : s.eqs) {
    Halfspace n = oriented_equation(std::move(h));
    if (is_zero(n.a)) {
      if (sgn(n.b) != 0) s.infeasible = true;
      continue;
    }
    if (seen.emplace(n.a, n.b).second) eqs.push_back(std::move(n));
  }
  s.eqs = std::move(eqs);
}

LinearProgram lp_over(const std::vector<std::size_t>& active, const std::vector<Halfspace>& ineqs,
                      const std::vector<Halfspace>& eqs, std::size_t skip) {
  LinearProgram lp(active.size());
  auto restrict = [&](const Vec& a) {
    Vec r(active.size());
    for (std::size_t c = 0; c < active.size(); ++c) r[c] = a[active[c]];
    return r;
  };
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (i == skip) continue;
    lp.add_row(restrict(ineqs[i].a), RowSense::GreaterEqual, ineqs[i].b);
  }
  for (const auto& e : eqs) lp.add_row(restrict(e.a), RowSense::Equal, e.b);
  return lp;
}

// Removes inequalities implied by the rest. Returns false if infeasible.
bool remove_redundant(FmState& s, const std::vector<std::size_t>& active) {
  std::size_t i = 0;
  while (i < s.ineqs.size()) {
    LinearProgram lp = lp_over(active, s.ineqs, s.eqs, i);
    for (std::size_t c = 0; c < active.size(); ++c) lp.objective[c] = s.ineqs[i].a[active[c]];
    const LpResult r = solve(lp);
    if (r.status == LpStatus::Infeasible) return false;
    if (r.status == LpStatus::Optimal && r.value >= s.ineqs[i].b) {
      s.ineqs.erase(s.ineqs.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (s.ineqs.empty() && !s.eqs.empty()) {
    LinearProgram lp = lp_over(active, s.ineqs, s.eqs, s.ineqs.size());
    if (!feasible(lp)) return false;
  }
  return true;
}

}  // namespace

Polyhedron project(const LinearSystem& system, const std::vector<std::size_t>& keep) {
  const std::size_t n = system.num_vars;
  std::vector<bool> kept(n, false);
  for (const std::size_t k : keep) {
    if (k >= n) throw Error("project: coordinate out of range");
    kept[k] = true;
  }
  FmState s{system.ineqs, system.eqs, false};
  for (const auto& h : s.ineqs) {
    if (h.a.size() != n) throw Error("project: row dimension mismatch");
  }
  for (const auto& h : s.eqs) {
    if (h.a.size() != n) throw Error("project: row dimension mismatch");
  }
  tidy(s);
  if (s.infeasible) return Polyhedron::empty(keep.size());

  std::vector<std::size_t> remaining;
  for (std::size_t j = 0; j < n; ++j) {
    if (!kept[j]) remaining.push_back(j);
  }
  std::vector<bool> alive(n, true);

  while (!remaining.empty()) {
    // Prefer a coordinate fixed by an equation, otherwise the cheapest
    // Fourier-Motzkin step.
    std::size_t best_pos = 0;
    std::ptrdiff_t best_cost = -1;
    std::optional<std::size_t> eq_index;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const std::size_t j = remaining[r];
      for (std::size_t e = 0; e < s.eqs.size(); ++e) {
        if (sgn(s.eqs[e].a[j]) != 0) {
          eq_index = e;
          break;
        }
      }
      if (eq_index) {
        best_pos = r;
        break;
      }
      std::ptrdiff_t np = 0, nn = 0;
      for (const auto& h : s.ineqs) {
        const int sg = sgn(h.a[j]);
        if (sg > 0) ++np;
        else if (sg < 0) ++nn;
      }
      const std::ptrdiff_t cost = np * nn - np - nn;
      if (best_cost < 0 || cost < best_cost) {
        best_cost = cost;
        best_pos = r;
      }
    }
    const std::size_t j = remaining[best_pos];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    alive[j] = false;

    if (eq_index) {
      const Halfspace pivot = s.eqs[*eq_index];
      s.eqs.erase(s.eqs.begin() + static_cast<std::ptrdiff_t>(*eq_index));
      auto substitute = [&](Halfspace& h) {
        if (sgn(h.a[j]) == 0) return;
        const Rational f = h.a[j] / pivot.a[j];
        h.a = sub(h.a, scale(pivot.a, f));
        h.b -= f * pivot.b;
      };
      for (auto& h : s.ineqs) substitute(h);
      for (auto& h : s.eqs) substitute(h);
    } else {
      std::vector<Halfspace> next, pos, neg;
      for (auto& h : s.ineqs) {
        const int sg = sgn(h.a[j]);
        if (sg > 0) pos.push_back(std::move(h));
        else if (sg < 0) neg.push_back(std::move(h));
        else next.push_back(std::move(h));
      }
      for (const auto& p : pos) {
        for (const auto& q : neg) {
          const Rational alpha = p.a[j];
          const Rational beta = -q.a[j];
          Halfspace c{add(scale(p.a, beta), scale(q.a, alpha)), beta * p.b + alpha * q.b};
          c.a[j] = 0;
          next.push_back(std::move(c));
        }
      }
      s.ineqs = std::move(next);
    }
    tidy(s);
    if (s.infeasible) return Polyhedron::empty(keep.size());
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < n; ++c) {
      if (alive[c]) active.push_back(c);
    }
    if (!remove_redundant(s, active)) return Polyhedron::empty(keep.size());
  }

  auto restrict = [&](const Halfspace& h) {
    Halfspace r{Vec(keep.size()), h.b};
    for (std::size_t c = 0; c < keep.size(); ++c) r.a[c] = h.a[keep[c]];
    return r;
  };
  std::vector<Halfspace> ineqs, eqs;
  for (const auto& h : s.ineqs) ineqs.push_back(restrict(h));
  for (const auto& h : s.eqs) eqs.push_back(restrict(h));
  return Polyhedron::from_inequalities(keep.size(), std::move(ineqs), std::move(eqs));
}

Polyhedron project(const Polyhedron& p, const std::vector<std::size_t>& keep) {
  if (p.is_empty()) return Polyhedron::empty(keep.size());
  return project(LinearSystem{p.dim(), p.inequalities(), p.equations()}, keep);
}

Polyhedron project_generators(const Polyhedron& p, const std::vector<std::size_t>& keep) {
  std::vector<Vec> matrix;
  for (const std::size_t k : keep) matrix.push_back(unit(p.dim(), k));
  return linear_image(p, matrix);
}

LpMinResult lp_min(const Polyhedron& p, const Vec& c) {
  if (p.is_empty()) throw Error("lp_min: empty polyhedron");
  LinearProgram lp(p.dim());
  lp.objective = c;
  for (const auto& h : p.inequalities()) lp.add_row(h.a, RowSense::GreaterEqual, h.b);
  for (const auto& h : p.equations()) lp.add_row(h.a, RowSense::Equal, h.b);
  const LpResult r = solve(lp);
  LpMinResult out;
  if (r.status == LpStatus::Unbounded) {
    out.kind = LpMinResult::Kind::Unbounded;
    out.ray = primitive(r.ray);
    return out;
  }
  if (r.status != LpStatus::Optimal) throw Error("lp_min: solver reported infeasibility on a nonempty set");
  out.kind = LpMinResult::Kind::Finite;
  out.value = r.value;
  out.argmin = r.x;
  return out;
}

Cone dual_cone(const Cone& c) {
  std::vector<Vec> normals = c.rays();
  std::vector<Vec> eq_normals = c.lines();
  return Cone::from_inequalities(c.dim(), std::move(normals), std::move(eq_normals));
}

bool contains_point(const Polyhedron& p, const Vec& x) { return p.contains(x); }

bool contains_set(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim() != q.dim()) throw Error("contains_set: dimension mismatch");
  return !point_outside(p, q).has_value();
}

std::optional<Vec> point_outside(const Polyhedron& p, const Polyhedron& q) {
  if (q.is_empty()) return std::nullopt;
  if (p.is_empty()) return q.vertices().front();
  for (const auto& v : q.vertices()) {
    if (!p.contains(v)) return v;
  }
  const Vec& base = q.vertices().front();
  auto escape = [&](const Vec& d) -> std::optional<Vec> {
    for (const auto& h : p.equations()) {
      if (sgn(dot(h.a, d)) != 0) return add(base, d);
    }
    for (const auto& h : p.inequalities()) {
      const Rational ad = dot(h.a, d);
      if (sgn(ad) < 0) {
        const Rational lambda = (dot(h.a, base) - h.b) / (-ad) + 1;
        return add(base, scale(d, lambda));
      }
    }
    return std::nullopt;
  };
  for (const auto& r : q.rays()) {
    if (auto x = escape(r)) return x;
  }
  for (const auto& l : q.lines()) {
    if (auto x = escape(l)) return x;
    if (auto x = escape(negate(l))) return x;
  }
  return std::nullopt;
}

bool equals(const Polyhedron& p, const Polyhedron& q) {
  if (p.dim() != q.dim()) return false;
  if (p.is_empty() || q.is_empty()) return p.is_empty() == q.is_empty();
  return contains_set(p, q) && contains_set(q, p);
}

namespace {

bool covered(const Polyhedron& p, const std::vector<Polyhedron>& cover, std::size_t idx) {
  if (p.is_empty()) return true;
  if (idx == cover.size()) return false;
  const Polyhedron& q = cover[idx];
  if (q.is_empty()) return covered(p, cover, idx + 1);
  if (contains_set(q, p)) return true;
  std::vector<Halfspace> constraints = q.inequalities();
  for (const auto& e : q.equations()) {
    constraints.push_back(e);
    constraints.push_back(Halfspace{negate(e.a), -e.b});
  }
  Polyhedron rest = p;
  for (const auto& c : constraints) {
    const LpMinResult m = lp_min(rest, c.a);
    const bool violated = m.kind == LpMinResult::Kind::Unbounded || m.value < c.b;
    if (violated) {
      const Polyhedron piece = intersect(rest, Polyhedron::from_inequalities(p.dim(), {Halfspace{negate(c.a), -c.b}}));
      if (!covered(piece, cover, idx + 1)) return false;
    }
    rest = intersect(rest, Polyhedron::from_inequalities(p.dim(), {c}));
    if (rest.is_empty()) break;
  }
  return true;
}

}  // namespace

bool contains_union(const std::vector<Polyhedron>& cover, const Polyhedron& p) {
  for (const auto& q : cover) {
    if (q.dim() != p.dim()) throw Error("contains_union: dimension mismatch");
  }
  return covered(p, cover, 0);
}

Vec centroid_of_vertices(const Polyhedron& p) {
  if (p.is_empty()) throw Error("centroid_of_vertices: empty polyhedron");
  Vec c = zeros(p.dim());
  for (const auto& v : p.vertices()) c = add(c, v);
  return scale(c, Rational(1, static_cast<unsigned long>(p.vertices().size())));
}

}  // namespace setrisk
