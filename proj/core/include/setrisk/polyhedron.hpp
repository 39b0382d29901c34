#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "setrisk/rational.hpp"

namespace setrisk {

/// The closed halfspace {x : a·x >= b}, or the hyperplane {x : a·x = b}
/// when stored among equations.
struct Halfspace {
  Vec a;
  Rational b;

  bool satisfied_by(const Vec& x) const { return dot(a, x) >= b; }
  bool operator==(const Halfspace&) const = default;
};

struct HRep {
  std::vector<Halfspace> ineqs;
  std::vector<Halfspace> eqs;
};

/// Minkowski-Weyl data: conv(vertices) + cone(rays) + span(lines).
struct VRep {
  std::vector<Vec> vertices;
  std::vector<Vec> rays;
  std::vector<Vec> lines;
};

/// Ambient dimension above which conversions refuse to run.
std::size_t dimension_cap();

/// Raises (or lowers) the dimension cap for the current thread while alive.
class ScopedDimensionCap {
 public:
  explicit ScopedDimensionCap(std::size_t cap);
  ~ScopedDimensionCap();
  ScopedDimensionCap(const ScopedDimensionCap&) = delete;
  ScopedDimensionCap& operator=(const ScopedDimensionCap&) = delete;

 private:
  std::size_t previous_;
};

/// Generators of the cone {y : m·y >= 0 for m in ineqs, m·y = 0 for m in eqs}
/// by the double description method. Lines span the lineality space; rays are
/// the extreme rays modulo lineality.
struct ConeGenerators {
  std::vector<Vec> lines;
  std::vector<Vec> rays;
};
ConeGenerators double_description(std::size_t dim, const std::vector<Vec>& ineqs, const std::vector<Vec>& eqs);

/// Raw conversions. to_generators returns nullopt for an empty set.
std::optional<VRep> to_generators(std::size_t dim, const HRep& h);
HRep to_inequalities(std::size_t dim, const VRep& v);

/// Exact convex polyhedron in Q^dim. Every instance keeps both a minimal
/// inequality description and a minimal generator description; the empty set
/// is an ordinary value.
class Polyhedron {
 public:
  static Polyhedron from_inequalities(std::size_t dim, std::vector<Halfspace> ineqs, std::vector<Halfspace> eqs = {});
  static Polyhedron from_generators(std::size_t dim, std::vector<Vec> vertices, std::vector<Vec> rays,
                                    std::vector<Vec> lines = {});
  static Polyhedron empty(std::size_t dim);
  static Polyhedron whole(std::size_t dim);
  static Polyhedron point(const Vec& x);
  static Polyhedron orthant(std::size_t dim);

  std::size_t dim() const { return dim_; }
  bool is_empty() const { return empty_; }
  bool is_whole() const { return !empty_ && h_.ineqs.empty() && h_.eqs.empty(); }
  bool is_cone() const;
  bool is_bounded() const { return !empty_ && v_.rays.empty() && v_.lines.empty(); }

  const std::vector<Halfspace>& inequalities() const { return h_.ineqs; }
  const std::vector<Halfspace>& equations() const { return h_.eqs; }
  const std::vector<Vec>& vertices() const { return v_.vertices; }
  const std::vector<Vec>& rays() const { return v_.rays; }
  const std::vector<Vec>& lines() const { return v_.lines; }
  const HRep& hrep() const { return h_; }
  const VRep& vrep() const { return v_; }

  bool contains(const Vec& x) const;
  /// d is a recession direction of the set.
  bool recedes(const Vec& d) const;

 private:
  friend Polyhedron translate(const Polyhedron& p, const Vec& shift);
  friend Polyhedron scale(const Polyhedron& p, const Rational& factor);

  Polyhedron() = default;
  std::size_t dim_ = 0;
  bool empty_ = true;
  HRep h_;
  VRep v_;
};

/// A polyhedral cone: a nonempty polyhedron whose set is closed under
/// nonnegative scaling.
class Cone {
 public:
  explicit Cone(Polyhedron set);
  static Cone from_generators(std::size_t dim, std::vector<Vec> rays, std::vector<Vec> lines = {});
  static Cone from_inequalities(std::size_t dim, std::vector<Vec> normals, std::vector<Vec> eq_normals = {});

  const Polyhedron& set() const { return set_; }
  operator const Polyhedron&() const { return set_; }  // NOLINT(google-explicit-constructor)
  std::size_t dim() const { return set_.dim(); }
  const std::vector<Vec>& rays() const { return set_.rays(); }
  const std::vector<Vec>& lines() const { return set_.lines(); }
  bool contains(const Vec& x) const { return set_.contains(x); }
  bool is_pointed() const { return set_.lines().empty(); }

 private:
  Polyhedron set_;
};

Polyhedron intersect(const Polyhedron& p, const Polyhedron& q);
Polyhedron intersect_all(std::size_t dim, const std::vector<Polyhedron>& sets);
Polyhedron minkowski_sum(const Polyhedron& p, const Polyhedron& q);
Polyhedron translate(const Polyhedron& p, const Vec& shift);
Polyhedron scale(const Polyhedron& p, const Rational& factor);
Polyhedron recession_cone(const Polyhedron& p);
/// Image under x -> A x (A given row-wise, rows = output coordinates).
Polyhedron linear_image(const Polyhedron& p, const std::vector<Vec>& matrix);

/// Unminimised linear system over num_vars variables. Used as input to
/// projection and to LP queries over lifted formulations.
struct LinearSystem {
  std::size_t num_vars = 0;
  std::vector<Halfspace> ineqs;
  std::vector<Halfspace> eqs;
};

/// Fourier-Motzkin elimination of every coordinate not in keep (kept in the
/// given order), with LP-based redundancy removal after each elimination.
Polyhedron project(const LinearSystem& system, const std::vector<std::size_t>& keep);
Polyhedron project(const Polyhedron& p, const std::vector<std::size_t>& keep);

/// Projection by mapping generators; independent of the elimination route.
Polyhedron project_generators(const Polyhedron& p, const std::vector<std::size_t>& keep);

struct LpMinResult {
  enum class Kind { Finite, Unbounded } kind = Kind::Finite;
  Rational value;
  Vec argmin;  // Finite
  Vec ray;     // Unbounded: a recession direction with c·ray < 0
};

/// min c·x over a nonempty polyhedron by the simplex method on its
/// inequality description. Throws Error on the empty set.
LpMinResult lp_min(const Polyhedron& p, const Vec& c);

/// {v : v·x >= 0 for all x in C}.
Cone dual_cone(const Cone& c);

bool equals(const Polyhedron& p, const Polyhedron& q);
bool contains_point(const Polyhedron& p, const Vec& x);
bool contains_set(const Polyhedron& p, const Polyhedron& q);
/// A point of q outside p, if any.
std::optional<Vec> point_outside(const Polyhedron& p, const Polyhedron& q);

/// Exact test of p ⊆ q_1 ∪ ... ∪ q_k.
bool contains_union(const std::vector<Polyhedron>& cover, const Polyhedron& p);

/// Average of the vertices; a point of p for nonempty p.
Vec centroid_of_vertices(const Polyhedron& p);

}  // namespace setrisk
