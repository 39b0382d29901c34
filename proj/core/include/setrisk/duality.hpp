#pragma once

#include <optional>
#include <string>
#include <vector>

#include "setrisk/risk.hpp"

namespace setrisk {

/// (Q, w) together with its product density z = diag(w) dQ/dP, stored
/// leaf-major (index leaf*d + i).
struct DualVariable {
  VectorMeasure q;
  Vec w;
  Vec z;
  std::size_t source_ray = 0;
};

struct DualSet {
  std::vector<DualVariable> members;
  bool maximal = false;
  /// All extreme rays of the dual acceptance cone, including the ones that
  /// did not factor into a valid dual variable.
  std::vector<Vec> rays;
  std::size_t dropped = 0;
};

/// The acceptance set A_t of the subtree at node n (time t) as a polyhedron
/// in the leaf coordinates of that subtree. Regulator, MarketSum, or (at the
/// root only) Custom.
Polyhedron acceptance_set(const AcceptanceSpec& spec, const MarketModel& m, std::size_t n);

/// Same, but only trades from time `from` onward (MarketSum) are allowed:
/// the acceptance set of time `from` viewed from node n.
Polyhedron acceptance_set_from(const AcceptanceSpec& spec, const MarketModel& m, std::size_t n, int from);

/// {z : E[z·Y | node n] >= 0 for Y in A} in the subtree's leaf coordinates.
Cone dual_acceptance_cone(const Polyhedron& acceptance, const MarketModel& m, std::size_t n);

/// z -> (Q, w) with w_i = E[z_i] and dQ_i/dP = z_i / w_i (P where w_i = 0).
/// Empty if z is not a nonnegative density.
std::optional<DualVariable> factor(const ScenarioTree& tree, const Vec& z);
/// diag(w) dQ/dP, leaf-major.
Vec product_density(const ScenarioTree& tree, const VectorMeasure& q, const Vec& w);

/// Generators of the maximal dual set at t = 0 for a conical spec.
DualSet max_dual_set(const AcceptanceSpec& spec, const MarketModel& m);

/// Intersection over the dual set of {u in M_0 : w·u >= w·E^Q[-X]}.
RiskResult evaluate_dual(const DualSet& duals, const AdaptedVector& x, const MarketModel& m);

/// Closure of the union over Z in A_0 of E^Q[Z] + {u : w·u >= 0}, within M_0.
Polyhedron penalty(const AcceptanceSpec& spec, const VectorMeasure& q, const Vec& w, const MarketModel& m);
/// Penalty for an explicit acceptance set in root leaf coordinates.
Polyhedron penalty(const Polyhedron& acceptance, const VectorMeasure& q, const Vec& w, const MarketModel& m);

struct StabilityNodeReport {
  std::string node;
  bool lhs_in_rhs = false;
  bool rhs_in_lhs = false;
  bool pasting_ok = false;
  std::size_t lhs_generators = 0;
  std::size_t rhs_generators = 0;
  std::size_t pastings_checked = 0;
  /// On failure: a dual density on one side only, and a claim generator
  /// certifying it (E[z·Y] < 0 for Y in the acceptance set it violates).
  std::optional<Vec> witness_z;
  std::optional<Vec> witness_y;
  std::string witness_side;
};

struct StabilityReport {
  int t = 0;
  int s = 0;
  bool holds = false;
  std::vector<StabilityNodeReport> nodes;
};

/// Compares, at every time-t node, the dual cone of A_t (outer spec) with
/// {z in A_s^+ (inner spec) : E_s[z] in (A_t ∩ L(F_s))^+}, and checks that
/// pasting members of the t-cone with members of the s-cone stays inside.
/// Requires coordinate eligible spaces.
StabilityReport check_dual_stability(const AcceptanceSpec& outer, const AcceptanceSpec& inner, const MarketModel& m,
                                     int t, int s);

}  // namespace setrisk
