#pragma once

#include <optional>
#include <vector>

#include "setrisk/polyhedron.hpp"
#include "setrisk/tree.hpp"

namespace setrisk {

/// Solvency cone of one node. `proper` is false when the cone contains a
/// line, as for frictionless markets.
struct SolvencyCone {
  Cone cone;
  bool proper = true;
};

/// Cone generated by the unit vectors and pi[i][j] e_i - e_j. A zero
/// off-diagonal entry means the exchange i -> j is not offered. Throws
/// InputError unless pi[i][i] = 1, pi[i][j] >= 0 and pi[i][j] pi[j][i] >= 1
/// whenever both directions are offered.
SolvencyCone solvency_cone(const std::vector<Vec>& bidask);

/// The orthant, i.e. no exchanges at all.
SolvencyCone no_trade_cone(std::size_t d);

/// A linear subspace of R^d with a nonzero nonnegative element.
class EligibleSpace {
 public:
  explicit EligibleSpace(std::size_t d, std::vector<Vec> basis);
  static EligibleSpace full(std::size_t d);
  /// Positions in the first n assets only.
  static EligibleSpace first(std::size_t d, std::size_t n);

  std::size_t dim() const { return d_; }
  const std::vector<Vec>& basis() const { return basis_; }
  const Polyhedron& subspace() const { return subspace_; }
  /// M intersected with the orthant.
  const Polyhedron& positive_part() const { return positive_; }
  bool is_full() const { return subspace_.is_whole(); }
  bool contains(const Vec& m) const { return subspace_.contains(m); }
  /// w is nonnegative on M_+ and not orthogonal to M.
  bool admits_weight(const Vec& w) const;

 private:
  std::size_t d_;
  std::vector<Vec> basis_;
  Polyhedron subspace_;
  Polyhedron positive_;
};

struct MarketModel {
  ScenarioTree tree;
  std::vector<SolvencyCone> cones;      // one per node
  std::vector<EligibleSpace> eligible;  // one per time 0..T

  MarketModel(ScenarioTree tree, std::vector<SolvencyCone> cones, std::vector<EligibleSpace> eligible);

  std::size_t dim() const { return tree.dim(); }
  const Cone& cone(std::size_t n) const { return cones[n].cone; }
  const EligibleSpace& eligible_at(int t) const { return eligible[static_cast<std::size_t>(t)]; }
  bool frictionless_somewhere() const;
  MarketModel with_eligible(std::vector<EligibleSpace> spaces) const;
};

/// X - Y lies in the terminal solvency cone at every leaf.
bool k_order_geq(const MarketModel& m, const AdaptedVector& x, const AdaptedVector& y);

/// Smallest c >= 0 with c 1_n >= X >= -c 1_n in the terminal cone order.
/// Throws Error when no finite c exists.
Rational k_norm(const MarketModel& m, const AdaptedVector& x, std::size_t n);

/// Adapted price process Z with Z(n) in the relative interior of K(n)^+,
/// a P-martingale, normalised by Z(root)_1 = 1. `slack` is the margin by
/// which the interior condition holds on the extreme rays.
struct PriceSystem {
  std::vector<Vec> z;  // per node
  Rational slack;
};

std::optional<PriceSystem> find_consistent_price_system(const MarketModel& m);

}  // namespace setrisk
