#pragma once

#include <optional>
#include <string>
#include <vector>

#include "setrisk/risk.hpp"

namespace setrisk {

/// A value in Q extended by -inf and +inf.
struct ExtendedValue {
  enum class Kind { Finite, MinusInfinity, PlusInfinity } kind = Kind::Finite;
  Rational value;

  static ExtendedValue finite(const Rational& v) { return {Kind::Finite, v}; }
  static ExtendedValue minus_infinity() { return {Kind::MinusInfinity, 0}; }
  static ExtendedValue plus_infinity() { return {Kind::PlusInfinity, 0}; }
  bool is_finite() const { return kind == Kind::Finite; }
  bool operator==(const ExtendedValue&) const = default;
};

std::string to_string(const ExtendedValue& v);

/// inf{w·u : u in P}; +inf on the empty set.
ExtendedValue scalarize(const Polyhedron& node_set, const Vec& w);
ExtendedValue scalarize(const RiskResult& r, const Vec& w, const ScenarioTree& tree, std::size_t node);

/// Throws InputError unless w is nonnegative on M_t,+ and not orthogonal
/// to M_t.
void check_weight(const MarketModel& m, int t, const Vec& w);

/// inf{w·u : u in M_t, X + u in A_t} per time-t node, one LP per node over
/// the lifted acceptance system (no polyhedron is built).
std::vector<ExtendedValue> scalar_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const Vec& w,
                                       const MarketModel& m, int t);

struct Reconstruction {
  RiskResult result;
  bool exact = false;
  /// A point of the reconstruction outside the true value when not exact.
  std::optional<Vec> witness;
  std::optional<std::size_t> witness_node;
};

/// Node-wise intersection of {u in M_t : w·u >= rho^w(X)} over W, compared
/// with risk_measure.
Reconstruction reconstruct(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t,
                           const std::vector<Vec>& weights);

/// Inequality normals of every node set, deduplicated.
std::vector<Vec> facet_normals(const RiskResult& r);

/// Rescales a nonzero nonnegative weight to the unit simplex.
Vec normalize_weight(const Vec& w);

/// k+1 weights (j/k, 1 - j/k) on the two-asset simplex.
std::vector<Vec> simplex_grid(std::size_t k);

struct SuperhedgingPrice {
  Rational primal;
  Rational dual;
  std::vector<Vec> price_process;  // per node: the dual optimiser's consistent prices
};

/// Cost in asset i of superhedging X: the primal value over the lifted
/// market system with M_0 = span(e_i) and the LP dual over consistent price
/// systems normalised in asset i. Throws InfeasibleModelError without a
/// strictly consistent price system, and Error if the two values differ.
SuperhedgingPrice superhedging_price(const AdaptedVector& x, std::size_t asset, const MarketModel& m);

}  // namespace setrisk
