#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "setrisk/duality.hpp"
#include "setrisk/risk.hpp"

namespace setrisk {

/// Outcome of one machine check. A failing report carries a witness that
/// was re-verified by an LP independent of the polyhedral computation.
struct CheckReport {
  std::string name;
  std::string instance;
  std::string measure;
  bool pass = false;
  /// False when a precondition failed and no verdict was reached.
  bool verdict = true;
  std::uint64_t seed = 0;
  std::size_t cases = 0;
  nlohmann::json witness;  // null on pass
  bool witness_verified = false;
  std::string details;

  nlohmann::json to_json() const;
};

using Rng = std::mt19937_64;

/// Rationals n/q with q in [1, max_den] and |n/q| <= range.
Rational random_rational(Rng& rng, long range = 4, long max_den = 4);
Vec random_vec(Rng& rng, std::size_t d, long range = 4, long max_den = 4);
AdaptedVector random_claim(Rng& rng, const ScenarioTree& tree, long range = 4);
/// Time-t adapted vector with values in M_t.
AdaptedVector random_eligible(Rng& rng, const MarketModel& m, int t, long range = 3);

/// u lies in R_t(X)[n], decided by one LP over the acceptance system. For
/// custom specs the other time-t nodes are free.
bool node_member(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t, std::size_t n,
                 const Vec& u);

/// Per-time acceptance specs: A_t is the acceptance set of spec[t]. A single
/// shipped spec repeated over time is the usual dynamic measure; mixing
/// specs across times builds inconsistent families.
struct DynamicSpec {
  std::vector<AcceptanceSpec> per_time;

  static DynamicSpec uniform(const AcceptanceSpec& spec, const MarketModel& m);
  const AcceptanceSpec& at(int t) const { return per_time[static_cast<std::size_t>(t)]; }
  std::string name() const;
};

/// u(n) in the union over selectors Z of `later` (time t+1) of R_t(-Z)[n]
/// for the time-t spec, by one LP.
bool recursion_member(const AcceptanceSpec& spec, const RiskResult& later, const MarketModel& m, std::size_t n,
                      const Vec& u);

/// Cartesian product of the node sets of r, node blocks in nodes_at order.
Polyhedron product_set(const RiskResult& r);

/// A partition of the time-t nodes; each block lists node indices.
using NodePartition = std::vector<std::vector<std::size_t>>;

/// Glues sampled members of D (a set of time-t adapted vectors, node-major)
/// along each partition and tests membership; also tests that a point lies
/// in D iff each block restriction lies in the block's shadow of D.
CheckReport check_decomposability(const Polyhedron& d_set, const MarketModel& m, int t,
                                  const std::vector<NodePartition>& partitions, std::uint64_t seed,
                                  std::size_t samples = 20);
CheckReport check_decomposability(const RiskResult& r, const MarketModel& m,
                                  const std::vector<NodePartition>& partitions, std::uint64_t seed,
                                  std::size_t samples = 20);

/// Mixed selectors (different generators at different nodes) pass the LP
/// acceptance oracle, points just outside fail it, node-wise mixtures of
/// selectors stay accepted, and for market sums the composed family equals
/// the direct one.
CheckReport selector_equivalence(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t,
                                 std::uint64_t seed, std::size_t samples = 100);

/// The risk of X + K computed by closure equals the K-compatible measure
/// given as `direct` (when provided), contains the base measure, agrees with
/// the LP oracle with trades, and inherits convexity and homogeneity.
CheckReport portfolio_equivalence(const AcceptanceSpec& spec, const ConeField& field, const AdaptedVector& x,
                                  const MarketModel& m, int t, const RiskResult* direct, std::uint64_t seed,
                                  std::size_t samples = 20);

/// Recursion equality, acceptance-sum decomposition and the covering
/// definition on sampled families, after checking normalization.
CheckReport mptc_check(const DynamicSpec& spec, const MarketModel& m, std::uint64_t seed, std::size_t claims = 50);

/// R_t(X)[n] = R_t(1_n X)[n] at every time-t node.
CheckReport locality_check(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t);

/// Randomized property suites for one spec on one market: monotonicity,
/// translativity, conditional convexity, homogeneity (conical specs),
/// normalization, locality, decomposability and selector equivalence.
std::vector<CheckReport> property_suite(const AcceptanceSpec& spec, const MarketModel& m,
                                        const std::string& instance, std::uint64_t seed, std::size_t cases = 100);

/// Dual stability as a report, with the witness of the first failing node.
CheckReport stability_check(const AcceptanceSpec& outer, const AcceptanceSpec& inner, const MarketModel& m, int t,
                            int s);

/// evaluate_dual(max_dual_set) = risk_measure at t = 0 on random claims.
CheckReport primal_dual_check(const AcceptanceSpec& spec, const MarketModel& m, std::uint64_t seed,
                              std::size_t claims = 50);

/// Regulator, market sum, worst-case constructive without exchanges and
/// AVaR(1/2) on asset 1 with worst case elsewhere and solvency exchanges.
std::vector<AcceptanceSpec> shipped_specs(const MarketModel& m);

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t cases = 100;  // per property
  std::size_t claims = 20;  // per recursion or duality check
  std::vector<AcceptanceSpec> specs;  // empty: shipped_specs
};

/// Suites "properties", "mptc", "stability", "duality", and "all" for their
/// union, each expected to pass. "counterexamples" runs counterexamples().
/// Recursion, stability and duality checks run for the regulator and market
/// sum specs only, since the constructive ones live at t = 0.
std::vector<CheckReport> run_suite(const std::string& suite, const MarketModel& m, const std::string& instance,
                                   const SuiteOptions& options);

/// Constructions that must fail with a verified witness: the hybrid family
/// with a regulator at the root, the hybrid stability pair (T >= 2), a custom set
/// coupling two leaves under a one-asset eligible space, and a set tying two
/// time-1 nodes together. Constructions the tree cannot host are skipped.
std::vector<CheckReport> counterexamples(const MarketModel& m, const std::string& instance, std::uint64_t seed);

}  // namespace setrisk
