#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "setrisk/market.hpp"
#include "setrisk/polyhedron.hpp"
#include "setrisk/tree.hpp"

namespace setrisk {

/// Scalar risk of a single asset's payoff.
struct ScalarComponent {
  enum class Kind { WorstCase, AVaR } kind = Kind::WorstCase;
  Rational level = 1;  // AVaR confidence level in (0,1]; level 1 is the worst case

  static ScalarComponent worst_case() { return {}; }
  static ScalarComponent avar(const Rational& level);
  bool operator==(const ScalarComponent&) const = default;
};

/// Exchanges available to the holder of a constructive measure's claim.
enum class Exchange {
  None,      // X(w) + R^d_-
  Solvency,  // X(w) - K_T(w)
};

struct AcceptanceSpec {
  enum class Kind { Regulator, MarketSum, Constructive, Custom } kind = Kind::Regulator;
  std::vector<ScalarComponent> components;
  Exchange exchange = Exchange::None;
  /// Custom acceptance set in leaf coordinates (leaf-major: index w*d + i).
  std::optional<Polyhedron> custom;

  static AcceptanceSpec regulator();
  static AcceptanceSpec market_sum();
  static AcceptanceSpec constructive(std::vector<ScalarComponent> components, Exchange exchange);
  static AcceptanceSpec custom_set(Polyhedron acceptance);

  bool conical() const;
  std::string name() const;
};

/// Value of a risk measure at time t, one upper set per time-t node, in
/// nodes_at(t) order.
struct RiskResult {
  int t = 0;
  std::vector<Polyhedron> nodes;
  std::string measure;
  std::vector<std::string> flags;

  const Polyhedron& at(const ScenarioTree& tree, std::size_t n) const { return nodes[tree.node(n).position]; }
};

bool equals(const RiskResult& a, const RiskResult& b);
/// Node-wise superset test.
bool contains_set(const RiskResult& big, const RiskResult& small);
void annotate(RiskResult& r, const MarketModel& m);

/// R_t(X) = {u in M_t : X + u in A_t}. Regulator in closed form, MarketSum by
/// backward recursion, Constructive by projection (t = 0), Custom by
/// projection of the joint system over all time-t nodes.
RiskResult risk_measure(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t);

/// Same value computed by eliminating every auxiliary variable of the
/// acceptance system at once.
RiskResult primal_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t);

/// One step of the recursion: maps the successor sets of a time-t node to
/// the node's value. Regulator and MarketSum only.
using StepEvaluator = std::function<Polyhedron(std::size_t node, const std::vector<Polyhedron>& successor_sets)>;
StepEvaluator stepped_risk(const AcceptanceSpec& spec, const MarketModel& m, int t);

/// Terminal value of the recursion: R_T(X) node by node.
RiskResult terminal_risk(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m);

/// Results for t = 0..T (index t) obtained by backward composition of the
/// one-step evaluators.
std::vector<RiskResult> compose_mptc(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m);

/// Like compose_mptc, but with a caller-chosen evaluator per time (index t,
/// entries for t < T).
std::vector<RiskResult> compose_with(const std::vector<StepEvaluator>& steps, const RiskResult& terminal,
                                     const MarketModel& m);

/// Extra trading cones, one per node (all times). A node without entry
/// contributes nothing.
using ConeField = std::vector<std::optional<Cone>>;

ConeField solvency_field(const MarketModel& m);
/// The solvency cones at the leaves only; nothing before T.
ConeField terminal_solvency_field(const MarketModel& m);

/// Risk measure with acceptance set A_t + sum_{s >= t} L(K'_s).
RiskResult k_compatible_closure(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m,
                                const ConeField& field, int t);

/// k_compatible_closure with the market's own solvency cones.
RiskResult market_extension(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t);

/// Projection onto r of {(Z, r) : X(w) - Z(w) in K(w), r_i >= rho_i(Z_i)},
/// plus the intersection with M_0.
RiskResult constructive_risk(const std::vector<ScalarComponent>& components, Exchange exchange,
                             const AdaptedVector& x, const MarketModel& m);

/// Evaluates a scalar component on one payoff vector (leaf order) under the
/// given leaf probabilities. Independent of the polyhedral epigraphs.
Rational evaluate_component(const ScalarComponent& c, const Vec& payoff, const Vec& probs);

/// 0 lies in every node set of R_t(X).
bool is_acceptable(const AcceptanceSpec& spec, const AdaptedVector& x, const MarketModel& m, int t);

/// LP oracle for X + u in A_t with u a time-t adapted vector; does not build
/// any polyhedron.
bool accepts(const AcceptanceSpec& spec, const AdaptedVector& x, const AdaptedVector& u, const MarketModel& m,
             int t);

}  // namespace setrisk
