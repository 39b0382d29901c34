#pragma once

#include "setrisk/market.hpp"

namespace setrisk {

/// One-period binomial tree with the given up probability; leaves "u", "d".
ScenarioTree one_period_tree(const Rational& p_up = Rational(1, 2), std::size_t d = 2);
/// Full binary tree of the given horizon; node ids are the up/down paths,
/// "0" for the root. Branch probabilities are 1/2.
ScenarioTree binary_tree(int horizon, std::size_t d = 2);

/// Frictionless cone {x : x_1 + s x_2 >= 0}.
SolvencyCone frictionless_cone(const Rational& s);
/// Two-asset cone with ask a (units of asset 1 per unit of asset 2) and bid
/// 1/b.
SolvencyCone bid_ask_cone(const Rational& a, const Rational& b);

/// Frictionless one-period market, S_0 = 1, S_T in {2, 1/2}, P(u) = 1/2.
MarketModel instance_a();
/// Instance A with proportional transaction costs.
MarketModel instance_b();
/// Two-period frictionless market, S multiplied by 2 or 1/2 each period.
MarketModel instance_c();
/// Instance A with P(u) = 1/3, so that tail measures see unequal weights.
MarketModel instance_d();

/// Asset price of asset 2 along the binomial trees above, by node id.
Rational binomial_price(const std::string& id);

/// A claim paying v at every leaf.
AdaptedVector constant_claim(const ScenarioTree& tree, const Vec& v);

}  // namespace setrisk
