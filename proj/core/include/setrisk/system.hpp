#pragma once

#include <map>
#include <vector>

#include "setrisk/lp.hpp"
#include "setrisk/polyhedron.hpp"
#include "setrisk/risk.hpp"

namespace setrisk {

/// Sparse affine expression sum_j terms[j] x_j + constant.
struct Affine {
  std::map<std::size_t, Rational> terms;
  Rational constant;

  static Affine var(std::size_t j, const Rational& c = 1);
  static Affine value(const Rational& c);
  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
};

Affine operator+(Affine a, const Affine& b);
Affine operator-(Affine a, const Affine& b);
Affine operator*(const Rational& c, Affine a);
Rational evaluate(const Affine& e, const Vec& x);

using AffineVec = std::vector<Affine>;

/// Incrementally assembled linear system over lifted variables.
class SystemBuilder {
 public:
  std::size_t add_vars(std::size_t count);
  std::size_t num_vars() const { return num_vars_; }

  void add_ge(const Affine& e);  // e >= 0
  void add_eq(const Affine& e);  // e = 0
  /// v lies in the polyhedron.
  void add_in(const Polyhedron& set, const AffineVec& v);

  LinearSystem build() const;
  LinearProgram program(const Affine& objective) const;

 private:
  std::size_t num_vars_ = 0;
  std::vector<Affine> ge_;
  std::vector<Affine> eq_;
};

/// Vertices of {xi : 0 <= xi <= 1/(1-level), sum p xi = 1}, the densities
/// over which AVaR takes its supremum. Level 1 is rejected (worst case).
std::vector<Vec> avar_densities(const Vec& probs, const Rational& level);

/// Constraints expressing "Y lies in the acceptance set at node n" for a
/// local spec (Regulator, MarketSum, Constructive), where y holds one
/// d-vector expression per leaf below n in leaf order. Extra cones are added
/// as trading opportunities at each node of the subtree.
void add_local_acceptance(SystemBuilder& b, const AcceptanceSpec& spec, const MarketModel& m, std::size_t n,
                          const std::vector<AffineVec>& y, const ConeField* extra = nullptr);

/// Constraints for Custom specs; y covers every leaf of the tree.
void add_custom_acceptance(SystemBuilder& b, const AcceptanceSpec& spec, const MarketModel& m,
                           const std::vector<AffineVec>& y);

/// Y(w) = X(w) + u(node above w at time t) for the leaves below n, with u
/// given by the d variables starting at `u_first[k]` for the k-th time-t
/// node below n.
std::vector<AffineVec> shifted_claim(const MarketModel& m, const AdaptedVector& x, int t, std::size_t n,
                                     const std::map<std::size_t, std::size_t>& u_first);

/// Eligibility constraints u in M_t on d variables starting at `first`.
void add_eligible(SystemBuilder& b, const EligibleSpace& space, std::size_t first);

}  // namespace setrisk
