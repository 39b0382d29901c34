#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "setrisk/rational.hpp"

namespace setrisk {

struct TreeNode {
  std::string id;
  std::optional<std::size_t> parent;
  int time = 0;
  Rational branch_prob = 1;
  Rational prob = 1;
  std::vector<std::size_t> children;
  std::size_t position = 0;  // index within nodes_at(time)
};

/// Finite filtered probability space as a rooted tree. F_t is the partition
/// of the leaves by the time-t nodes.
class ScenarioTree {
 public:
  struct NodeSpec {
    std::string id;
    std::string parent;  // empty for the root
    int time = 0;
    Rational prob = 1;   // branch probability from the parent
  };

  static ScenarioTree build(std::size_t d, int horizon, const std::vector<NodeSpec>& nodes);

  std::size_t dim() const { return d_; }
  int horizon() const { return horizon_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return 0; }
  const TreeNode& node(std::size_t n) const { return nodes_[n]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  std::size_t index_of(const std::string& id) const;
  const std::vector<std::size_t>& nodes_at(int t) const;
  const std::vector<std::size_t>& leaves() const { return nodes_at(horizon_); }
  std::size_t num_leaves() const { return leaves().size(); }

  bool is_leaf(std::size_t n) const { return nodes_[n].children.empty(); }
  /// m lies in the subtree rooted at n (n itself included).
  bool is_descendant(std::size_t m, std::size_t n) const;
  std::size_t ancestor_at(std::size_t n, int t) const;
  std::vector<std::size_t> path_from_root(std::size_t n) const;
  /// Descendants of n at time t >= time(n), in nodes_at(t) order.
  std::vector<std::size_t> descendants_at(std::size_t n, int t) const;
  std::vector<std::size_t> leaves_under(std::size_t n) const { return descendants_at(n, horizon_); }
  /// P(m | n) for a descendant m of n.
  Rational conditional_prob(std::size_t m, std::size_t n) const;

  /// The subtree at n as a tree of its own: times shifted by time(n),
  /// probabilities conditioned on n. Node ids are kept.
  ScenarioTree subtree(std::size_t n) const;

 private:
  std::size_t d_ = 1;
  int horizon_ = 1;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<std::size_t>> by_time_;
  std::map<std::string, std::size_t> ids_;
};

/// Per-node d-vectors on the nodes of one time, in nodes_at(time) order.
struct AdaptedVector {
  int time = 0;
  std::vector<Vec> values;

  const Vec& at(const ScenarioTree& tree, std::size_t n) const { return values[tree.node(n).position]; }
};

AdaptedVector make_adapted(const ScenarioTree& tree, int time, const std::map<std::string, Vec>& by_id);
AdaptedVector constant_adapted(const ScenarioTree& tree, int time, const Vec& value);
void check_adapted(const ScenarioTree& tree, const AdaptedVector& x);

AdaptedVector operator+(const AdaptedVector& x, const AdaptedVector& y);
AdaptedVector operator-(const AdaptedVector& x, const AdaptedVector& y);
AdaptedVector operator*(const Rational& c, const AdaptedVector& x);
/// Adds a time-t value to a claim measurable at a later time.
AdaptedVector add_lifted(const ScenarioTree& tree, const AdaptedVector& x, const AdaptedVector& earlier);
/// 1_D X where D is the event of node n (a node at time <= time of X).
AdaptedVector restrict_to(const ScenarioTree& tree, const AdaptedVector& x, std::size_t n);

/// d probability measures on the leaves. weights[i][k] is the mass of
/// component i on leaf k (leaf order of the tree).
struct VectorMeasure {
  std::vector<Vec> weights;

  static VectorMeasure physical(const ScenarioTree& tree);
  bool equivalent_to_physical() const;
  bool operator==(const VectorMeasure&) const = default;
};

void check_measure(const ScenarioTree& tree, const VectorMeasure& q);

/// Q_i(node) summed over the leaves below the node.
Rational node_mass(const ScenarioTree& tree, const VectorMeasure& q, std::size_t component, std::size_t n);

/// xi_{r,s}(Q) as a time-s adapted vector: the ratio of the density at s to
/// the density at r where the latter is positive, and 1 elsewhere.
AdaptedVector density(const ScenarioTree& tree, const VectorMeasure& q, int r, int s);

/// E^Q[X | F_t] with the componentwise density convention above. X may be
/// measurable at any time s >= t.
AdaptedVector conditional_expectation(const ScenarioTree& tree, const AdaptedVector& x, const VectorMeasure& q,
                                      int t);

/// Plain conditional expectation under P.
AdaptedVector conditional_expectation(const ScenarioTree& tree, const AdaptedVector& x, int t);

/// Q before s, R after s.
VectorMeasure pasting(const ScenarioTree& tree, const VectorMeasure& q, const VectorMeasure& r, int s);

}  // namespace setrisk
