#include "setrisk/tree.hpp"

#include <algorithm>

namespace setrisk {

ScenarioTree ScenarioTree::build(std::size_t d, int horizon, const std::vector<NodeSpec>& specs) {
  if (d < 1) throw InputError("dimension must be >= 1");
  if (horizon < 1) throw InputError("horizon must be ≥ 1");
  ScenarioTree tree;
  tree.d_ = d;
  tree.horizon_ = horizon;

  std::optional<std::size_t> root_spec;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].parent.empty()) {
      if (root_spec) throw InputError("more than one root node");
      root_spec = i;
    }
  }
  if (!root_spec) throw InputError("no root node (a node without parent)");
  std::map<std::string, std::vector<std::size_t>> children_of;
  std::map<std::string, std::size_t> spec_index;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].id.empty()) throw InputError("node with empty id");
    if (!spec_index.emplace(specs[i].id, i).second) throw InputError("duplicate node id '" + specs[i].id + "'");
    if (!specs[i].parent.empty()) children_of[specs[i].parent].push_back(i);
  }
  for (const auto& [parent, kids] : children_of) {
    if (!spec_index.count(parent)) throw InputError("unknown parent '" + parent + "'");
  }
  if (specs[*root_spec].time != 0) throw InputError("root must have time 0");

  // Breadth-first from the root; anything unreached lies on a cycle.
  std::vector<std::size_t> order{*root_spec};
  std::vector<std::optional<std::size_t>> parent_index(specs.size());
  for (std::size_t head = 0; head < order.size(); ++head) {
    const auto it = children_of.find(specs[order[head]].id);
    if (it == children_of.end()) continue;
    for (const std::size_t c : it->second) {
      parent_index[c] = head;
      order.push_back(c);
    }
  }
  if (order.size() != specs.size()) throw InputError("node graph has a cycle or unreachable nodes");

  tree.nodes_.resize(order.size());
  tree.by_time_.assign(static_cast<std::size_t>(horizon) + 1, {});
  for (std::size_t k = 0; k < order.size(); ++k) {
    const NodeSpec& s = specs[order[k]];
    TreeNode& node = tree.nodes_[k];
    node.id = s.id;
    node.time = s.time;
    if (k == 0) {
      node.branch_prob = 1;
      node.prob = 1;
    } else {
      const std::size_t p = *parent_index[order[k]];
      node.parent = p;
      if (s.time != tree.nodes_[p].time + 1) {
        throw InputError("node '" + s.id + "' has time " + std::to_string(s.time) + " but its parent has time " +
                         std::to_string(tree.nodes_[p].time));
      }
      if (sgn(s.prob) <= 0 || s.prob > 1) {
        throw InputError("branch probability of node '" + s.id + "' must lie in (0,1]");
      }
      node.branch_prob = s.prob;
      node.prob = tree.nodes_[p].prob * s.prob;
      tree.nodes_[p].children.push_back(k);
    }
    if (node.time > horizon) throw InputError("node '" + s.id + "' is beyond the horizon");
    node.position = tree.by_time_[static_cast<std::size_t>(node.time)].size();
    tree.by_time_[static_cast<std::size_t>(node.time)].push_back(k);
    tree.ids_[node.id] = k;
  }
  for (const auto& node : tree.nodes_) {
    if (node.children.empty() && node.time != horizon) {
      throw InputError("leaf '" + node.id + "' has time " + std::to_string(node.time) + " instead of the horizon");
    }
    if (!node.children.empty()) {
      Rational sum = 0;
      for (const std::size_t c : node.children) sum += tree.nodes_[c].branch_prob;
      if (sum != 1) {
        throw InputError("branch probabilities below node '" + node.id + "' sum to " + to_string(sum));
      }
    }
  }
  for (int t = 0; t <= horizon; ++t) {
    Rational sum = 0;
    for (const std::size_t n : tree.nodes_at(t)) sum += tree.nodes_[n].prob;
    if (sum != 1) throw InputError("time-" + std::to_string(t) + " node probabilities sum to " + to_string(sum));
  }
  return tree;
}

std::size_t ScenarioTree::index_of(const std::string& id) const {
  const auto it = ids_.find(id);
  if (it == ids_.end()) throw InputError("unknown node id '" + id + "'");
  return it->second;
}

const std::vector<std::size_t>& ScenarioTree::nodes_at(int t) const {
  if (t < 0 || t > horizon_) throw InputError("time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  return by_time_[static_cast<std::size_t>(t)];
}

bool ScenarioTree::is_descendant(std::size_t m, std::size_t n) const {
  if (nodes_[m].time < nodes_[n].time) return false;
  return ancestor_at(m, nodes_[n].time) == n;
}

std::size_t ScenarioTree::ancestor_at(std::size_t n, int t) const {
  if (t > nodes_[n].time) throw Error("ancestor_at: time after the node");
  while (nodes_[n].time > t) n = *nodes_[n].parent;
  return n;
}

std::vector<std::size_t> ScenarioTree::path_from_root(std::size_t n) const {
  std::vector<std::size_t> path{n};
  while (nodes_[n].parent) {
    n = *nodes_[n].parent;
    path.push_back(n);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::size_t> ScenarioTree::descendants_at(std::size_t n, int t) const {
  std::vector<std::size_t> out;
  for (const std::size_t m : nodes_at(t)) {
    if (is_descendant(m, n)) out.push_back(m);
  }
  return out;
}

Rational ScenarioTree::conditional_prob(std::size_t m, std::size_t n) const {
  if (!is_descendant(m, n)) throw Error("conditional_prob: not a descendant");
  return nodes_[m].prob / nodes_[n].prob;
}

ScenarioTree ScenarioTree::subtree(std::size_t n) const {
  const int t0 = nodes_[n].time;
  if (t0 == horizon_) throw InputError("subtree of a leaf has horizon 0");
  std::vector<NodeSpec> specs;
  for (int t = t0; t <= horizon_; ++t) {
    for (const std::size_t m : descendants_at(n, t)) {
      NodeSpec s;
      s.id = nodes_[m].id;
      s.time = t - t0;
      if (m != n) {
        s.parent = nodes_[*nodes_[m].parent].id;
        s.prob = nodes_[m].branch_prob;
      }
      specs.push_back(std::move(s));
    }
  }
  return build(d_, horizon_ - t0, specs);
}

AdaptedVector make_adapted(const ScenarioTree& tree, int time, const std::map<std::string, Vec>& by_id) {
  AdaptedVector x;
  x.time = time;
  for (const std::size_t n : tree.nodes_at(time)) {
    const auto it = by_id.find(tree.node(n).id);
    if (it == by_id.end()) throw InputError("missing value for node '" + tree.node(n).id + "'");
    if (it->second.size() != tree.dim()) throw InputError("value for node '" + tree.node(n).id + "' has wrong length");
    x.values.push_back(it->second);
  }
  for (const auto& [id, v] : by_id) {
    const std::size_t n = tree.index_of(id);
    if (tree.node(n).time != time) throw InputError("node '" + id + "' is not at time " + std::to_string(time));
  }
  return x;
}

AdaptedVector constant_adapted(const ScenarioTree& tree, int time, const Vec& value) {
  return AdaptedVector{time, std::vector<Vec>(tree.nodes_at(time).size(), value)};
}

void check_adapted(const ScenarioTree& tree, const AdaptedVector& x) {
  if (x.values.size() != tree.nodes_at(x.time).size()) throw InputError("adapted vector has wrong node count");
  for (const auto& v : x.values) {
    if (v.size() != tree.dim()) throw InputError("adapted vector entry has wrong dimension");
  }
}

AdaptedVector operator+(const AdaptedVector& x, const AdaptedVector& y) {
  if (x.time != y.time || x.values.size() != y.values.size()) throw Error("adapted vectors differ in time");
  AdaptedVector out{x.time, {}};
  for (std::size_t k = 0; k < x.values.size(); ++k) out.values.push_back(add(x.values[k], y.values[k]));
  return out;
}

AdaptedVector operator-(const AdaptedVector& x, const AdaptedVector& y) {
  if (x.time != y.time || x.values.size() != y.values.size()) throw Error("adapted vectors differ in time");
  AdaptedVector out{x.time, {}};
  for (std::size_t k = 0; k < x.values.size(); ++k) out.values.push_back(sub(x.values[k], y.values[k]));
  return out;
}

AdaptedVector operator*(const Rational& c, const AdaptedVector& x) {
  AdaptedVector out{x.time, {}};
  for (const auto& v : x.values) out.values.push_back(scale(v, c));
  return out;
}

AdaptedVector add_lifted(const ScenarioTree& tree, const AdaptedVector& x, const AdaptedVector& earlier) {
  if (earlier.time > x.time) throw Error("add_lifted: summand measurable later than the claim");
  AdaptedVector out = x;
  const auto& nodes = tree.nodes_at(x.time);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.values[k] = add(out.values[k], earlier.at(tree, tree.ancestor_at(nodes[k], earlier.time)));
  }
  return out;
}

AdaptedVector restrict_to(const ScenarioTree& tree, const AdaptedVector& x, std::size_t n) {
  AdaptedVector out = x;
  const auto& nodes = tree.nodes_at(x.time);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!tree.is_descendant(nodes[k], n)) out.values[k] = zeros(tree.dim());
  }
  return out;
}

VectorMeasure VectorMeasure::physical(const ScenarioTree& tree) {
  Vec p;
  for (const std::size_t l : tree.leaves()) p.push_back(tree.node(l).prob);
  return VectorMeasure{std::vector<Vec>(tree.dim(), p)};
}

bool VectorMeasure::equivalent_to_physical() const {
  for (const auto& c : weights) {
    for (const auto& x : c) {
      if (sgn(x) <= 0) return false;
    }
  }
  return true;
}

void check_measure(const ScenarioTree& tree, const VectorMeasure& q) {
  if (q.weights.size() != tree.dim()) throw InputError("measure must have one component per asset");
  for (const auto& c : q.weights) {
    if (c.size() != tree.num_leaves()) throw InputError("measure component has wrong leaf count");
    Rational sum = 0;
    for (const auto& x : c) {
      if (sgn(x) < 0) throw InputError("measure has a negative weight");
      sum += x;
    }
    if (sum != 1) throw InputError("measure component sums to " + to_string(sum));
  }
}

Rational node_mass(const ScenarioTree& tree, const VectorMeasure& q, std::size_t component, std::size_t n) {
  Rational sum = 0;
  for (const std::size_t l : tree.leaves_under(n)) sum += q.weights[component][tree.node(l).position];
  return sum;
}

AdaptedVector density(const ScenarioTree& tree, const VectorMeasure& q, int r, int s) {
  if (r > s) throw Error("density: r > s");
  check_measure(tree, q);
  AdaptedVector out{s, {}};
  for (const std::size_t m : tree.nodes_at(s)) {
    const std::size_t a = tree.ancestor_at(m, r);
    Vec xi(tree.dim());
    for (std::size_t i = 0; i < tree.dim(); ++i) {
      const Rational qa = node_mass(tree, q, i, a);
      if (sgn(qa) > 0) {
        xi[i] = (node_mass(tree, q, i, m) / tree.node(m).prob) / (qa / tree.node(a).prob);
      } else {
        xi[i] = 1;
      }
    }
    out.values.push_back(std::move(xi));
  }
  return out;
}

AdaptedVector conditional_expectation(const ScenarioTree& tree, const AdaptedVector& x, const VectorMeasure& q,
                                      int t) {
  check_adapted(tree, x);
  if (t > x.time) throw Error("conditional_expectation: t after the measurability time");
  const AdaptedVector xi = density(tree, q, t, x.time);
  AdaptedVector out{t, {}};
  for (const std::size_t n : tree.nodes_at(t)) {
    Vec e = zeros(tree.dim());
    for (const std::size_t m : tree.descendants_at(n, x.time)) {
      const Rational pm = tree.conditional_prob(m, n);
      const Vec& v = x.at(tree, m);
      const Vec& w = xi.at(tree, m);
      for (std::size_t i = 0; i < tree.dim(); ++i) e[i] += pm * w[i] * v[i];
    }
    out.values.push_back(std::move(e));
  }
  return out;
}

AdaptedVector conditional_expectation(const ScenarioTree& tree, const AdaptedVector& x, int t) {
  return conditional_expectation(tree, x, VectorMeasure::physical(tree), t);
}

VectorMeasure pasting(const ScenarioTree& tree, const VectorMeasure& q, const VectorMeasure& r, int s) {
  const int T = tree.horizon();
  const AdaptedVector xq = density(tree, q, 0, s);
  const AdaptedVector xr = density(tree, r, s, T);
  VectorMeasure out{std::vector<Vec>(tree.dim(), Vec(tree.num_leaves()))};
  for (const std::size_t l : tree.leaves()) {
    const Vec& a = xq.at(tree, tree.ancestor_at(l, s));
    const Vec& b = xr.at(tree, l);
    for (std::size_t i = 0; i < tree.dim(); ++i) {
      out.weights[i][tree.node(l).position] = tree.node(l).prob * a[i] * b[i];
    }
  }
  return out;
}

}  // namespace setrisk
