#pragma once

#include <optional>
#include <vector>

#include "uql/boolfn.hpp"

namespace uql {

class DecisionTree {
 public:
  struct Node {
    int var = -1;  // -1 for a leaf
    int lo = -1;
    int hi = -1;
    bool value = false;  // leaf output

    bool leaf() const { return var < 0; }
  };

  // Validates child references, acyclicity and that no root-to-leaf path
  // queries a coordinate twice.
  DecisionTree(std::vector<Node> nodes, int root);

  static DecisionTree leaf(bool value);
  static DecisionTree query(int var, const DecisionTree& lo, const DecisionTree& hi);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int root() const { return root_; }
  // Largest queried coordinate, -1 for a single leaf.
  int max_var() const { return max_var_; }
  // Copy of the subtree rooted at node id.
  DecisionTree subtree(int id) const;

 private:
  std::vector<Node> nodes_;
  int root_;
  int max_var_ = -1;
};

bool tree_eval(const DecisionTree& t, Input x);
double average_depth(const DecisionTree& t);
// Sum over leaves of 2^-depth * depth.
double average_depth_by_leaves(const DecisionTree& t);
double query_probability(const DecisionTree& t, int i);
std::vector<double> query_probabilities(const DecisionTree& t, int n);

// Function computed by the tree on n inputs.
BooleanFunction tree_function(const DecisionTree& t, int n);

struct InfluentialCheck {
  bool ok = true;
  std::optional<int> violating_node;
};

// Every internal node v must satisfy Inf_{ind(v)}[f_v] >= tau, where f_v is f
// restricted by the root-to-v path. Nodes are visited in preorder, 0-branch
// first.
InfluentialCheck is_everywhere_influential(const DecisionTree& t, const BooleanFunction& f, double tau);

// Top-down pruning: a node whose coordinate has influence below tau under its
// path restriction is replaced by the child subtree closer to f on that
// subcube (ties to the 0-branch) and the replacement is examined again.
// Throws ConfigError if t does not compute f, ContractViolation if the result
// is not everywhere tau-influential or is farther than tau*Delta(t) from f.
DecisionTree prune(const DecisionTree& t, const BooleanFunction& f, double tau);

// Same procedure without the precondition or postcondition checks.
DecisionTree prune_unchecked(const DecisionTree& t, const BooleanFunction& f, double tau);

// sum_i delta_i(T) Inf_i[f] - (bias(f) - dist(f, T)).
double osss_slack(const BooleanFunction& f, const DecisionTree& t);

bool trees_equal(const DecisionTree& a, const DecisionTree& b);

}  // namespace uql
