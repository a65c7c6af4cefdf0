#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "treecam/dataset.hpp"
#include "treecam/error.hpp"

namespace treecam {

/// Binary threshold tree stored as a node arena. A split sends
/// `x[feature] <= threshold` to `left` and everything else to `right`.
struct DecisionTree {
  struct Node {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int class_index = 0;

    static Node make_leaf(int cls) {
      Node n;
      n.class_index = cls;
      return n;
    }
    static Node make_split(int feature, double threshold, int left, int right) {
      Node n;
      n.leaf = false;
      n.feature = feature;
      n.threshold = threshold;
      n.left = left;
      n.right = right;
      n.class_index = -1;
      return n;
    }
    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;
  int root = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  std::size_t num_features() const { return feature_names.size(); }
  std::size_t num_classes() const { return class_names.size(); }

  std::size_t num_leaves() const {
    std::size_t n = 0;
    for (const auto& node : nodes) n += node.leaf ? 1 : 0;
    return n;
  }

  std::size_t depth() const { return depth_from(root); }

  /// Throws ConsistencyError unless every reference is in range, every node
  /// is reached exactly once from the root, and no cycle exists.
  void validate() const {
    if (nodes.empty()) throw ConsistencyError("tree has no nodes");
    if (root < 0 || static_cast<std::size_t>(root) >= nodes.size())
      throw ConsistencyError("root index out of range");
    std::vector<int> seen(nodes.size(), 0);
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      if (seen[static_cast<std::size_t>(id)]++) throw ConsistencyError("node " + std::to_string(id) + " reached twice");
      const Node& n = nodes[static_cast<std::size_t>(id)];
      if (n.leaf) {
        if (n.class_index < 0 || static_cast<std::size_t>(n.class_index) >= num_classes())
          throw ConsistencyError("leaf " + std::to_string(id) + " has invalid class");
        continue;
      }
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= num_features())
        throw ConsistencyError("node " + std::to_string(id) + " has invalid feature");
      for (int child : {n.left, n.right}) {
        if (child < 0 || static_cast<std::size_t>(child) >= nodes.size())
          throw ConsistencyError("node " + std::to_string(id) + " has child out of range");
        stack.push_back(child);
      }
    }
  }

  bool operator==(const DecisionTree&) const = default;

 private:
  std::size_t depth_from(int id) const {
    const Node& n = nodes[static_cast<std::size_t>(id)];
    if (n.leaf) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }
};

/// Reference traversal of the tree; the golden oracle for every hardware run.
inline int predict(const DecisionTree& t, const FeatureVector& x) {
  if (x.size() != t.num_features()) throw InputError("input has wrong number of features");
  int id = t.root;
  for (std::size_t steps = 0; steps <= t.nodes.size(); ++steps) {
    if (id < 0 || static_cast<std::size_t>(id) >= t.nodes.size()) throw ConsistencyError("dangling node reference");
    const auto& n = t.nodes[static_cast<std::size_t>(id)];
    if (n.leaf) return n.class_index;
    id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  throw ConsistencyError("cycle in tree");
}

inline double accuracy(const DecisionTree& t, const Dataset& d) {
  if (d.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.size(); ++i) hits += predict(t, d.rows[i]) == d.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

}  // namespace treecam
