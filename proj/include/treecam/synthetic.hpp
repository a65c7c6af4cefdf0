#pragma once

// Seeded random trees and datasets for property tests and scale studies.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "treecam/dataset.hpp"
#include "treecam/tree.hpp"

namespace treecam {

struct RandomTreeSpec {
  std::size_t features = 4;
  std::size_t leaves = 16;
  std::size_t classes = 2;
  /// Thresholds come from the grid k / (levels + 1), k = 1..levels.
  std::size_t levels = 7;
  /// Try to use every (feature, grid threshold) pair at least once, which
  /// makes every feature encode to levels + 1 bits.
  bool cover_all = false;
  /// Grow breadth-first (balanced) instead of splitting random leaves.
  bool balanced = true;
  /// With cover_all, hand out required pairs in feature order so low-index
  /// features split near the root, as in a dataset whose most informative
  /// columns come first.
  bool ranked = false;
  std::uint64_t seed = 1;
};

inline double grid_threshold(std::size_t k, std::size_t levels) {
  return static_cast<double>(k) / static_cast<double>(levels + 1);
}

/// Random binary tree over [0,1]^features. Every split threshold lies strictly
/// inside the region that reaches its node, so no path is empty.
inline DecisionTree random_tree(const RandomTreeSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  DecisionTree t;
  for (std::size_t f = 0; f < spec.features; ++f) t.feature_names.push_back("f" + std::to_string(f));
  for (std::size_t c = 0; c < spec.classes; ++c) t.class_names.push_back("c" + std::to_string(c));

  struct Region {
    std::vector<std::size_t> lo, hi;  // open grid-index bounds
  };
  std::uniform_int_distribution<int> any_class(0, static_cast<int>(spec.classes) - 1);
  t.nodes.push_back(DecisionTree::Node::make_leaf(any_class(rng)));
  t.root = 0;
  std::vector<Region> regions{{std::vector<std::size_t>(spec.features, 0),
                               std::vector<std::size_t>(spec.features, spec.levels + 1)}};
  std::deque<int> open{0};

  std::vector<std::pair<std::size_t, std::size_t>> required;
  if (spec.cover_all) {
    for (std::size_t f = 0; f < spec.features; ++f)
      for (std::size_t k = 1; k <= spec.levels; ++k) required.emplace_back(f, k);
    std::shuffle(required.begin(), required.end(), rng);
    if (spec.ranked)
      std::stable_sort(required.begin(), required.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  std::size_t leaves = 1;
  while (leaves < spec.leaves && !open.empty()) {
    int id;
    if (spec.balanced) {
      id = open.front();
      open.pop_front();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
      const auto at = pick(rng);
      id = open[at];
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(at));
    }
    const Region region = regions[static_cast<std::size_t>(id)];
    auto valid = [&](std::size_t f, std::size_t k) { return region.lo[f] < k && k < region.hi[f]; };

    std::size_t feature = spec.features;
    std::size_t level = 0;
    for (auto it = required.begin(); it != required.end(); ++it) {
      if (valid(it->first, it->second)) {
        feature = it->first;
        level = it->second;
        required.erase(it);
        break;
      }
    }
    if (feature == spec.features) {
      std::vector<std::size_t> candidates;
      for (std::size_t f = 0; f < spec.features; ++f)
        if (region.hi[f] - region.lo[f] > 1) candidates.push_back(f);
      if (candidates.empty()) continue;
      feature = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      level = std::uniform_int_distribution<std::size_t>(region.lo[feature] + 1, region.hi[feature] - 1)(rng);
    }

    const int left = static_cast<int>(t.nodes.size());
    const int right = left + 1;
    t.nodes.push_back(DecisionTree::Node::make_leaf(any_class(rng)));
    t.nodes.push_back(DecisionTree::Node::make_leaf(any_class(rng)));
    t.nodes[static_cast<std::size_t>(id)] =
        DecisionTree::Node::make_split(static_cast<int>(feature), grid_threshold(level, spec.levels), left, right);
    Region l = region;
    Region r = region;
    l.hi[feature] = level;
    r.lo[feature] = level;
    regions.push_back(std::move(l));
    regions.push_back(std::move(r));
    open.push_back(left);
    open.push_back(right);
    ++leaves;
  }
  return t;
}

/// Uniform inputs on [0,1]^N labelled by the tree itself.
inline Dataset sample_dataset(const DecisionTree& t, std::size_t n, std::uint64_t seed) {
  Dataset d;
  d.feature_names = t.feature_names;
  d.class_names = t.class_names;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector x(t.num_features());
    for (auto& v : x) v = u(rng);
    d.labels.push_back(predict(t, x));
    d.rows.push_back(std::move(x));
  }
  return d;
}

/// Inputs drawn from the region of a uniformly chosen leaf, so every path
/// gets exercised regardless of how small its region is.
inline Dataset sample_paths(const DecisionTree& t, std::size_t n, std::uint64_t seed) {
  std::vector<int> leaves;
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].leaf) leaves.push_back(static_cast<int>(i));
  std::vector<int> parent(t.nodes.size(), -1);
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    if (!t.nodes[i].leaf) parent[static_cast<std::size_t>(t.nodes[i].left)] = parent[static_cast<std::size_t>(t.nodes[i].right)] = static_cast<int>(i);

  Dataset d;
  d.feature_names = t.feature_names;
  d.class_names = t.class_names;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, leaves.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int leaf = leaves[pick(rng)];
    std::vector<double> lo(t.num_features(), 0.0), hi(t.num_features(), 1.0);
    for (int child = leaf, p = parent[static_cast<std::size_t>(leaf)]; p >= 0; child = p, p = parent[static_cast<std::size_t>(p)]) {
      const auto& node = t.nodes[static_cast<std::size_t>(p)];
      const auto f = static_cast<std::size_t>(node.feature);
      if (node.left == child)
        hi[f] = std::min(hi[f], node.threshold);
      else
        lo[f] = std::max(lo[f], node.threshold);
    }
    FeatureVector x(t.num_features());
    // u in [0,1) puts x in (lo, hi], matching the <= / > split semantics.
    for (std::size_t f = 0; f < x.size(); ++f) x[f] = hi[f] - (hi[f] - lo[f]) * u(rng);
    d.labels.push_back(predict(t, x));
    d.rows.push_back(std::move(x));
  }
  return d;
}

}  // namespace treecam
