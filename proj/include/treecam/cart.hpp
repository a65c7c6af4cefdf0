#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "treecam/dataset.hpp"
#include "treecam/tree.hpp"

namespace treecam {

struct CartParams {
  /// 0 means unlimited.
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 2;
};

namespace detail {

class CartBuilder {
 public:
  CartBuilder(const Dataset& d, const CartParams& p) : data_(d), params_(p), classes_(d.num_classes()) {}

  DecisionTree run() {
    DecisionTree t;
    t.feature_names = data_.feature_names;
    t.class_names = data_.class_names;
    std::vector<std::size_t> all(data_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    tree_ = &t;
    t.root = grow(all, 0);
    return t;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double cost = std::numeric_limits<double>::infinity();
  };

  std::vector<std::size_t> count(const std::vector<std::size_t>& idx) const {
    std::vector<std::size_t> c(classes_, 0);
    for (auto i : idx) ++c[static_cast<std::size_t>(data_.labels[i])];
    return c;
  }

  // n * gini = n - sum(c^2)/n
  static double weighted_gini(const std::vector<std::size_t>& counts, std::size_t n) {
    if (n == 0) return 0.0;
    double sq = 0.0;
    for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
    return static_cast<double>(n) - sq / static_cast<double>(n);
  }

  static int majority(const std::vector<std::size_t>& counts) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

  Split best_split(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& total) const {
    Split best;
    const std::size_t n = idx.size();
    std::vector<std::size_t> order = idx;
    for (std::size_t f = 0; f < data_.num_features(); ++f) {
      auto value = [&](std::size_t i) { return data_.rows[i][f]; };
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value(a) < value(b); });
      std::vector<std::size_t> left(classes_, 0);
      std::vector<std::size_t> right = total;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto cls = static_cast<std::size_t>(data_.labels[order[k]]);
        ++left[cls];
        --right[cls];
        const double lo = value(order[k]);
        const double hi = value(order[k + 1]);
        if (!(lo < hi)) continue;
        const std::size_t nl = k + 1;
        const std::size_t nr = n - nl;
        if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
        const double cost = weighted_gini(left, nl) + weighted_gini(right, nr);
        if (cost < best.cost) {
          double mid = lo + (hi - lo) / 2.0;
          // Guard against the midpoint rounding onto the upper value.
          if (!(mid < hi)) mid = lo;
          best = {static_cast<int>(f), mid, cost};
        }
      }
    }
    return best;
  }

  int grow(const std::vector<std::size_t>& idx, std::size_t depth) {
    const auto counts = count(idx);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_cap = params_.max_depth != 0 && depth >= params_.max_depth;
    if (pure || depth_cap || idx.size() < params_.min_samples_split) return add_leaf(majority(counts));

    const Split s = best_split(idx, counts);
    if (s.feature < 0) return add_leaf(majority(counts));

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (auto i : idx) (data_.rows[i][static_cast<std::size_t>(s.feature)] <= s.threshold ? left_idx : right_idx).push_back(i);

    const int id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.push_back(DecisionTree::Node::make_split(s.feature, s.threshold, -1, -1));
    const int l = grow(left_idx, depth + 1);
    const int r = grow(right_idx, depth + 1);
    tree_->nodes[static_cast<std::size_t>(id)].left = l;
    tree_->nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  int add_leaf(int cls) {
    tree_->nodes.push_back(DecisionTree::Node::make_leaf(cls));
    return static_cast<int>(tree_->nodes.size()) - 1;
  }

  const Dataset& data_;
  CartParams params_;
  std::size_t classes_;
  DecisionTree* tree_ = nullptr;
};

}  // namespace detail

/// Greedy Gini CART. Candidate thresholds are midpoints between consecutive
/// distinct values; ties go to the lowest feature index, then the smallest
/// threshold. Leaves take the majority class, lowest index on ties.
inline DecisionTree train_cart(const Dataset& train, const CartParams& params = {}) {
  if (train.empty()) throw InputError("cannot train on an empty dataset");
  return detail::CartBuilder(train, params).run();
}

}  // namespace treecam
