#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "suffstat/learners/common.hpp"
#include "suffstat/random.hpp"

namespace suffstat {

struct TreeParams {
  std::optional<int> max_depth = 10;  // nullopt: grow until pure or unsplittable
  int min_samples_split = 2;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // rows with x[feature] <= threshold
  int right = -1;
  int label = 1;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                            : n.right);
    }
    return nodes[i].label;
  }

  std::size_t depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].is_leaf()) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  friend bool operator==(const TreeModel&, const TreeModel&) = default;
};

namespace detail {

// CART growth with Gini impurity. `features_per_split` below the width turns
// on per-node feature sampling (random forest); otherwise every feature is
// scanned in column order and `rng` is untouched.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const TreeParams& params,
              std::size_t features_per_split, Rng* rng)
      : x_(x), y_(y), params_(params), mtry_(std::min(features_per_split, x.cols())), rng_(rng) {
    all_features_.resize(x.cols());
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  TreeModel build(std::vector<std::size_t> rows) {
    model_.nodes.clear();
    grow(rows, 0);
    return std::move(model_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = -1.0;  // sum over children of (c1^2 + c0^2) / n_child; larger is purer
  };

  static int majority(std::size_t ones, std::size_t zeros) { return ones >= zeros ? 1 : 0; }

  int grow(std::vector<std::size_t>& rows, int depth) {
    std::size_t ones = 0;
    for (std::size_t r : rows) ones += static_cast<std::size_t>(y_[r]);
    const std::size_t zeros = rows.size() - ones;

    const int id = static_cast<int>(model_.nodes.size());
    model_.nodes.push_back(TreeNode{-1, 0.0, -1, -1, majority(ones, zeros)});

    const bool pure = ones == 0 || zeros == 0;
    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    if (pure || depth_reached || rows.size() < static_cast<std::size_t>(params_.min_samples_split)) {
      return id;
    }
    const auto split = best_split(rows);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int rgt = grow(right, depth + 1);
    auto& node = model_.nodes[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = rgt;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    if (mtry_ >= all_features_.size() || rng_ == nullptr) return all_features_;
    std::vector<std::size_t> pool = all_features_;
    for (std::size_t i = 0; i < mtry_; ++i) {
      const std::size_t j = i + rng_->below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(mtry_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  // Best split even when it does not lower impurity, so an impure node with
  // any non-constant feature always splits.
  std::optional<Split> best_split(const std::vector<std::size_t>& rows) {
    std::optional<Split> best;
    std::size_t total_ones = 0;
    for (std::size_t r : rows) total_ones += static_cast<std::size_t>(y_[r]);
    const std::size_t n = rows.size();

    std::vector<std::pair<double, int>> sorted(n);
    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < n; ++i) sorted[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::size_t left_ones = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_ones += static_cast<std::size_t>(sorted[i].second);
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        const double l1 = static_cast<double>(left_ones);
        const double l0 = nl - l1;
        const double r1 = static_cast<double>(total_ones - left_ones);
        const double r0 = nr - r1;
        const double score = (l1 * l1 + l0 * l0) / nl + (r1 * r1 + r0 * r0) / nr;
        if (!best || score > best->score) {
          double mid = 0.5 * (sorted[i].first + sorted[i + 1].first);
          if (!(mid < sorted[i + 1].first)) mid = sorted[i].first;
          best = Split{f, mid, score};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  TreeParams params_;
  std::size_t mtry_;
  Rng* rng_;
  std::vector<std::size_t> all_features_;
  TreeModel model_;
};

}  // namespace detail

inline TreeModel train_tree(const Matrix& x, std::span<const int> y, const TreeParams& params) {
  detail::check_training_data(x, y);
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return detail::TreeBuilder(x, y, params, x.cols(), nullptr).build(std::move(rows));
}

}  // namespace suffstat
