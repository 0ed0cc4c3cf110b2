#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "suffstat/learners/tree.hpp"

namespace suffstat {

struct ForestParams {
  int n_trees = 100;
  bool bootstrap = true;
  int max_features = 0;  // 0: ceil(sqrt(width))
  TreeParams tree;

  std::size_t features_per_split(std::size_t width) const {
    if (max_features > 0) return std::min<std::size_t>(static_cast<std::size_t>(max_features), width);
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width))));
  }

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct ForestModel {
  std::vector<TreeModel> trees;

  // Majority vote; a tie goes to label 1.
  int predict(std::span<const double> row) const {
    std::size_t ones = 0;
    for (const auto& t : trees) ones += static_cast<std::size_t>(t.predict(row));
    return 2 * ones >= trees.size() ? 1 : 0;
  }

  friend bool operator==(const ForestModel&, const ForestModel&) = default;
};

inline ForestModel train_forest(const Matrix& x, std::span<const int> y, const ForestParams& params,
                                std::uint64_t seed) {
  detail::check_training_data(x, y);
  const std::size_t n = x.rows();
  const std::size_t mtry = params.features_per_split(x.cols());
  ForestModel forest;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(seed, "tree", t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    forest.trees.push_back(detail::TreeBuilder(x, y, params.tree, mtry, &rng).build(std::move(rows)));
  }
  return forest;
}

}  // namespace suffstat
