#pragma once

#include "trendlab/random.hpp"
#include "trendlab/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace trendlab {

struct RfParams {
  Index mtry = 3;
  Index n_trees = 100;
  std::uint64_t seed = 1;
};

/// Leaf when feature < 0. Samples with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  [[nodiscard]] int predict(const Eigen::Ref<const VectorXd>& x) const;
  [[nodiscard]] Index depth() const;
};

struct RfModel {
  Index feature_count = 0;
  std::vector<DecisionTree> trees;

  /// Fraction of trees voting +1.
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const;
};

/// Unpruned CART tree on the given (possibly repeated) row indices, Gini
/// splits over `mtry` randomly drawn features per node.
DecisionTree grow_tree(const MatrixXd& X, const Labels& y, std::span<const Index> rows, Index mtry, Rng& rng);

RfModel train_rf(const MatrixXd& X, const Labels& y, const RfParams& params);

}  // namespace trendlab
