#pragma once

#include <vector>

#include "ddml/matrix.hpp"
#include "ddml/rng.hpp"

namespace ddml::nuisance {

struct ForestConfig {
  int trees = 200;
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 5;
  bool classification = false;  // Gini splits, leaf-frequency predictions
  bool bootstrap = true;
  int mtry = 0;  // 0 = ceil(sqrt(p)) for classification, ceil(p/3) for regression

  void validate() const;
  int resolve_mtry(int p) const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Bagged trees with per-node feature subsampling. Per-tree RNG streams are
/// derived from the stream passed to fit, so trees can be grown concurrently
/// without changing results. All within-node reductions run in sorted order,
/// which makes the fitted forest a function of the training multiset alone
/// (row order only matters through the bootstrap draw itself).
class RandomForest {
 public:
  static RandomForest fit(const Matrix& x, const Vector& y, const ForestConfig& cfg,
                          SeededRng& rng);

  Vector predict(const Matrix& x) const;
  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  int input_width() const { return input_width_; }
  bool classification() const { return classification_; }

 private:
  std::vector<DecisionTree> trees_;
  int input_width_ = 0;
  bool classification_ = false;
};

}  // namespace ddml::nuisance
