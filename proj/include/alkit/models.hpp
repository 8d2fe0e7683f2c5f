#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "alkit/matrix.hpp"

namespace alkit::models {

// Binary probabilistic classifier. predict_proba_row returns P(Y=0|x); the
// class-1 probability is its exact complement. Fitting is deterministic
// given (data, config, seed).
class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;

  virtual void fit(const Matrix& x, std::span<const int> y) = 0;
  virtual double predict_proba_row(std::span<const double> x) const = 0;
  virtual bool fitted() const = 0;
  virtual int feature_count() const = 0;

  // P(Y=0|x) for each listed row of x.
  std::vector<double> predict_proba(const Matrix& x, std::span<const int> rows) const;
  std::vector<double> predict_proba(const Matrix& x) const;

  int predict_class_row(std::span<const double> x) const { return predict_proba_row(x) >= 0.5 ? 0 : 1; }
  double accuracy(const Matrix& x, std::span<const int> rows, std::span<const int> labels_all) const;
};

struct LogisticRegressionConfig {
  double l2_strength = 1.0;
  int max_iters = 500;
  double tol = 1e-6;  // gradient infinity-norm stopping threshold
  uint64_t seed = 0;
};

// L2-regularized logistic regression trained by full-batch gradient descent
// with Armijo backtracking, starting from zero parameters.
class LogisticRegression final : public ProbabilisticClassifier {
 public:
  explicit LogisticRegression(LogisticRegressionConfig cfg = {}) : cfg_(cfg) {}

  void fit(const Matrix& x, std::span<const int> y) override;
  double predict_proba_row(std::span<const double> x) const override;
  bool fitted() const override { return fitted_; }
  int feature_count() const override { return static_cast<int>(weights_.size()); }

  std::span<const double> weights() const { return weights_; }
  double bias() const { return bias_; }
  const LogisticRegressionConfig& config() const { return cfg_; }

 private:
  LogisticRegressionConfig cfg_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool fitted_ = false;
};

// Objective and gradient of the logistic fit, exposed so tests can check the
// analytic gradient against finite differences. Loss is the mean logistic
// loss plus l2/(2n) * ||w||^2 (bias unregularized).
double logistic_loss(const Matrix& x, std::span<const int> y, std::span<const double> w, double b, double l2);
void logistic_gradient(const Matrix& x, std::span<const int> y, std::span<const double> w, double b, double l2,
                       std::span<double> grad_w, double& grad_b);

struct RandomForestConfig {
  int tree_count = 100;
  int min_leaf = 1;
  uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int count0 = 0;
  int count1 = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::vector<int> bootstrap;  // row indices drawn with replacement at fit time

  int leaf_for(std::span<const double> x) const;
  double proba0(std::span<const double> x) const;
  int vote(std::span<const double> x) const;  // predicted class, ties -> 0
};

// CART forest: Gini impurity, ceil(sqrt(d)) feature candidates per split,
// bootstrap of size n per tree, grown until pure or no valid split. Soft
// vote: P(Y=0|x) is the mean over trees of the leaf class-0 proportion.
class RandomForest final : public ProbabilisticClassifier {
 public:
  explicit RandomForest(RandomForestConfig cfg = {}) : cfg_(cfg) {}

  void fit(const Matrix& x, std::span<const int> y) override;
  double predict_proba_row(std::span<const double> x) const override;
  bool fitted() const override { return !trees_.empty(); }
  int feature_count() const override { return n_features_; }

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const RandomForestConfig& config() const { return cfg_; }
  int train_rows() const { return n_train_; }

 private:
  RandomForestConfig cfg_;
  std::vector<DecisionTree> trees_;
  int n_features_ = 0;
  int n_train_ = 0;
};

std::unique_ptr<LogisticRegression> fit_logistic_regression(const Matrix& x, std::span<const int> y,
                                                            LogisticRegressionConfig cfg = {});
std::unique_ptr<RandomForest> fit_random_forest(const Matrix& x, std::span<const int> y, RandomForestConfig cfg = {});

struct OobResult {
  double accuracy = 0.0;
  double coverage = 0.0;  // fraction of rows with at least one out-of-bag tree
};

// Out-of-bag accuracy: each row is predicted by majority vote over the trees
// whose bootstrap excluded it; rows covered by no tree are skipped. The
// features/labels must be the rows the forest was fitted on.
OobResult oob_accuracy(const RandomForest& model, const Matrix& x, std::span<const int> y);

}  // namespace alkit::models
