#include <algorithm>
#include <cmath>

#include "alkit/errors.hpp"
#include "alkit/models.hpp"

namespace alkit::models {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow
double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

}  // namespace

namespace detail {

void check_fit_inputs(const Matrix& x, std::span<const int> y) {
  if (x.rows() != static_cast<int>(y.size())) throw DomainError("fit: feature/label row count mismatch");
  if (x.rows() < 2) throw DomainError("fit: need at least 2 rows");
  bool has0 = false, has1 = false;
  for (int v : y) {
    if (v == 0) has0 = true;
    else if (v == 1) has1 = true;
    else throw DomainError("fit: labels must be 0 or 1");
  }
  if (!has0 || !has1) throw DomainError("fit: both classes must be present");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw DomainError("fit: non-finite feature value");
  }
}

}  // namespace detail

std::vector<double> ProbabilisticClassifier::predict_proba(const Matrix& x, std::span<const int> rows) const {
  if (!fitted()) throw DomainError("predict_proba: model not fitted");
  if (x.cols() != feature_count()) throw DomainError("predict_proba: feature width mismatch");
  std::vector<double> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(predict_proba_row(x.row(r)));
  return out;
}

std::vector<double> ProbabilisticClassifier::predict_proba(const Matrix& x) const {
  std::vector<int> rows(x.rows());
  for (int i = 0; i < x.rows(); ++i) rows[i] = i;
  return predict_proba(x, rows);
}

double ProbabilisticClassifier::accuracy(const Matrix& x, std::span<const int> rows,
                                         std::span<const int> labels_all) const {
  if (rows.empty()) throw DomainError("accuracy: no rows");
  int correct = 0;
  for (int r : rows) {
    if (predict_class_row(x.row(r)) == labels_all[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double logistic_loss(const Matrix& x, std::span<const int> y, std::span<const double> w, double b, double l2) {
  const int n = x.rows();
  double loss = 0.0;
  for (int r = 0; r < n; ++r) {
    auto row = x.row(r);
    double z = b;
    for (int c = 0; c < x.cols(); ++c) z += w[c] * row[c];
    const double t = y[r] == 1 ? 1.0 : -1.0;
    loss += softplus(-t * z);
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  for (double v : w) reg += v * v;
  return loss + 0.5 * l2 * reg / static_cast<double>(n);
}

void logistic_gradient(const Matrix& x, std::span<const int> y, std::span<const double> w, double b, double l2,
                       std::span<double> grad_w, double& grad_b) {
  const int n = x.rows();
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (int r = 0; r < n; ++r) {
    auto row = x.row(r);
    double z = b;
    for (int c = 0; c < x.cols(); ++c) z += w[c] * row[c];
    const double resid = sigmoid(z) - (y[r] == 1 ? 1.0 : 0.0);
    for (int c = 0; c < x.cols(); ++c) grad_w[c] += resid * row[c];
    grad_b += resid;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int c = 0; c < x.cols(); ++c) grad_w[c] = grad_w[c] * inv_n + l2 * inv_n * w[c];
  grad_b *= inv_n;
}

void LogisticRegression::fit(const Matrix& x, std::span<const int> y) {
  detail::check_fit_inputs(x, y);
  const int d = x.cols();
  weights_.assign(d, 0.0);
  bias_ = 0.0;

  std::vector<double> grad(d);
  std::vector<double> trial_w(d);
  double grad_b = 0.0;
  double loss = logistic_loss(x, y, weights_, bias_, cfg_.l2_strength);

  for (int iter = 0; iter < cfg_.max_iters; ++iter) {
    logistic_gradient(x, y, weights_, bias_, cfg_.l2_strength, grad, grad_b);
    double gmax = std::abs(grad_b);
    double gsq = grad_b * grad_b;
    for (double g : grad) {
      gmax = std::max(gmax, std::abs(g));
      gsq += g * g;
    }
    if (gmax < cfg_.tol) break;

    // Armijo backtracking from a unit step
    double step = 1.0;
    double trial_b = 0.0;
    double trial_loss = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (int c = 0; c < d; ++c) trial_w[c] = weights_[c] - step * grad[c];
      trial_b = bias_ - step * grad_b;
      trial_loss = logistic_loss(x, y, trial_w, trial_b, cfg_.l2_strength);
      if (trial_loss <= loss - 1e-4 * step * gsq) break;
      step *= 0.5;
    }
    weights_ = trial_w;
    bias_ = trial_b;
    loss = trial_loss;
  }
  for (double v : weights_) {
    if (!std::isfinite(v)) throw DomainError("logistic fit produced non-finite weights");
  }
  fitted_ = true;
}

double LogisticRegression::predict_proba_row(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != feature_count()) throw DomainError("predict: feature width mismatch");
  double z = bias_;
  for (size_t c = 0; c < x.size(); ++c) z += weights_[c] * x[c];
  return sigmoid(-z);  // P(Y=0|x); class 1 is the positive logit
}

std::unique_ptr<LogisticRegression> fit_logistic_regression(const Matrix& x, std::span<const int> y,
                                                            LogisticRegressionConfig cfg) {
  auto model = std::make_unique<LogisticRegression>(cfg);
  model->fit(x, y);
  return model;
}

}  // namespace alkit::models
