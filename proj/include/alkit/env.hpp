#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "alkit/dataset.hpp"
#include "alkit/matrix.hpp"
#include "alkit/models.hpp"

namespace alkit::env {

// Classifier scores on the reserved V set, sorted descending. The fixed
// ordering makes the vector invariant to V's storage order.
struct StateVector {
  std::vector<double> scores;
};

struct ActionFeatures {
  double score = 0.0;                // P(Y=0 | candidate) under the current classifier
  double mean_dist_labelled = 0.0;   // mean cosine distance to the labelled set, in [0,2]
  double mean_dist_unlabelled = 0.0; // mean cosine distance to the unlabelled set, in [0,2]
};

enum class TerminalReason { none, quality_reached, pool_exhausted, step_cap };

using ModelFactory = std::function<std::unique_ptr<models::ProbabilisticClassifier>()>;

// Optional hook replacing the quality computation; receives the step count.
using QualityFn = std::function<double(int)>;

struct ModelSpec {
  enum class Kind { logistic_regression, random_forest };
  Kind kind = Kind::logistic_regression;
  models::LogisticRegressionConfig lr;
  models::RandomForestConfig rf;

  std::unique_ptr<models::ProbabilisticClassifier> make() const;
  ModelFactory factory() const;
};

struct EpisodeParts {
  std::shared_ptr<const Matrix> features;  // preprocessed embedding for all rows
  std::shared_ptr<const std::vector<int>> labels;
  std::vector<int> train_rows;
  std::vector<int> test_rows;
  std::vector<int> v_rows;  // may be empty when no learned policy is involved
  std::array<int, 2> initial_rows{-1, -1};
  ModelFactory model_factory;
  double threshold = std::numeric_limits<double>::infinity();
  int max_steps = 0;  // 0 = unbounded
  QualityFn quality_override;
};

class EpisodeState {
 public:
  static EpisodeState create(EpisodeParts parts);

  const Matrix& features() const { return *features_; }
  std::span<const int> labels_all() const { return *labels_; }
  std::span<const int> train_rows() const { return train_rows_; }
  std::span<const int> test_rows() const { return test_rows_; }
  std::span<const int> v_rows() const { return v_rows_; }
  std::span<const int> labelled() const { return labelled_; }
  std::span<const int> unlabelled() const { return unlabelled_; }
  const models::ProbabilisticClassifier& classifier() const { return *model_; }
  double quality() const { return quality_; }
  double threshold() const { return threshold_; }
  int step_count() const { return step_count_; }
  bool in_unlabelled(int row) const { return row >= 0 && row < static_cast<int>(pool_mask_.size()) && pool_mask_[row]; }
  int label_of(int row) const { return (*labels_)[row]; }
  double row_norm(int row) const { return row_norms_[row]; }
  std::array<int, 2> initial_rows() const { return initial_rows_; }

  struct StepOutcome {
    double reward = -1.0;
    bool terminal = false;
    TerminalReason reason = TerminalReason::none;
  };
  StepOutcome step(int chosen_row);

 private:
  EpisodeState() = default;
  void refit();
  void recompute_quality();

  std::shared_ptr<const Matrix> features_;
  std::shared_ptr<const std::vector<int>> labels_;
  std::vector<int> train_rows_, test_rows_, v_rows_;
  std::vector<int> labelled_, unlabelled_;
  std::vector<char> pool_mask_;
  std::array<int, 2> initial_rows_{-1, -1};
  ModelFactory model_factory_;
  std::unique_ptr<models::ProbabilisticClassifier> model_;
  std::vector<double> row_norms_;
  double quality_ = 0.0;
  double threshold_ = std::numeric_limits<double>::infinity();
  int step_count_ = 0;
  int max_steps_ = 0;
  QualityFn quality_override_;
};

struct EpisodeConfig {
  double test_fraction = 1.0 / 3.0;
  int v_size = 30;
  int max_steps = 0;             // 0 = unbounded (the pool size bounds the episode anyway)
  double quality_factor = 0.98;  // threshold q = factor * full-data test accuracy
  ModelSpec model;
  uint64_t seed = 0;
  QualityFn quality_override;  // test hook replacing the accuracy computation
};

// Splits the dataset into training/test parts, fits the preprocessing on the
// training part, reserves the V rows, draws one initial label per class,
// computes the quality threshold from a classifier fitted on all training
// rows, and fits the initial classifier.
EpisodeState begin_episode(const data::Dataset& raw, const EpisodeConfig& cfg);

StateVector compute_state(const EpisodeState& state);
ActionFeatures compute_action_features(const EpisodeState& state, int candidate_row);

// Moves the chosen row from the pool to the labelled set with its true
// label, refits the classifier, and recomputes the quality. Reward is -1 at
// every step; the episode terminates when quality reaches the threshold, the
// pool empties, or the step cap is hit.
EpisodeState::StepOutcome step(EpisodeState& state, int chosen_row);

double cosine_distance(std::span<const double> a, std::span<const double> b, double norm_a, double norm_b);

}  // namespace alkit::env
