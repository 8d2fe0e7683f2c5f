#include "alkit/env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alkit/errors.hpp"
#include "alkit/rng.hpp"

namespace alkit::env {

std::unique_ptr<models::ProbabilisticClassifier> ModelSpec::make() const {
  if (kind == Kind::logistic_regression) return std::make_unique<models::LogisticRegression>(lr);
  return std::make_unique<models::RandomForest>(rf);
}

ModelFactory ModelSpec::factory() const {
  ModelSpec copy = *this;
  return [copy]() { return copy.make(); };
}

double cosine_distance(std::span<const double> a, std::span<const double> b, double norm_a, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 1.0;  // zero vector: cos = 0
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return 1.0 - dot / (norm_a * norm_b);
}

EpisodeState EpisodeState::create(EpisodeParts parts) {
  if (!parts.features || !parts.labels) throw DomainError("episode: features/labels missing");
  if (!parts.model_factory) throw DomainError("episode: model factory missing");
  if (parts.initial_rows[0] < 0 || parts.initial_rows[1] < 0) throw DomainError("episode: initial rows missing");
  if (parts.test_rows.empty()) throw DomainError("episode: test rows missing");

  EpisodeState s;
  s.features_ = std::move(parts.features);
  s.labels_ = std::move(parts.labels);
  s.train_rows_ = std::move(parts.train_rows);
  s.test_rows_ = std::move(parts.test_rows);
  s.v_rows_ = std::move(parts.v_rows);
  s.initial_rows_ = parts.initial_rows;
  s.model_factory_ = std::move(parts.model_factory);
  s.threshold_ = parts.threshold;
  s.max_steps_ = parts.max_steps;
  s.quality_override_ = std::move(parts.quality_override);

  s.pool_mask_.assign(s.features_->rows(), 0);
  std::vector<char> excluded(s.features_->rows(), 0);
  excluded[s.initial_rows_[0]] = 1;
  excluded[s.initial_rows_[1]] = 1;
  for (int r : s.v_rows_) excluded[r] = 1;
  for (int r : s.train_rows_) {
    if (!excluded[r]) {
      s.unlabelled_.push_back(r);
      s.pool_mask_[r] = 1;
    }
  }
  if (s.unlabelled_.empty()) throw DomainError("episode: candidate pool is empty");
  s.labelled_ = {s.initial_rows_[0], s.initial_rows_[1]};

  s.row_norms_.resize(s.features_->rows());
  for (int r = 0; r < s.features_->rows(); ++r) {
    double ss = 0.0;
    for (double v : s.features_->row(r)) ss += v * v;
    s.row_norms_[r] = std::sqrt(ss);
  }

  s.refit();
  s.recompute_quality();
  return s;
}

void EpisodeState::refit() {
  Matrix x = gather_rows(*features_, labelled_);
  std::vector<int> y = gather<int>(std::span<const int>(*labels_), labelled_);
  model_ = model_factory_();
  model_->fit(x, y);
}

void EpisodeState::recompute_quality() {
  if (quality_override_) {
    quality_ = quality_override_(step_count_);
    return;
  }
  quality_ = model_->accuracy(*features_, test_rows_, *labels_);
}

EpisodeState::StepOutcome EpisodeState::step(int chosen_row) {
  if (!in_unlabelled(chosen_row)) {
    std::ostringstream msg;
    msg << "step: row " << chosen_row << " is not in the unlabelled pool";
    throw DomainError(msg.str());
  }
  unlabelled_.erase(std::find(unlabelled_.begin(), unlabelled_.end(), chosen_row));
  pool_mask_[chosen_row] = 0;
  labelled_.push_back(chosen_row);
  ++step_count_;
  refit();
  recompute_quality();

  StepOutcome out;
  out.reward = -1.0;
  if (quality_ >= threshold_) {
    out.terminal = true;
    out.reason = TerminalReason::quality_reached;
  } else if (unlabelled_.empty()) {
    out.terminal = true;
    out.reason = TerminalReason::pool_exhausted;
  } else if (max_steps_ > 0 && step_count_ >= max_steps_) {
    out.terminal = true;
    out.reason = TerminalReason::step_cap;
  }
  return out;
}

EpisodeState begin_episode(const data::Dataset& raw, const EpisodeConfig& cfg) {
  if (cfg.v_size < 1) throw DomainError("begin_episode: v_size must be >= 1");
  const int min_train = cfg.v_size + 3;

  auto [train, test] = data::stratified_split(raw.labels, cfg.test_fraction, SeedSeq(cfg.seed).mix("split").value());
  if (static_cast<int>(train.size()) < min_train) {
    std::ostringstream msg;
    msg << "begin_episode: training split has " << train.size() << " rows; needs >= " << min_train << " ("
        << cfg.v_size << " for V, one initial label per class, non-empty pool)";
    throw DomainError(msg.str());
  }

  data::PreprocessSpec spec = data::fit_preprocess(raw, train);
  data::Dataset ds = data::apply_preprocess(spec, raw);

  // reserve V uniformly from the training rows
  std::vector<int> shuffled = train;
  SplitMix64 v_rng(SeedSeq(cfg.seed).mix("vset").value());
  shuffle(shuffled, v_rng);
  std::vector<int> v_rows(shuffled.begin(), shuffled.begin() + cfg.v_size);
  std::sort(v_rows.begin(), v_rows.end());

  std::vector<int> init_pool;
  { // training rows outside V
    std::vector<char> in_v(ds.rows(), 0);
    for (int r : v_rows) in_v[r] = 1;
    for (int r : train)
      if (!in_v[r]) init_pool.push_back(r);
  }
  auto initial = data::sample_initial_labels(init_pool, ds.labels, SeedSeq(cfg.seed).mix("init").value());

  // quality threshold from the model fitted on all training rows
  auto full_model = cfg.model.make();
  {
    Matrix x = gather_rows(ds.features, train);
    std::vector<int> y = gather<int>(std::span<const int>(ds.labels), train);
    full_model->fit(x, y);
  }
  const double q = cfg.quality_factor * full_model->accuracy(ds.features, test, ds.labels);

  EpisodeParts parts;
  parts.features = std::make_shared<const Matrix>(std::move(ds.features));
  parts.labels = std::make_shared<const std::vector<int>>(std::move(ds.labels));
  parts.train_rows = std::move(train);
  parts.test_rows = std::move(test);
  parts.v_rows = std::move(v_rows);
  parts.initial_rows = initial;
  parts.model_factory = cfg.model.factory();
  parts.threshold = q;
  parts.max_steps = cfg.max_steps;
  parts.quality_override = cfg.quality_override;
  return EpisodeState::create(std::move(parts));
}

StateVector compute_state(const EpisodeState& state) {
  if (state.v_rows().empty()) throw DomainError("compute_state: no V rows reserved");
  StateVector sv;
  sv.scores = state.classifier().predict_proba(state.features(), state.v_rows());
  std::sort(sv.scores.begin(), sv.scores.end(), std::greater<double>());
  return sv;
}

ActionFeatures compute_action_features(const EpisodeState& state, int candidate_row) {
  if (!state.in_unlabelled(candidate_row)) {
    std::ostringstream msg;
    msg << "compute_action_features: row " << candidate_row << " is not in the unlabelled pool";
    throw DomainError(msg.str());
  }
  const Matrix& x = state.features();
  auto cand = x.row(candidate_row);
  const double cand_norm = state.row_norm(candidate_row);

  ActionFeatures f;
  f.score = state.classifier().predict_proba_row(cand);
  double sum = 0.0;
  for (int r : state.labelled()) sum += cosine_distance(cand, x.row(r), cand_norm, state.row_norm(r));
  f.mean_dist_labelled = sum / static_cast<double>(state.labelled().size());
  sum = 0.0;
  for (int r : state.unlabelled()) sum += cosine_distance(cand, x.row(r), cand_norm, state.row_norm(r));
  f.mean_dist_unlabelled = sum / static_cast<double>(state.unlabelled().size());
  return f;
}

EpisodeState::StepOutcome step(EpisodeState& state, int chosen_row) { return state.step(chosen_row); }

}  // namespace alkit::env
