#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "alkit/env.hpp"
#include "alkit/errors.hpp"
#include "alkit/rng.hpp"
#include "alkit/synth.hpp"

using namespace alkit;
using namespace alkit::env;

TEST_SUITE_BEGIN("env");

namespace {

// P(Y=0|x) = clamp of the first feature; lets tests pin scores per row
class StubClassifier final : public models::ProbabilisticClassifier {
 public:
  void fit(const Matrix& x, std::span<const int>) override {
    width_ = x.cols();
    fitted_ = true;
  }
  double predict_proba_row(std::span<const double> x) const override { return std::clamp(x[0], 0.0, 1.0); }
  bool fitted() const override { return fitted_; }
  int feature_count() const override { return width_; }

 private:
  int width_ = 0;
  bool fitted_ = false;
};

ModelFactory stub_factory() {
  return []() { return std::make_unique<StubClassifier>(); };
}

// features rows: given as {x0, x1}; labels alternate 0,1,...
EpisodeState tiny_episode(std::vector<std::array<double, 2>> rows, std::vector<int> labels,
                          std::vector<int> v_rows = {}, double threshold = 1e30, int max_steps = 0) {
  auto m = std::make_shared<Matrix>(static_cast<int>(rows.size()), 2);
  for (size_t r = 0; r < rows.size(); ++r) {
    m->at(static_cast<int>(r), 0) = rows[r][0];
    m->at(static_cast<int>(r), 1) = rows[r][1];
  }
  EpisodeParts parts;
  parts.features = m;
  parts.labels = std::make_shared<const std::vector<int>>(std::move(labels));
  for (int r = 0; r < m->rows(); ++r) parts.train_rows.push_back(r);
  parts.test_rows = {0};
  parts.v_rows = std::move(v_rows);
  parts.initial_rows = {0, 1};
  parts.model_factory = stub_factory();
  parts.threshold = threshold;
  parts.max_steps = max_steps;
  return EpisodeState::create(std::move(parts));
}

}  // namespace

TEST_CASE("begin_episode sets q to 0.98 of the full-data accuracy") {
  // well separated blobs: the full-data classifier is perfect on the test split
  data::Dataset d = synth::make_blobs("sep", 150, 4, 8.0, 0.5, 0.0, 3);
  EpisodeConfig cfg;
  cfg.v_size = 30;
  cfg.seed = 11;
  EpisodeState state = begin_episode(d, cfg);
  CHECK(state.threshold() == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(state.v_rows().size() == 30);
  CHECK(state.labelled().size() == 2);
  CHECK(state.label_of(state.labelled()[0]) == 0);
  CHECK(state.label_of(state.labelled()[1]) == 1);
}

TEST_CASE("begin_episode rejects a dataset whose training split is too small") {
  data::Dataset d = synth::make_blobs("tiny", 45, 2, 4.0, 0.5, 0.0, 5);
  EpisodeConfig cfg;
  cfg.seed = 1;
  try {
    begin_episode(d, cfg);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("needs >= 33") != std::string::npos);
  }
}

TEST_CASE("begin_episode is deterministic under the seed") {
  data::Dataset d = synth::make_blobs("det", 160, 3, 3.0, 0.4, 0.0, 9);
  EpisodeConfig cfg;
  cfg.seed = 77;
  EpisodeState a = begin_episode(d, cfg);
  EpisodeState b = begin_episode(d, cfg);
  CHECK(std::vector<int>(a.v_rows().begin(), a.v_rows().end()) ==
        std::vector<int>(b.v_rows().begin(), b.v_rows().end()));
  CHECK(a.initial_rows() == b.initial_rows());
  CHECK(std::vector<int>(a.train_rows().begin(), a.train_rows().end()) ==
        std::vector<int>(b.train_rows().begin(), b.train_rows().end()));
  CHECK(a.threshold() == b.threshold());
  CHECK(a.quality() == b.quality());
}

TEST_CASE("compute_state returns sorted scores and ignores V storage order") {
  std::vector<std::array<double, 2>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 8; ++i) {
    rows.push_back({0.1 * i, 1.0});
    labels.push_back(i % 2);
  }
  EpisodeState a = tiny_episode(rows, labels, {2, 3, 4, 5});
  EpisodeState b = tiny_episode(rows, labels, {5, 4, 3, 2});
  StateVector sa = compute_state(a);
  StateVector sb = compute_state(b);
  CHECK(sa.scores == sb.scores);
  CHECK(std::is_sorted(sa.scores.rbegin(), sa.scores.rend()));
  CHECK(sa.scores.front() == doctest::Approx(0.5));
  CHECK(sa.scores.back() == doctest::Approx(0.2));
}

TEST_CASE("compute_state with a constant classifier yields a constant vector") {
  std::vector<std::array<double, 2>> rows(8, {0.5, 1.0});
  std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1};
  EpisodeState s = tiny_episode(rows, labels, {2, 3, 4, 5});
  for (double v : compute_state(s).scores) CHECK(v == 0.5);
}

TEST_CASE("compute_state requires reserved V rows") {
  std::vector<std::array<double, 2>> rows(4, {0.5, 1.0});
  std::vector<int> labels{0, 1, 0, 1};
  EpisodeState s = tiny_episode(rows, labels);
  CHECK_THROWS_AS(compute_state(s), DomainError);
}

TEST_CASE("action features follow the cosine-distance definition") {
  SUBCASE("candidate identical to every labelled row") {
    EpisodeState s = tiny_episode({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {0, 1, 0, 1});
    ActionFeatures f = compute_action_features(s, 2);
    CHECK(f.mean_dist_labelled == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("candidate orthogonal to every labelled row") {
    EpisodeState s = tiny_episode({{0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}, {0, 1, 0});
    ActionFeatures f = compute_action_features(s, 2);
    CHECK(f.mean_dist_labelled == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("labelled set {(1,0),(0,1)} and candidate (1,0) give one half") {
    EpisodeState s = tiny_episode({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {0.3, 0.3}}, {0, 1, 0, 1});
    ActionFeatures f = compute_action_features(s, 2);
    CHECK(f.mean_dist_labelled == doctest::Approx(0.5).epsilon(1e-12));
    // unlabelled pool is {2, 3}: dist to itself is 0, dist to (0.3, 0.3) is 1 - cos(45deg)
    const double expected = 0.5 * (0.0 + (1.0 - std::cos(3.14159265358979323846 / 4.0)));
    CHECK(f.mean_dist_unlabelled == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f.score == doctest::Approx(1.0));
  }
  SUBCASE("zero vectors have cosine distance one by convention") {
    EpisodeState s = tiny_episode({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}, {0, 1, 0});
    ActionFeatures f = compute_action_features(s, 2);
    // labelled rows: zero vector (dist 1) and orthogonal (dist 1)
    CHECK(f.mean_dist_labelled == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("rejects a candidate outside the pool") {
    EpisodeState s = tiny_episode({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}, {0, 1, 0});
    CHECK_THROWS_AS(compute_action_features(s, 0), DomainError);
    CHECK_THROWS_AS(compute_action_features(s, 99), DomainError);
  }
}

TEST_CASE("action feature bounds hold on synthetic data") {
  data::Dataset d = synth::make_blobs("bounds", 120, 5, 2.0, 0.4, 0.02, 8);
  EpisodeConfig cfg;
  cfg.v_size = 30;
  cfg.seed = 4;
  EpisodeState s = begin_episode(d, cfg);
  for (int r : s.unlabelled()) {
    ActionFeatures f = compute_action_features(s, r);
    CHECK(f.score >= 0.0);
    CHECK(f.score <= 1.0);
    CHECK(f.mean_dist_labelled >= 0.0);
    CHECK(f.mean_dist_labelled <= 2.0);
    CHECK(f.mean_dist_unlabelled >= 0.0);
    CHECK(f.mean_dist_unlabelled <= 2.0);
  }
}

TEST_CASE("step moves one row, rewards -1, and terminates on the quality threshold") {
  std::vector<std::array<double, 2>> rows(6, {0.5, 1.0});
  std::vector<int> labels{0, 1, 0, 1, 0, 1};
  // quality history: 0.5 at step 0, exactly 0.7 after the second step
  auto quality = [](int step) { return step == 0 ? 0.5 : (step == 1 ? 0.6 : 0.7); };

  auto m = std::make_shared<Matrix>(6, 2);
  for (int r = 0; r < 6; ++r) {
    m->at(r, 0) = rows[r][0];
    m->at(r, 1) = rows[r][1];
  }
  EpisodeParts parts;
  parts.features = m;
  parts.labels = std::make_shared<const std::vector<int>>(labels);
  for (int r = 0; r < 6; ++r) parts.train_rows.push_back(r);
  parts.test_rows = {0};
  parts.initial_rows = {0, 1};
  parts.model_factory = stub_factory();
  parts.threshold = 0.7;
  parts.quality_override = quality;
  EpisodeState s = EpisodeState::create(std::move(parts));

  CHECK(s.quality() == 0.5);
  const size_t total = s.labelled().size() + s.unlabelled().size();

  auto out1 = step(s, 2);
  CHECK(out1.reward == -1.0);
  CHECK_FALSE(out1.terminal);
  CHECK(s.labelled().size() == 3);
  CHECK(s.labelled().size() + s.unlabelled().size() == total);
  CHECK(static_cast<int>(s.labelled().size()) == s.step_count() + 2);

  auto out2 = step(s, 3);
  CHECK(out2.reward == -1.0);
  CHECK(out2.terminal);
  CHECK(out2.reason == TerminalReason::quality_reached);
  CHECK(s.quality() == 0.7);  // exactly q terminates
}

TEST_CASE("step terminates when the pool empties regardless of quality") {
  EpisodeState s = tiny_episode({{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}}, {0, 1, 0});
  REQUIRE(s.unlabelled().size() == 1);
  auto out = step(s, 2);
  CHECK(out.terminal);
  CHECK(out.reason == TerminalReason::pool_exhausted);
  CHECK(out.reward == -1.0);
}

TEST_CASE("step honors the step cap") {
  EpisodeState s = tiny_episode({{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}}, {0, 1, 0, 1}, {}, 1e30, 1);
  auto out = step(s, 2);
  CHECK(out.terminal);
  CHECK(out.reason == TerminalReason::step_cap);
}

TEST_CASE("step rejects rows outside the pool") {
  EpisodeState s = tiny_episode({{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}}, {0, 1, 0});
  CHECK_THROWS_AS(step(s, 0), DomainError);  // already labelled
  CHECK_THROWS_AS(step(s, 42), DomainError);
}

TEST_CASE("V rows are excluded from the candidate pool and from labelling") {
  std::vector<std::array<double, 2>> rows(8, {0.5, 1.0});
  std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1};
  EpisodeState s = tiny_episode(rows, labels, {2, 3});
  CHECK_FALSE(s.in_unlabelled(2));
  CHECK_FALSE(s.in_unlabelled(3));
  CHECK_THROWS_AS(step(s, 2), DomainError);
}

TEST_CASE("episode total reward equals minus the number of steps") {
  data::Dataset d = synth::make_blobs("reward", 130, 3, 3.0, 0.5, 0.0, 19);
  EpisodeConfig cfg;
  cfg.v_size = 30;
  cfg.seed = 2;
  EpisodeState s = begin_episode(d, cfg);
  double total = 0.0;
  int steps = 0;
  SplitMix64 rng(5);
  while (true) {
    const auto pool = s.unlabelled();
    const int pick = pool[rng.next_below(pool.size())];
    const auto out = step(s, pick);
    total += out.reward;
    ++steps;
    if (out.terminal) break;
  }
  CHECK(total == doctest::Approx(-static_cast<double>(steps)));
  CHECK(s.step_count() == steps);
}

TEST_SUITE_END();
