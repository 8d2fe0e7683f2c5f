#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "alkit/bench.hpp"
#include "alkit/errors.hpp"
#include "alkit/qnetwork.hpp"
#include "alkit/synth.hpp"

using namespace alkit;
using namespace alkit::bench;

TEST_SUITE_BEGIN("bench");

namespace {

LearningCurve flat_curve(double accuracy, int points = 5) {
  LearningCurve c;
  c.dataset = "d";
  c.model = "lr";
  c.strategy = "rnd";
  for (int i = 0; i < points; ++i) {
    c.budgets.push_back(2 + i);
    c.accuracies.push_back(accuracy);
  }
  return c;
}

std::vector<RunRecord> grid_records(const std::vector<std::string>& datasets,
                                    const std::vector<std::string>& strategies,
                                    const std::vector<std::vector<double>>& alcs_per_strategy) {
  std::vector<RunRecord> runs;
  for (const auto& dataset : datasets) {
    for (size_t s = 0; s < strategies.size(); ++s) {
      const auto& values = alcs_per_strategy[s];
      for (size_t i = 0; i < values.size(); ++i) {
        RunRecord r;
        r.dataset = dataset;
        r.model = "rf";
        r.strategy = strategies[s];
        r.fold = static_cast<int>(i / 5);
        r.repeat = static_cast<int>(i % 5);
        r.alc = values[i];
        runs.push_back(r);
      }
    }
  }
  return runs;
}

}  // namespace

TEST_CASE("alc is 100 times the mean accuracy") {
  CHECK(compute_alc(flat_curve(1.0)).value == doctest::Approx(100.0));
  CHECK(compute_alc(flat_curve(0.5)).value == doctest::Approx(50.0));

  LearningCurve two;
  two.budgets = {2, 3};
  two.accuracies = {0.6, 0.8};
  CHECK(compute_alc(two).value == doctest::Approx(70.0));

  LearningCurve empty;
  CHECK_THROWS_AS(compute_alc(empty), DomainError);
}

TEST_CASE("alc scales with an affine rescaling of accuracy") {
  LearningCurve c;
  for (int i = 0; i < 9; ++i) {
    c.budgets.push_back(2 + i);
    c.accuracies.push_back(0.1 * i);
  }
  const double base = compute_alc(c).value;
  for (auto& a : c.accuracies) a *= 0.7;
  CHECK(compute_alc(c).value == doctest::Approx(0.7 * base).epsilon(1e-12));
}

TEST_CASE("paired t-test reference values") {
  SUBCASE("equal vectors give t = 0, p = 1") {
    std::vector<double> a{1, 2, 3, 4};
    const auto res = paired_t_test(a, a);
    CHECK(res.t == 0.0);
    CHECK(res.p == 1.0);
  }
  SUBCASE("constant nonzero differences give p = 0") {
    std::vector<double> a{2, 3, 4, 5};
    std::vector<double> b{1, 2, 3, 4};
    const auto res = paired_t_test(a, b);
    CHECK(std::isinf(res.t));
    CHECK(res.p == 0.0);
  }
  SUBCASE("differences 1..5 give t = 3 sqrt(2) and p near 0.0132") {
    std::vector<double> a{1, 2, 3, 4, 5};
    std::vector<double> b(5, 0.0);
    const auto res = paired_t_test(a, b);
    CHECK(res.t == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(res.p - 0.0132) < 1e-3);
  }
  SUBCASE("swapping the arguments flips t and keeps p") {
    std::vector<double> a{1.0, 2.5, 3.0, 4.5, 5.5};
    std::vector<double> b{0.5, 2.0, 3.5, 4.0, 5.0};
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
  }
  SUBCASE("length mismatch and short input are rejected") {
    std::vector<double> a{1, 2, 3};
    std::vector<double> b{1, 2};
    CHECK_THROWS_AS(paired_t_test(a, b), DomainError);
    std::vector<double> one{1};
    CHECK_THROWS_AS(paired_t_test(one, one), DomainError);
  }
}

TEST_CASE("incomplete beta sanity") {
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(regularized_incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(student_t_two_sided_p(0.0, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a lone strategy wins every dataset") {
  auto runs = grid_records({"d1", "d2"}, {"rnd"}, {{80, 81, 79, 80, 80}});
  const auto rep = aggregate_win_tie_loss(runs);
  const auto wtl = rep.wtl.at({"rf", "rnd"});
  CHECK(wtl.win == 2);
  CHECK(wtl.tie == 0);
  CHECK(wtl.loss == 0);
}

TEST_CASE("identical strategies tie") {
  std::vector<double> v{80, 81, 79, 80.5, 80};
  auto runs = grid_records({"d1"}, {"rnd", "margin"}, {v, v});
  const auto rep = aggregate_win_tie_loss(runs);
  CHECK(rep.cells.at({"d1", "rf", "rnd"}).outcome == Outcome::tie);
  CHECK(rep.cells.at({"d1", "rf", "margin"}).outcome == Outcome::tie);
  CHECK(rep.cells.at({"d1", "rf", "margin"}).marked);
}

TEST_CASE("three strategies with means 90, 89, 70 split into tie, tie, loss") {
  std::vector<double> a, b, c;
  for (int i = 0; i < 25; ++i) {
    a.push_back(90.0 + 0.5 * ((i % 5) - 2));
    b.push_back(a.back() - 1.0 + (i % 2 == 0 ? 3.0 : -3.0));  // noisy, indistinguishable
    c.push_back(70.0 + 0.1 * (i % 3));                        // clearly below
  }
  auto runs = grid_records({"d1"}, {"alpha", "beta", "gamma"}, {a, b, c});
  const auto rep = aggregate_win_tie_loss(runs);
  REQUIRE(rep.cells.at({"d1", "rf", "alpha"}).mean_alc > rep.cells.at({"d1", "rf", "beta"}).mean_alc);
  CHECK(rep.cells.at({"d1", "rf", "beta"}).p_vs_best >= 0.01);
  CHECK(rep.cells.at({"d1", "rf", "gamma"}).p_vs_best < 0.001);
  CHECK(rep.cells.at({"d1", "rf", "alpha"}).outcome == Outcome::tie);
  CHECK(rep.cells.at({"d1", "rf", "beta"}).outcome == Outcome::tie);
  CHECK(rep.cells.at({"d1", "rf", "gamma"}).outcome == Outcome::loss);
}

TEST_CASE("a clear best strategy wins and the rival loses") {
  std::vector<double> good, bad;
  for (int i = 0; i < 25; ++i) {
    good.push_back(90.0 + 0.01 * (i % 5));
    bad.push_back(80.0 + 0.01 * (i % 7));
  }
  auto runs = grid_records({"d1", "d2"}, {"margin", "rnd"}, {good, bad});
  const auto rep = aggregate_win_tie_loss(runs);
  CHECK(rep.wtl.at({"rf", "margin"}).win == 2);
  CHECK(rep.wtl.at({"rf", "rnd"}).loss == 2);
  CHECK(rep.grand_mean.at({"rf", "margin"}) > rep.grand_mean.at({"rf", "rnd"}));
  // win + tie + loss = dataset count for each column
  for (const auto& strategy : rep.strategies) {
    const auto& wtl = rep.wtl.at({"rf", strategy});
    CHECK(wtl.win + wtl.tie + wtl.loss == static_cast<int>(rep.datasets.size()));
  }
}

TEST_CASE("aggregation rejects a missing cell naming it") {
  auto runs = grid_records({"d1"}, {"rnd", "margin"}, {{80, 81, 79, 80, 80}, {82, 83, 81, 82, 82}});
  runs.pop_back();  // drop one margin run
  try {
    aggregate_win_tie_loss(runs);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("margin") != std::string::npos);
  }
}

TEST_CASE("slice_accuracy_at reads exact budgets and rejects missing ones") {
  std::vector<LearningCurve> curves{flat_curve(0.75, 40), flat_curve(0.85, 40)};  // budgets 2..41
  const std::vector<int> sizes{32, 41};
  const auto table = slice_accuracy_at(curves, sizes);
  CHECK(table.at(32) == doctest::Approx(0.8));
  CHECK(table.at(41) == doctest::Approx(0.8));

  const std::vector<int> missing{33, 999};
  CHECK_THROWS_AS(slice_accuracy_at(curves, missing), DomainError);
  const std::vector<int> unrecorded{1};
  CHECK_THROWS_AS(slice_accuracy_at(curves, unrecorded), DomainError);
}

TEST_CASE("learning curves start at two labels and honor the seed discipline") {
  const data::Dataset d = synth::make_blobs("curve_blobs", 60, 3, 3.0, 0.5, 0.0, 77);
  const data::FoldSplit folds = data::stratified_kfold(d, 3, 5);

  CurveParams rnd_lr{.strategy = StrategyKind::random, .model = ModelKind::logistic_regression, .budget = 6,
                     .master_seed = 9};
  CurveParams rnd_rf = rnd_lr;
  rnd_rf.model = ModelKind::random_forest;
  rnd_rf.rf_tree_count = 5;
  CurveParams margin_lr = rnd_lr;
  margin_lr.strategy = StrategyKind::margin;

  const LearningCurve a = run_learning_curve(d, folds, 1, 2, rnd_lr);
  const LearningCurve b = run_learning_curve(d, folds, 1, 2, rnd_rf);
  const LearningCurve c = run_learning_curve(d, folds, 1, 2, margin_lr);

  CHECK(a.budgets.front() == 2);
  for (size_t i = 1; i < a.budgets.size(); ++i) CHECK(a.budgets[i] == a.budgets[i - 1] + 1);
  CHECK(a.budgets.back() == 6);
  CHECK(a.truncated_at == 0);

  // initial instances identical across every strategy/model association
  CHECK(a.initial_rows == b.initial_rows);
  CHECK(a.initial_rows == c.initial_rows);
  // the random stream is identical across models
  CHECK(a.queried_rows == b.queried_rows);
  // a different (fold, repeat) redraws the initial pair
  const LearningCurve other = run_learning_curve(d, folds, 0, 1, rnd_lr);
  CHECK(other.seed != a.seed);
}

TEST_CASE("learning curves truncate at pool exhaustion and flag it") {
  const data::Dataset d = synth::make_blobs("trunc_blobs", 30, 2, 3.0, 0.5, 0.0, 3);
  const data::FoldSplit folds = data::stratified_kfold(d, 3, 1);
  CurveParams params{.strategy = StrategyKind::random, .model = ModelKind::logistic_regression, .budget = 250,
                     .master_seed = 4};
  const LearningCurve c = run_learning_curve(d, folds, 0, 0, params);
  const int train_size = static_cast<int>(folds.complement_rows(0).size());
  CHECK(c.truncated_at == train_size);
  CHECK(c.budgets.back() == train_size);
  CHECK(compute_alc(c).value > 0.0);
}

TEST_CASE("the learned strategy demands an artifact") {
  const data::Dataset d = synth::make_blobs("need_artifact", 60, 2, 3.0, 0.5, 0.0, 3);
  const data::FoldSplit folds = data::stratified_kfold(d, 3, 1);
  CurveParams params{.strategy = StrategyKind::learned, .model = ModelKind::logistic_regression, .budget = 5,
                     .master_seed = 4};
  CHECK_THROWS_AS(run_learning_curve(d, folds, 0, 0, params), DomainError);
}

TEST_CASE("run records and curves round-trip through their files") {
  const auto dir = std::filesystem::temp_directory_path() / "alkit_bench_io";
  std::filesystem::create_directories(dir);

  std::vector<RunRecord> runs;
  for (int i = 0; i < 4; ++i) {
    RunRecord r;
    r.dataset = "d with, comma";
    r.model = i % 2 ? "rf" : "lr";
    r.strategy = "rnd";
    r.fold = i / 2;
    r.repeat = i % 2;
    r.seed = 0xFFFFFFFFFF000000ull + i;
    r.alc = 80.0 + 0.123456789012345 * i;
    r.truncated_at = i == 3 ? 17 : 0;
    runs.push_back(r);
  }
  write_runs_csv(runs, dir / "runs.csv");
  const auto back = read_runs_csv(dir / "runs.csv");
  REQUIRE(back.size() == runs.size());
  for (size_t i = 0; i < runs.size(); ++i) {
    CHECK(back[i].dataset == runs[i].dataset);
    CHECK(back[i].model == runs[i].model);
    CHECK(back[i].seed == runs[i].seed);
    CHECK(back[i].alc == runs[i].alc);  // exact round trip via %.17g
    CHECK(back[i].truncated_at == runs[i].truncated_at);
  }

  std::vector<LearningCurve> curves{flat_curve(0.625, 7), flat_curve(0.75, 7)};
  curves[1].fold = 1;
  write_curve_files(curves, dir / "curves");
  const auto curves_back = read_curve_files(dir / "curves");
  REQUIRE(curves_back.size() == 2);
  CHECK(curves_back[0].budgets == curves[0].budgets);
  CHECK(curves_back[0].accuracies == curves[0].accuracies);
}

TEST_CASE("table-4 text summary has one row per dataset plus mean and win/tie/loss") {
  const auto dir = std::filesystem::temp_directory_path() / "alkit_bench_summary";
  std::filesystem::create_directories(dir);
  std::vector<double> good, bad;
  for (int i = 0; i < 25; ++i) {
    good.push_back(90.0 + 0.01 * (i % 5));
    bad.push_back(80.0 + 0.01 * (i % 7));
  }
  auto runs = grid_records({"d1", "d2", "d3"}, {"margin", "rnd"}, {good, bad});
  write_runs_csv(runs, dir / "runs.csv");
  summarize_from_files(dir / "runs.csv", dir / "nocurves", dir);

  const std::string txt = read_text_file(dir / "summary_table4.txt");
  int lines = 0;
  for (char ch : txt)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 3 + 2);  // header + datasets + mean + win/tie/loss
  CHECK(txt.find("win/tie/loss") != std::string::npos);
}

TEST_SUITE_END();
