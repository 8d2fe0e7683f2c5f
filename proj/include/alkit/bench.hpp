#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "alkit/dataset.hpp"
#include "alkit/strategies.hpp"

namespace alkit::bench {

enum class StrategyKind { random, margin, learned };
enum class ModelKind { logistic_regression, random_forest };

std::string strategy_id(StrategyKind s);  // "rnd" / "margin" / "learned"
std::string model_id(ModelKind m);        // "lr" / "rf"
StrategyKind parse_strategy(const std::string& id);
ModelKind parse_model(const std::string& id);

struct LearningCurve {
  std::string dataset, model, strategy;
  int fold = 0;
  int repeat = 0;
  uint64_t seed = 0;
  std::vector<int> budgets;         // |L| = 2 .. budget
  std::vector<double> accuracies;   // held-out fold accuracy at each budget
  int truncated_at = 0;             // 0 = reached the requested budget; else |L| at pool exhaustion
  std::array<int, 2> initial_rows{-1, -1};
  std::vector<int> queried_rows;    // selection order, one per step
};

struct CurveParams {
  StrategyKind strategy = StrategyKind::random;
  ModelKind model = ModelKind::logistic_regression;
  int budget = 250;
  uint64_t master_seed = 0;
  const strategies::PolicyArtifact* artifact = nullptr;  // required for learned
  int candidate_cap = 0;                                 // 0 = evaluate the whole pool
  int v_size = 30;                                       // reserved only for the learned strategy
  int rf_tree_count = 100;
  double lr_l2 = 1.0;
};

// One active-learning run on one fold: starts from one labelled instance per
// class (seeded by (master_seed, dataset, fold, repeat) only, so the initial
// pair is identical for every strategy/model association), refits the model
// after each query, and records held-out accuracy at every |L|. Random
// selection consumes a stream that does not depend on the model. Curves that
// exhaust the pool before the budget truncate and carry the flag.
LearningCurve run_learning_curve(const data::Dataset& raw, const data::FoldSplit& folds, int fold, int repeat,
                                 const CurveParams& params);

struct ALCScore {
  double value = 0.0;  // in [0, 100]
};

// 100 x mean accuracy over the recorded budgets.
ALCScore compute_alc(const LearningCurve& curve);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

// Two-sided paired t-test with df = n-1. All-zero differences give (0, 1);
// zero variance with nonzero mean gives p = 0.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, int df);

struct RunRecord {
  std::string dataset, model, strategy;
  int fold = 0;
  int repeat = 0;
  uint64_t seed = 0;
  double alc = 0.0;
  int truncated_at = 0;
};

RunRecord make_run_record(const LearningCurve& curve);

enum class Outcome { win, tie, loss };

struct CellSummary {
  double mean_alc = 0.0;
  double p_vs_best = 1.0;
  bool marked = false;  // not significantly different from the best strategy
  Outcome outcome = Outcome::tie;
};

struct CellKey {
  std::string dataset, model, strategy;
  auto operator<=>(const CellKey&) const = default;
};

struct ComboKey {
  std::string model, strategy;
  auto operator<=>(const ComboKey&) const = default;
};

struct WinTieLoss {
  int win = 0, tie = 0, loss = 0;
};

struct ComparisonReport {
  std::vector<std::string> datasets, models, strategies;  // first-seen order
  std::map<CellKey, std::vector<double>> alcs;            // 25-run vectors, (fold, repeat) order
  std::map<CellKey, CellSummary> cells;
  std::map<ComboKey, double> grand_mean;
  std::map<ComboKey, WinTieLoss> wtl;
  double significance = 0.01;
};

// Per dataset and model family: the strategy with the best mean ALC wins iff
// every rival is significantly worse (paired t-test below the significance
// level); strategies indistinguishable from the best tie with it; the rest
// lose. Marks flag every strategy not significantly different from the best.
ComparisonReport aggregate_win_tie_loss(std::span<const RunRecord> runs, double significance = 0.01);

// Mean accuracy across the given curves at each requested |L|.
std::map<int, double> slice_accuracy_at(std::span<const LearningCurve> curves, std::span<const int> sizes);

void write_runs_csv(std::span<const RunRecord> runs, const std::filesystem::path& path);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);

void write_curve_files(std::span<const LearningCurve> curves, const std::filesystem::path& curves_dir);
std::vector<LearningCurve> read_curve_files(const std::filesystem::path& curves_dir);

struct ReportFilter {
  std::vector<std::string> models;      // empty = keep all
  std::vector<std::string> strategies;  // empty = keep all
};

inline constexpr std::array<int, 4> kDefaultSliceSizes{32, 64, 128, 250};

// Regenerates every summary file from the stored per-run CSV and curve
// files. Both the benchmark command and the report command go through this
// path, so re-reporting reproduces the original summaries byte-for-byte.
void summarize_from_files(const std::filesystem::path& runs_csv, const std::filesystem::path& curves_dir,
                          const std::filesystem::path& out_dir, const ReportFilter& filter = {},
                          double significance = 0.01);

}  // namespace alkit::bench
