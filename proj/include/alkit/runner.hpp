#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "alkit/bench.hpp"
#include "alkit/rl.hpp"

namespace alkit::cli {

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  std::string label_column;
};

// Plain-text manifest: one "name,path,label_column" row per dataset, '#'
// comments allowed. Relative paths resolve against the manifest directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
std::vector<data::Dataset> load_datasets(const std::vector<ManifestEntry>& entries);

struct BenchmarkConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  uint64_t master_seed = 0;
  int budget = 250;
  int folds = 5;
  int repeats = 5;
  std::vector<std::string> strategies = {"rnd", "margin"};
  std::vector<std::string> models = {"lr", "rf"};
  std::filesystem::path artifact_path;  // required when strategies include "learned"
  int parallelism = 1;
  int candidate_cap = 0;
  int rf_tree_count = 100;
  double lr_l2 = 1.0;
  double significance = 0.01;
};

struct BenchmarkResult {
  std::vector<bench::RunRecord> runs;
  std::vector<bench::LearningCurve> curves;
};

// Runs the whole {datasets} x {models} x {strategies} x folds x repeats grid,
// writes runs.csv, per-curve files and the summary tables under out_dir, and
// returns the in-memory results.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

struct TrainPolicyRunConfig {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  rl::TrainerConfig trainer;
};

// Trains the query policy on the manifest corpus; writes policy.bin and
// training_log.txt under out_dir and returns the artifact path.
std::filesystem::path run_train_policy(const TrainPolicyRunConfig& cfg);

struct ReportRunConfig {
  std::filesystem::path runs_csv;
  std::filesystem::path curves_dir;  // optional; table-5 slices need it
  std::filesystem::path out_dir;
  bench::ReportFilter filter;
  double significance = 0.01;
};

// Regenerates the summary tables from stored runs without recomputing them.
void run_report(const ReportRunConfig& cfg);

using KeyValues = std::vector<std::pair<std::string, std::string>>;
void write_resolved_config(const std::filesystem::path& path, KeyValues kv);

}  // namespace alkit::cli
