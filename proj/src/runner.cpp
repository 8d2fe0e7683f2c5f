#include "alkit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "alkit/csv.hpp"
#include "alkit/errors.hpp"

namespace alkit::cli {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_u64_dec(uint64_t v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("manifest not found: " + path.string());
  const std::string text = read_text_file(path);
  const std::filesystem::path base = path.parent_path();

  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) parts.push_back(trim(field));
    if (parts.size() != 3) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected name,path,label_column");
    }
    ManifestEntry e;
    e.name = parts[0];
    std::filesystem::path p = parts[1];
    e.path = p.is_absolute() ? p : base / p;
    e.label_column = parts[2];
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw DomainError("manifest lists no datasets: " + path.string());
  return entries;
}

std::vector<data::Dataset> load_datasets(const std::vector<ManifestEntry>& entries) {
  std::vector<data::Dataset> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    data::Dataset d = data::load_csv(e.path, e.label_column);
    d.name = e.name;
    out.push_back(std::move(d));
  }
  return out;
}

void write_resolved_config(const std::filesystem::path& path, KeyValues kv) {
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  write_text_file(path, out);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.folds < 2) throw DomainError("run_benchmark: folds must be >= 2");
  if (cfg.repeats < 1) throw DomainError("run_benchmark: repeats must be >= 1");
  if (cfg.strategies.empty() || cfg.models.empty()) throw DomainError("run_benchmark: empty strategy/model list");

  std::vector<bench::StrategyKind> strategies;
  for (const auto& s : cfg.strategies) strategies.push_back(bench::parse_strategy(s));
  std::vector<bench::ModelKind> models;
  for (const auto& m : cfg.models) models.push_back(bench::parse_model(m));

  strategies::PolicyArtifact artifact;
  bool have_artifact = false;
  if (std::find(strategies.begin(), strategies.end(), bench::StrategyKind::learned) != strategies.end()) {
    if (cfg.artifact_path.empty()) {
      throw DomainError("run_benchmark: the learned strategy requires --artifact");
    }
    artifact = strategies::load_policy_artifact(cfg.artifact_path);
    have_artifact = true;
  }

  const std::vector<data::Dataset> datasets = load_datasets(load_manifest(cfg.manifest));
  std::vector<data::FoldSplit> folds;
  folds.reserve(datasets.size());
  for (const auto& d : datasets) {
    folds.push_back(data::stratified_kfold(d, cfg.folds, SeedSeq(cfg.master_seed).mix(d.name).mix("folds").value()));
  }

  struct Job {
    int dataset = 0;
    bench::ModelKind model{};
    bench::StrategyKind strategy{};
    int fold = 0;
    int repeat = 0;
  };
  std::vector<Job> jobs;
  for (size_t di = 0; di < datasets.size(); ++di) {
    for (auto m : models) {
      for (auto s : strategies) {
        for (int f = 0; f < cfg.folds; ++f) {
          for (int r = 0; r < cfg.repeats; ++r) jobs.push_back({static_cast<int>(di), m, s, f, r});
        }
      }
    }
  }

  std::vector<bench::LearningCurve> curves(jobs.size());
  auto run_job = [&](size_t i) {
    const Job& job = jobs[i];
    bench::CurveParams params;
    params.strategy = job.strategy;
    params.model = job.model;
    params.budget = cfg.budget;
    params.master_seed = cfg.master_seed;
    params.artifact = have_artifact ? &artifact : nullptr;
    params.candidate_cap = cfg.candidate_cap;
    params.rf_tree_count = cfg.rf_tree_count;
    params.lr_l2 = cfg.lr_l2;
    curves[i] = bench::run_learning_curve(datasets[job.dataset], folds[job.dataset], job.fold, job.repeat, params);
  };

  const int workers = std::max(1, cfg.parallelism);
  if (workers == 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          run_job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  BenchmarkResult result;
  result.curves = std::move(curves);
  result.runs.reserve(result.curves.size());
  for (const auto& c : result.curves) result.runs.push_back(bench::make_run_record(c));

  std::filesystem::create_directories(cfg.out_dir);
  bench::write_runs_csv(result.runs, cfg.out_dir / "runs.csv");
  bench::write_curve_files(result.curves, cfg.out_dir / "curves");
  bench::ReportFilter no_filter;
  bench::summarize_from_files(cfg.out_dir / "runs.csv", cfg.out_dir / "curves", cfg.out_dir, no_filter,
                              cfg.significance);

  write_resolved_config(cfg.out_dir / "resolved_config.txt",
                        {{"command", "run-benchmark"},
                         {"manifest", cfg.manifest.string()},
                         {"out", cfg.out_dir.string()},
                         {"seed", format_u64_dec(cfg.master_seed)},
                         {"budget", std::to_string(cfg.budget)},
                         {"folds", std::to_string(cfg.folds)},
                         {"repeats", std::to_string(cfg.repeats)},
                         {"strategies", join(cfg.strategies, ',')},
                         {"models", join(cfg.models, ',')},
                         {"artifact", cfg.artifact_path.string()},
                         {"parallelism", std::to_string(cfg.parallelism)},
                         {"candidate-cap", std::to_string(cfg.candidate_cap)},
                         {"rf-tree-count", std::to_string(cfg.rf_tree_count)},
                         {"lr-l2", format_double(cfg.lr_l2)},
                         {"significance", format_double(cfg.significance)}});
  return result;
}

std::filesystem::path run_train_policy(const TrainPolicyRunConfig& cfg) {
  const std::vector<data::Dataset> corpus = load_datasets(load_manifest(cfg.manifest));
  std::filesystem::create_directories(cfg.out_dir);

  std::ofstream log(cfg.out_dir / "training_log.txt", std::ios::trunc);
  if (!log) throw IoError("cannot write training log under " + cfg.out_dir.string());
  const strategies::PolicyArtifact artifact = rl::train_policy(corpus, cfg.trainer, &log);

  const auto artifact_path = cfg.out_dir / "policy.bin";
  strategies::save_policy_artifact(artifact, artifact_path);

  const auto& t = cfg.trainer;
  write_resolved_config(
      cfg.out_dir / "resolved_config.txt",
      {{"command", "train-policy"},
       {"manifest", cfg.manifest.string()},
       {"out", cfg.out_dir.string()},
       {"seed", format_u64_dec(t.seed)},
       {"gamma", format_double(t.gamma)},
       {"learning-rate", format_double(t.learning_rate)},
       {"batch-size", std::to_string(t.batch_size)},
       {"target-copy-factor", format_double(t.target_copy_factor)},
       {"epsilon-start", format_double(t.epsilon.start)},
       {"epsilon-end", format_double(t.epsilon.end)},
       {"epsilon-steps", std::to_string(t.epsilon.steps)},
       {"epsilon-decay", t.epsilon_decay == rl::TrainerConfig::EpsilonDecay::per_update ? "update" : "transition"},
       {"warm-start-episodes", std::to_string(t.warm_start_episodes)},
       {"nn-updates-per-warm-start", std::to_string(t.nn_updates_per_warm_start)},
       {"training-iterations", std::to_string(t.training_iterations)},
       {"episodes-per-iteration", std::to_string(t.episodes_per_iteration)},
       {"updates-per-iteration", std::to_string(t.updates_per_iteration)},
       {"double-dqn", t.double_dqn ? "1" : "0"},
       {"replay-buffer-size", std::to_string(t.replay.capacity)},
       {"prioritized-replay-exponent", format_double(t.replay.exponent)},
       {"priority-floor", format_double(t.replay.priority_floor)},
       {"v-size", std::to_string(t.episode.v_size)},
       {"test-fraction", format_double(t.episode.test_fraction)},
       {"quality-factor", format_double(t.episode.quality_factor)},
       {"max-steps", std::to_string(t.episode.max_steps)},
       {"episode-model", t.episode.model.kind == env::ModelSpec::Kind::logistic_regression ? "lr" : "rf"}});
  return artifact_path;
}

void run_report(const ReportRunConfig& cfg) {
  if (!std::filesystem::exists(cfg.runs_csv)) throw IoError("runs csv not found: " + cfg.runs_csv.string());
  std::filesystem::create_directories(cfg.out_dir);
  bench::summarize_from_files(cfg.runs_csv, cfg.curves_dir, cfg.out_dir, cfg.filter, cfg.significance);
  write_resolved_config(cfg.out_dir / "resolved_config_report.txt",
                        {{"command", "report"},
                         {"runs", cfg.runs_csv.string()},
                         {"curves", cfg.curves_dir.string()},
                         {"out", cfg.out_dir.string()},
                         {"models", join(cfg.filter.models, ',')},
                         {"strategies", join(cfg.filter.strategies, ',')},
                         {"significance", format_double(cfg.significance)}});
}

}  // namespace alkit::cli
