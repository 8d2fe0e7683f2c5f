#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "alkit/errors.hpp"
#include "alkit/runner.hpp"
#include "alkit/synth.hpp"

namespace {

// ALKIT_OUT takes precedence over --out when set.
void apply_out_override(std::filesystem::path& out_dir) {
  if (const char* env = std::getenv("ALKIT_OUT"); env != nullptr && *env != '\0') out_dir = env;
}

// Flat key=value config file; values fill in options the command line did
// not set, command-line flags win, unknown keys are rejected.
void apply_flat_config(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw CLI::FileError::Missing(config_path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ParseError("config line " + std::to_string(line_no) + ": expected key=value", 2);
    }
    auto trim = [](std::string s) {
      const size_t b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const size_t e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw CLI::ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'", 2);
    }
    if (opt->count() == 0) {  // command line takes precedence
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

void add_trainer_options(CLI::App* cmd, alkit::rl::TrainerConfig& t, std::string& epsilon_decay,
                         std::string& episode_model) {
  cmd->add_option("--gamma", t.gamma, "Discount factor");
  cmd->add_option("--learning-rate", t.learning_rate, "SGD learning rate");
  cmd->add_option("--batch-size", t.batch_size, "Minibatch size");
  cmd->add_option("--target-copy-factor", t.target_copy_factor, "Soft target update factor");
  cmd->add_option("--epsilon-start", t.epsilon.start, "Initial exploration probability");
  cmd->add_option("--epsilon-end", t.epsilon.end, "Final exploration probability");
  cmd->add_option("--epsilon-steps", t.epsilon.steps, "Updates over which epsilon anneals");
  cmd->add_option("--epsilon-decay", epsilon_decay, "Anneal epsilon per 'update' or per 'transition'")
      ->check(CLI::IsMember({"update", "transition"}));
  cmd->add_option("--warm-start-episodes", t.warm_start_episodes, "Random-policy episodes before training");
  cmd->add_option("--nn-updates-per-warm-start", t.nn_updates_per_warm_start, "Updates after the warm start");
  cmd->add_option("--training-iterations", t.training_iterations, "Training iterations");
  cmd->add_option("--episodes-per-iteration", t.episodes_per_iteration, "Episodes per iteration");
  cmd->add_option("--updates-per-iteration", t.updates_per_iteration, "Minibatch updates per iteration");
  cmd->add_option("--double-dqn", t.double_dqn, "Use Double DQN targets (1) or plain targets (0)");
  cmd->add_option("--replay-buffer-size", t.replay.capacity, "Replay memory capacity");
  cmd->add_option("--prioritized-replay-exponent", t.replay.exponent, "Priority distribution exponent");
  cmd->add_option("--priority-floor", t.replay.priority_floor, "Constant added to |td error|");
  cmd->add_option("--v-size", t.episode.v_size, "Size of the reserved V set");
  cmd->add_option("--test-fraction", t.episode.test_fraction, "Episode test split fraction");
  cmd->add_option("--quality-factor", t.episode.quality_factor, "Episode quality threshold factor");
  cmd->add_option("--max-steps", t.episode.max_steps, "Episode step cap (0 = none)");
  cmd->add_option("--episode-model", episode_model, "Classifier simulated inside episodes: lr or rf")
      ->check(CLI::IsMember({"lr", "rf"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pool-based active-learning toolkit: learned query policies vs margin/random baselines"};
  app.require_subcommand(1);

  // Every subcommand accepts a flat key=value config file.
  std::map<CLI::App*, std::string> config_paths;
  auto enable_config = [&config_paths](CLI::App* cmd) {
    cmd->add_option("--config", config_paths[cmd], "Flat key=value config file; flags override it");
  };

  // train-policy
  auto* train = app.add_subcommand("train-policy", "Train a query policy on a corpus of datasets");
  enable_config(train);
  std::filesystem::path train_manifest, train_out = "out";
  alkit::rl::TrainerConfig trainer;
  std::string epsilon_decay = "update", episode_model = "lr";
  train->add_option("--manifest", train_manifest, "Dataset manifest (name,path,label_column)");
  train->add_option("--out", train_out, "Output directory");
  train->add_option("--seed", trainer.seed, "Master seed");
  add_trainer_options(train, trainer, epsilon_decay, episode_model);

  // run-benchmark
  auto* benchmark = app.add_subcommand("run-benchmark", "Run the strategy/model benchmark grid");
  enable_config(benchmark);
  alkit::cli::BenchmarkConfig bench_cfg;
  bench_cfg.out_dir = "out";
  benchmark->add_option("--manifest", bench_cfg.manifest, "Dataset manifest");
  benchmark->add_option("--out", bench_cfg.out_dir, "Output directory");
  benchmark->add_option("--seed", bench_cfg.master_seed, "Master seed");
  benchmark->add_option("--budget", bench_cfg.budget, "Label budget per run");
  benchmark->add_option("--folds", bench_cfg.folds, "Cross-validation folds");
  benchmark->add_option("--repeats", bench_cfg.repeats, "Repeats per fold");
  benchmark->add_option("--strategies", bench_cfg.strategies, "Comma-separated strategies (rnd,margin,learned)")
      ->delimiter(',');
  benchmark->add_option("--models", bench_cfg.models, "Comma-separated models (lr,rf)")->delimiter(',');
  benchmark->add_option("--artifact", bench_cfg.artifact_path, "Policy artifact for the learned strategy");
  benchmark->add_option("--parallelism", bench_cfg.parallelism, "Worker threads");
  benchmark->add_option("--candidate-cap", bench_cfg.candidate_cap,
                        "Evaluate the learned policy on at most this many candidates (0 = all)");
  benchmark->add_option("--rf-tree-count", bench_cfg.rf_tree_count, "Trees per random forest");
  benchmark->add_option("--lr-l2", bench_cfg.lr_l2, "Logistic regression L2 strength");
  benchmark->add_option("--significance", bench_cfg.significance, "Paired t-test significance level");

  // report
  auto* report = app.add_subcommand("report", "Regenerate summaries from stored runs");
  enable_config(report);
  alkit::cli::ReportRunConfig report_cfg;
  report_cfg.out_dir = "out";
  report->add_option("--runs", report_cfg.runs_csv, "Per-run CSV produced by run-benchmark");
  report->add_option("--curves", report_cfg.curves_dir, "Curve directory (defaults to sibling 'curves')");
  report->add_option("--out", report_cfg.out_dir, "Output directory");
  report->add_option("--models", report_cfg.filter.models, "Restrict to these models")->delimiter(',');
  report->add_option("--strategies", report_cfg.filter.strategies, "Restrict to these strategies")->delimiter(',');
  report->add_option("--significance", report_cfg.significance, "Paired t-test significance level");

  // make-synth
  auto* synth = app.add_subcommand("make-synth", "Write a synthetic dataset suite plus manifest");
  enable_config(synth);
  std::string suite_name = "bench-small";
  std::filesystem::path synth_out = "out";
  uint64_t synth_seed = 0;
  synth->add_option("--suite", suite_name, "Suite name")->check(CLI::IsMember(alkit::synth::suite_names()));
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--seed", synth_seed, "Generator seed");

  try {
    app.parse(argc, argv);
    for (auto& [cmd, path] : config_paths) {
      if (cmd->parsed()) apply_flat_config(cmd, path);
    }
    if (*train && train_manifest.empty()) throw CLI::RequiredError("--manifest");
    if (*benchmark && bench_cfg.manifest.empty()) throw CLI::RequiredError("--manifest");
    if (*report && report_cfg.runs_csv.empty()) throw CLI::RequiredError("--runs");
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (*train) {
      trainer.epsilon_decay = epsilon_decay == "update" ? alkit::rl::TrainerConfig::EpsilonDecay::per_update
                                                        : alkit::rl::TrainerConfig::EpsilonDecay::per_transition;
      trainer.episode.model.kind = episode_model == "lr" ? alkit::env::ModelSpec::Kind::logistic_regression
                                                         : alkit::env::ModelSpec::Kind::random_forest;
      trainer.episode.model.lr.seed = alkit::SeedSeq(trainer.seed).mix("episode-model").value();
      trainer.episode.model.rf.seed = trainer.episode.model.lr.seed;
      apply_out_override(train_out);
      alkit::cli::TrainPolicyRunConfig cfg{train_manifest, train_out, trainer};
      const auto artifact = alkit::cli::run_train_policy(cfg);
      std::cout << "policy artifact written to " << artifact.string() << "\n";
    } else if (*benchmark) {
      apply_out_override(bench_cfg.out_dir);
      alkit::cli::run_benchmark(bench_cfg);
      std::cout << "benchmark results written to " << bench_cfg.out_dir.string() << "\n";
    } else if (*report) {
      if (report_cfg.curves_dir.empty()) report_cfg.curves_dir = report_cfg.runs_csv.parent_path() / "curves";
      apply_out_override(report_cfg.out_dir);
      alkit::cli::run_report(report_cfg);
      std::cout << "summaries written to " << report_cfg.out_dir.string() << "\n";
    } else if (*synth) {
      apply_out_override(synth_out);
      const auto manifest = alkit::synth::write_suite(synth_out, alkit::synth::make_suite(suite_name, synth_seed));
      std::cout << "suite manifest written to " << manifest.string() << "\n";
    }
  } catch (const alkit::CompatibilityError& e) {
    std::cerr << "compatibility error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
