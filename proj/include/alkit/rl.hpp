#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "alkit/dataset.hpp"
#include "alkit/env.hpp"
#include "alkit/qnetwork.hpp"
#include "alkit/rng.hpp"
#include "alkit/strategies.hpp"

namespace alkit::rl {

struct Experience {
  env::StateVector state;
  env::ActionFeatures action;
  double reward = -1.0;
  env::StateVector next_state;
  std::vector<env::ActionFeatures> next_actions;  // empty iff terminal
  double priority = 1.0;

  bool terminal() const { return next_actions.empty(); }
};

struct ReplayConfig {
  int capacity = 10000;
  double exponent = 3.0;       // beta in the priority distribution
  double priority_floor = 1e-6;  // e added to |td error|
};

// Ring buffer with proportional prioritized sampling: an item is drawn with
// probability rho_i^beta / sum_k rho_k^beta. New experiences enter at the
// current maximum priority; the oldest item is evicted at capacity.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(ReplayConfig cfg = {});

  void push(Experience e);
  // batch_size independent draws with replacement; returns buffer indices.
  std::vector<size_t> sample(int batch_size, SplitMix64& rng) const;
  void update_priorities(std::span<const size_t> indices, std::span<const double> td_errors);

  size_t size() const { return items_.size(); }
  const Experience& at(size_t i) const { return items_[i]; }
  const ReplayConfig& config() const { return cfg_; }
  std::vector<double> sampling_probabilities() const;
  int64_t total_pushed() const { return pushed_; }

 private:
  ReplayConfig cfg_;
  std::vector<Experience> items_;
  size_t write_pos_ = 0;
  int64_t pushed_ = 0;
};

// Bootstrap target for one experience. Terminal -> r. Otherwise Double DQN
// selects the next action with the online network and evaluates it with the
// target network; plain DQN takes the max under the target network. Ties go
// to the lowest action index.
double compute_td_target(const Experience& exp, const QNetwork& net, const QNetwork& target_net, double gamma,
                         bool double_dqn);

struct QTrainingExample {
  const env::StateVector* state = nullptr;
  const env::ActionFeatures* action = nullptr;
  double target = 0.0;
};

// Gradient of 1/2 * mean over the batch of (Q(s,a) - target)^2.
std::vector<double> backward_q(const QNetwork& net, std::span<const QTrainingExample> batch);

// theta_target <- (1 - tau) * theta_target + tau * theta
void soft_update_target(QNetwork& target_net, const QNetwork& net, double tau);

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.1;
  int steps = 1000;
};

// Linear interpolation from start to end over the configured number of
// updates, clamped afterwards.
double epsilon_value(int64_t update_count, const EpsilonSchedule& schedule);

struct TrainerConfig {
  double gamma = 0.999;
  double learning_rate = 1e-4;
  int batch_size = 32;
  double target_copy_factor = 0.01;
  EpsilonSchedule epsilon;
  enum class EpsilonDecay { per_update, per_transition };
  EpsilonDecay epsilon_decay = EpsilonDecay::per_update;
  int warm_start_episodes = 100;
  int nn_updates_per_warm_start = 100;
  int training_iterations = 1000;
  int episodes_per_iteration = 10;
  int updates_per_iteration = 60;
  bool double_dqn = true;
  ReplayConfig replay;
  env::EpisodeConfig episode;  // per-episode environment settings; model defaults to LR
  uint64_t seed = 0;
};

struct EpisodeRunStats {
  int steps = 0;
  env::TerminalReason reason = env::TerminalReason::none;
};

// Simulates one active-learning episode under an epsilon-greedy policy and
// records every transition in the replay buffer.
EpisodeRunStats run_training_episode(const data::Dataset& raw, const QNetwork& net, ReplayBuffer& buffer,
                                     double epsilon, SplitMix64& rng, const env::EpisodeConfig& episode_cfg);

// Full policy-learning loop: warm-start episodes under a random policy
// followed by warm-start updates, then training iterations of (pick dataset,
// run episodes, minibatch updates with prioritized replay, soft target
// updates). Writes one progress line per iteration to log when provided.
strategies::PolicyArtifact train_policy(const std::vector<data::Dataset>& corpus, const TrainerConfig& cfg,
                                        std::ostream* log = nullptr);

uint64_t corpus_manifest_hash(const std::vector<data::Dataset>& corpus);

using QTable = std::vector<std::vector<double>>;

// Tabular Q-learning update:
// Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')).
void tabular_q_update(QTable& table, int s, int a, double r, int s_next, double alpha, double gamma);

}  // namespace alkit::rl
