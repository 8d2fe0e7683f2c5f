#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include <json.hpp>

#include "alkit/errors.hpp"
#include "alkit/rl.hpp"

namespace alkit::rl {

namespace {

EpisodeRunStats run_episode_impl(const data::Dataset& raw, const QNetwork& net, ReplayBuffer& buffer,
                                 const std::function<double()>& epsilon_now, SplitMix64& rng,
                                 const env::EpisodeConfig& episode_cfg, uint64_t episode_seed,
                                 int64_t* transition_counter) {
  env::EpisodeConfig cfg = episode_cfg;
  cfg.seed = episode_seed;
  env::EpisodeState state = env::begin_episode(raw, cfg);

  env::StateVector s = env::compute_state(state);
  std::vector<int> pool(state.unlabelled().begin(), state.unlabelled().end());
  std::vector<env::ActionFeatures> actions;
  actions.reserve(pool.size());
  for (int r : pool) actions.push_back(env::compute_action_features(state, r));

  EpisodeRunStats stats;
  for (;;) {
    const double epsilon = epsilon_now();
    int pick = 0;
    if (rng.next_double() < epsilon) {
      pick = static_cast<int>(rng.next_below(pool.size()));
    } else {
      double best = net.forward(s.scores, actions[0]);
      for (size_t i = 1; i < actions.size(); ++i) {
        const double q = net.forward(s.scores, actions[i]);
        if (q > best) {
          best = q;
          pick = static_cast<int>(i);
        }
      }
    }
    const int chosen = pool[pick];
    const env::ActionFeatures chosen_action = actions[pick];
    const auto outcome = env::step(state, chosen);
    ++stats.steps;
    if (transition_counter) ++(*transition_counter);

    env::StateVector s_next = env::compute_state(state);
    std::vector<int> next_pool;
    std::vector<env::ActionFeatures> next_actions;
    if (!outcome.terminal) {
      next_pool.assign(state.unlabelled().begin(), state.unlabelled().end());
      next_actions.reserve(next_pool.size());
      for (int r : next_pool) next_actions.push_back(env::compute_action_features(state, r));
    }

    Experience exp;
    exp.state = std::move(s);
    exp.action = chosen_action;
    exp.reward = outcome.reward;
    exp.next_state = s_next;
    exp.next_actions = next_actions;
    buffer.push(std::move(exp));

    if (outcome.terminal) {
      stats.reason = outcome.reason;
      break;
    }
    s = std::move(s_next);
    pool = std::move(next_pool);
    actions = std::move(next_actions);
  }
  return stats;
}

}  // namespace

EpisodeRunStats run_training_episode(const data::Dataset& raw, const QNetwork& net, ReplayBuffer& buffer,
                                     double epsilon, SplitMix64& rng, const env::EpisodeConfig& episode_cfg) {
  const uint64_t episode_seed = rng.next_u64();
  return run_episode_impl(raw, net, buffer, [epsilon]() { return epsilon; }, rng, episode_cfg, episode_seed, nullptr);
}

uint64_t corpus_manifest_hash(const std::vector<data::Dataset>& corpus) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (const auto& d : corpus) {
    h = fnv1a(d.name, h);
    const uint64_t shape[2] = {static_cast<uint64_t>(d.rows()), static_cast<uint64_t>(d.cols())};
    h = fnv1a_bytes(shape, sizeof(shape), h);
  }
  return h;
}

namespace {

nlohmann::json trainer_config_json(const TrainerConfig& cfg) {
  nlohmann::json j;
  j["gamma"] = cfg.gamma;
  j["learning_rate"] = cfg.learning_rate;
  j["batch_size"] = cfg.batch_size;
  j["target_copy_factor"] = cfg.target_copy_factor;
  j["epsilon_start"] = cfg.epsilon.start;
  j["epsilon_end"] = cfg.epsilon.end;
  j["epsilon_steps"] = cfg.epsilon.steps;
  j["epsilon_decay"] = cfg.epsilon_decay == TrainerConfig::EpsilonDecay::per_update ? "update" : "transition";
  j["warm_start_episodes"] = cfg.warm_start_episodes;
  j["nn_updates_per_warm_start"] = cfg.nn_updates_per_warm_start;
  j["training_iterations"] = cfg.training_iterations;
  j["episodes_per_iteration"] = cfg.episodes_per_iteration;
  j["updates_per_iteration"] = cfg.updates_per_iteration;
  j["double_dqn"] = cfg.double_dqn;
  j["replay_buffer_size"] = cfg.replay.capacity;
  j["prioritized_replay_exponent"] = cfg.replay.exponent;
  j["priority_floor"] = cfg.replay.priority_floor;
  j["v_size"] = cfg.episode.v_size;
  j["test_fraction"] = cfg.episode.test_fraction;
  j["quality_factor"] = cfg.episode.quality_factor;
  j["max_steps"] = cfg.episode.max_steps;
  j["episode_model"] = cfg.episode.model.kind == env::ModelSpec::Kind::logistic_regression ? "lr" : "rf";
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace

strategies::PolicyArtifact train_policy(const std::vector<data::Dataset>& corpus, const TrainerConfig& cfg,
                                        std::ostream* log) {
  if (corpus.empty()) throw DomainError("train_policy: corpus is empty");
  if (cfg.episode.v_size != kStateSize) {
    throw DomainError("train_policy: v_size must be " + std::to_string(kStateSize));
  }
  if (cfg.batch_size < 1) throw DomainError("train_policy: batch_size must be >= 1");
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw DomainError("train_policy: gamma must be in [0,1)");

  QNetwork net = QNetwork::random_init(SeedSeq(cfg.seed).mix("net-init").value());
  QNetwork target = net;
  ReplayBuffer buffer(cfg.replay);
  SplitMix64 rng_env(SeedSeq(cfg.seed).mix("episodes").value());
  SplitMix64 rng_replay(SeedSeq(cfg.seed).mix("replay").value());

  int64_t update_count = 0;
  int64_t transition_count = 0;

  auto epsilon_now = [&]() {
    const int64_t c =
        cfg.epsilon_decay == TrainerConfig::EpsilonDecay::per_update ? update_count : transition_count;
    return epsilon_value(c, cfg.epsilon);
  };

  // one minibatch update; returns the mean |td error| of the sampled batch
  auto update_once = [&]() {
    const std::vector<size_t> indices = buffer.sample(cfg.batch_size, rng_replay);
    std::vector<double> deltas(indices.size());
    std::vector<QTrainingExample> batch(indices.size());
    std::vector<double> targets(indices.size());
    double sum_abs = 0.0;
    for (size_t i = 0; i < indices.size(); ++i) {
      const Experience& e = buffer.at(indices[i]);
      targets[i] = compute_td_target(e, net, target, cfg.gamma, cfg.double_dqn);
      deltas[i] = targets[i] - net.forward(e.state.scores, e.action);
      sum_abs += std::abs(deltas[i]);
      batch[i] = {&e.state, &e.action, targets[i]};
    }
    const std::vector<double> grad = backward_q(net, batch);
    auto theta = net.params();
    for (int i = 0; i < kParamCount; ++i) theta[i] -= cfg.learning_rate * grad[i];
    buffer.update_priorities(indices, deltas);
    soft_update_target(target, net, cfg.target_copy_factor);
    ++update_count;
    return sum_abs / static_cast<double>(indices.size());
  };

  // warm start under a pure random policy (epsilon fixed at 1),
  // then the configured number of parameter updates
  for (int e = 0; e < cfg.warm_start_episodes; ++e) {
    const data::Dataset& ds = corpus[rng_env.next_below(corpus.size())];
    const uint64_t seed = rng_env.next_u64();
    run_episode_impl(ds, net, buffer, []() { return 1.0; }, rng_env, cfg.episode, seed, nullptr);
  }
  for (int u = 0; u < cfg.nn_updates_per_warm_start; ++u) update_once();

  for (int it = 1; it <= cfg.training_iterations; ++it) {
    const data::Dataset& ds = corpus[rng_env.next_below(corpus.size())];
    double steps_sum = 0.0;
    for (int e = 0; e < cfg.episodes_per_iteration; ++e) {
      const uint64_t seed = rng_env.next_u64();
      const auto stats = run_episode_impl(ds, net, buffer, epsilon_now, rng_env, cfg.episode, seed, &transition_count);
      steps_sum += stats.steps;
    }
    double delta_sum = 0.0;
    for (int u = 0; u < cfg.updates_per_iteration; ++u) delta_sum += update_once();
    if (log) {
      char line[160];
      std::snprintf(line, sizeof(line), "iteration=%d mean_episode_length=%.3f epsilon=%.4f mean_abs_td=%.6f\n", it,
                    steps_sum / static_cast<double>(cfg.episodes_per_iteration), epsilon_now(),
                    delta_sum / static_cast<double>(cfg.updates_per_iteration));
      (*log) << line;
    }
  }

  strategies::PolicyArtifact artifact;
  artifact.theta.assign(net.params().begin(), net.params().end());
  artifact.v_size = cfg.episode.v_size;
  artifact.feature_schema_version = 1;
  artifact.hyperparameters_json = trainer_config_json(cfg).dump();
  artifact.corpus_hash = corpus_manifest_hash(corpus);
  return artifact;
}

}  // namespace alkit::rl
