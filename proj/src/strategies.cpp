#include "alkit/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "alkit/errors.hpp"
#include "alkit/qnetwork.hpp"

namespace alkit::strategies {

int select_random(const env::EpisodeState& state, SplitMix64& rng) {
  auto pool = state.unlabelled();
  if (pool.empty()) throw DomainError("select_random: unlabelled pool is empty");
  return pool[rng.next_below(pool.size())];
}

int select_margin(const env::EpisodeState& state) {
  auto pool = state.unlabelled();
  if (pool.empty()) throw DomainError("select_margin: unlabelled pool is empty");
  const auto& model = state.classifier();
  if (!model.fitted()) throw DomainError("select_margin: classifier not fitted");
  int best = -1;
  double best_margin = 0.0;
  for (int r : pool) {
    const double p0 = model.predict_proba_row(state.features().row(r));
    const double margin = std::abs(2.0 * p0 - 1.0);
    if (best < 0 || margin < best_margin) {
      best = r;
      best_margin = margin;
    }
  }
  return best;
}

namespace {

void check_artifact(const env::EpisodeState& state, const PolicyArtifact& artifact) {
  if (artifact.feature_schema_version != 1) {
    throw CompatibilityError("policy artifact: unsupported feature schema version " +
                             std::to_string(artifact.feature_schema_version));
  }
  if (static_cast<int>(artifact.theta.size()) != rl::kParamCount) {
    throw CompatibilityError("policy artifact: expected " + std::to_string(rl::kParamCount) + " parameters, got " +
                             std::to_string(artifact.theta.size()));
  }
  if (artifact.v_size != rl::kStateSize) {
    throw CompatibilityError("policy artifact: v_size " + std::to_string(artifact.v_size) + " unsupported");
  }
  if (static_cast<int>(state.v_rows().size()) != artifact.v_size) {
    throw CompatibilityError("policy artifact: episode has " + std::to_string(state.v_rows().size()) +
                             " V rows, artifact expects " + std::to_string(artifact.v_size));
  }
}

int argmax_q(const env::EpisodeState& state, const rl::QNetwork& net, std::span<const int> candidates) {
  const env::StateVector sv = env::compute_state(state);
  int best = -1;
  double best_q = 0.0;
  for (int r : candidates) {
    const double q = net.forward(sv.scores, env::compute_action_features(state, r));
    if (best < 0 || q > best_q) {
      best = r;
      best_q = q;
    }
  }
  return best;
}

}  // namespace

int select_learned(const env::EpisodeState& state, const PolicyArtifact& artifact) {
  auto pool = state.unlabelled();
  if (pool.empty()) throw DomainError("select_learned: unlabelled pool is empty");
  check_artifact(state, artifact);
  const rl::QNetwork net = rl::QNetwork::from_params(artifact.theta);
  return argmax_q(state, net, pool);
}

int select_learned(const env::EpisodeState& state, const PolicyArtifact& artifact, int candidate_cap,
                   SplitMix64& rng) {
  auto pool = state.unlabelled();
  if (pool.empty()) throw DomainError("select_learned: unlabelled pool is empty");
  if (candidate_cap <= 0 || static_cast<int>(pool.size()) <= candidate_cap) {
    return select_learned(state, artifact);
  }
  check_artifact(state, artifact);
  std::vector<int> sampled(pool.begin(), pool.end());
  for (int i = 0; i < candidate_cap; ++i) {
    const size_t j = i + rng.next_below(sampled.size() - i);
    std::swap(sampled[i], sampled[j]);
  }
  sampled.resize(candidate_cap);
  std::sort(sampled.begin(), sampled.end());
  const rl::QNetwork net = rl::QNetwork::from_params(artifact.theta);
  return argmax_q(state, net, sampled);
}

}  // namespace alkit::strategies
