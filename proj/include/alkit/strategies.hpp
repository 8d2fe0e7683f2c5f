#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "alkit/env.hpp"
#include "alkit/rng.hpp"

namespace alkit::strategies {

// Serialized query policy: the flat Q-network parameter vector plus the
// metadata needed to refuse incompatible deployments.
struct PolicyArtifact {
  std::vector<double> theta;
  int v_size = 30;
  int feature_schema_version = 1;
  std::string hyperparameters_json;  // training configuration snapshot
  uint64_t corpus_hash = 0;
};

// Versioned binary container: magic, format version, JSON header (shapes,
// v_size, hyperparameters, corpus hash), then a little-endian float64
// parameter block. Round-trips bit-exactly.
void save_policy_artifact(const PolicyArtifact& artifact, const std::filesystem::path& path);
PolicyArtifact load_policy_artifact(const std::filesystem::path& path);

// Debugging dumps of fitted classifiers in the same container format, tagged
// with a model-kind header field.
void save_model_dump(const models::LogisticRegression& model, const std::filesystem::path& path);
void save_model_dump(const models::RandomForest& model, const std::filesystem::path& path);

// Uniform draw from the unlabelled pool.
int select_random(const env::EpisodeState& state, SplitMix64& rng);

// Smallest gap between the two class probabilities; for a binary problem the
// margin is |2 P(Y=0|x) - 1|. Ties break to the lowest row index.
int select_margin(const env::EpisodeState& state);

// Greedy Q-policy: computes the state vector once, evaluates Q(s, a) for
// every candidate, and returns the argmax (ties to the lowest row index).
int select_learned(const env::EpisodeState& state, const PolicyArtifact& artifact);

// Variant that caps the candidate evaluation to a uniform subsample of the
// pool. cap <= 0 means no capping.
int select_learned(const env::EpisodeState& state, const PolicyArtifact& artifact, int candidate_cap,
                   SplitMix64& rng);

}  // namespace alkit::strategies
