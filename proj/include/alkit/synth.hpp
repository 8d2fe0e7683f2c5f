#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "alkit/dataset.hpp"

namespace alkit::synth {

// Tabular binary-classification generator. A 2-D latent gaussian drives the
// label through a blend of a linear halfspace score and an annulus score
// (nonlinearity = 0 is purely linear, 1 purely radial); the minority class is
// the top quantile of the blended score. The first numeric columns observe
// the latents with noise, later ones are random projections or pure noise;
// categorical columns draw class-conditional categories (roughly half of
// them informative).
struct ShapedSpec {
  std::string name;
  int rows = 500;
  int numeric_cols = 10;
  int categorical_cols = 0;
  double minority_fraction = 0.3;
  double nonlinearity = 0.5;
  double label_noise = 0.03;
  double feature_noise = 0.25;
  uint64_t seed = 0;
};

data::Dataset make_shaped(const ShapedSpec& spec);

data::Dataset make_blobs(const std::string& name, int rows, int dims, double separation, double minority_fraction,
                         double label_noise, uint64_t seed);

// Two interleaving half-circles with gaussian jitter, optionally padded with
// uninformative gaussian columns.
data::Dataset make_two_moons(const std::string& name, int rows, double noise, uint64_t seed,
                             int extra_noise_dims = 0);

// Fixed dataset suites used by the acceptance protocol and reproducible from
// the CLI (make-synth).
std::vector<data::Dataset> suite_bench_small(uint64_t seed);
std::vector<data::Dataset> suite_table4_small(uint64_t seed);
std::vector<data::Dataset> suite_policy_corpus(uint64_t seed);
std::vector<data::Dataset> suite_eval_synth(uint64_t seed);

std::vector<std::string> suite_names();
std::vector<data::Dataset> make_suite(const std::string& suite, uint64_t seed);

// Writes one CSV per dataset plus a manifest.txt of (name, path, label) rows.
std::filesystem::path write_suite(const std::filesystem::path& dir, const std::vector<data::Dataset>& suite);

}  // namespace alkit::synth
