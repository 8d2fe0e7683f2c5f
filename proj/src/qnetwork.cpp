#include "alkit/qnetwork.hpp"

#include <cmath>

#include "alkit/errors.hpp"
#include "alkit/rng.hpp"

namespace alkit::rl {

namespace {

constexpr int kW1 = 0;
constexpr int kB1 = kW1 + kHidden1 * kStateSize;
constexpr int kW2 = kB1 + kHidden1;
constexpr int kB2 = kW2 + kHidden2 * kConcatSize;
constexpr int kW3 = kB2 + kHidden2;
constexpr int kB3 = kW3 + kHidden2;
static_assert(kB3 + 1 == kParamCount);

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Activations {
  double h1[kHidden1];
  double z[kConcatSize];
  double h2[kHidden2];
  double q;
};

void run_forward(std::span<const double> theta, std::span<const double> state, const env::ActionFeatures& a,
                 Activations& act) {
  for (int k = 0; k < kHidden1; ++k) {
    double acc = theta[kB1 + k];
    const double* w = &theta[kW1 + k * kStateSize];
    for (int j = 0; j < kStateSize; ++j) acc += w[j] * state[j];
    act.h1[k] = sigmoid(acc);
  }
  for (int k = 0; k < kHidden1; ++k) act.z[k] = act.h1[k];
  act.z[kHidden1] = a.score;
  act.z[kHidden1 + 1] = a.mean_dist_labelled;
  act.z[kHidden1 + 2] = a.mean_dist_unlabelled;
  for (int k = 0; k < kHidden2; ++k) {
    double acc = theta[kB2 + k];
    const double* w = &theta[kW2 + k * kConcatSize];
    for (int j = 0; j < kConcatSize; ++j) acc += w[j] * act.z[j];
    act.h2[k] = sigmoid(acc);
  }
  double q = theta[kB3];
  for (int k = 0; k < kHidden2; ++k) q += theta[kW3 + k] * act.h2[k];
  act.q = q;
}

}  // namespace

QNetwork QNetwork::random_init(uint64_t seed) {
  QNetwork net;
  SplitMix64 rng(seed);
  auto uniform = [&rng](double bound) { return (2.0 * rng.next_double() - 1.0) * bound; };
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(kStateSize));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(kConcatSize));
  const double bound3 = 1.0 / std::sqrt(static_cast<double>(kHidden2));
  auto theta = net.params();
  for (int i = kW1; i < kW2; ++i) theta[i] = uniform(bound1);
  for (int i = kW2; i < kW3; ++i) theta[i] = uniform(bound2);
  for (int i = kW3; i < kParamCount; ++i) theta[i] = uniform(bound3);
  return net;
}

QNetwork QNetwork::from_params(std::span<const double> params) {
  if (params.size() != kParamCount) throw DomainError("q-network: wrong parameter count");
  QNetwork net;
  std::copy(params.begin(), params.end(), net.theta_.begin());
  return net;
}

double QNetwork::forward(std::span<const double> state, const env::ActionFeatures& a) const {
  if (static_cast<int>(state.size()) != kStateSize) throw DomainError("q-network: state must have 30 entries");
  Activations act;
  run_forward(theta_, state, a, act);
  return act.q;
}

void QNetwork::accumulate_gradient(std::span<const double> state, const env::ActionFeatures& a, double upstream,
                                   std::span<double> grad) const {
  if (static_cast<int>(state.size()) != kStateSize) throw DomainError("q-network: state must have 30 entries");
  Activations act;
  run_forward(theta_, state, a, act);

  grad[kB3] += upstream;
  double dz2[kHidden2];
  for (int k = 0; k < kHidden2; ++k) {
    grad[kW3 + k] += upstream * act.h2[k];
    dz2[k] = upstream * theta_[kW3 + k] * act.h2[k] * (1.0 - act.h2[k]);
  }
  double dz[kConcatSize] = {};
  for (int k = 0; k < kHidden2; ++k) {
    grad[kB2 + k] += dz2[k];
    const double* w = &theta_[kW2 + k * kConcatSize];
    double* g = &grad[kW2 + k * kConcatSize];
    for (int j = 0; j < kConcatSize; ++j) {
      g[j] += dz2[k] * act.z[j];
      dz[j] += dz2[k] * w[j];
    }
  }
  for (int k = 0; k < kHidden1; ++k) {
    const double dh1 = dz[k] * act.h1[k] * (1.0 - act.h1[k]);
    grad[kB1 + k] += dh1;
    double* g = &grad[kW1 + k * kStateSize];
    for (int j = 0; j < kStateSize; ++j) g[j] += dh1 * state[j];
  }
}

}  // namespace alkit::rl
