#include <algorithm>
#include <cmath>

#include "alkit/errors.hpp"
#include "alkit/rl.hpp"

namespace alkit::rl {

ReplayBuffer::ReplayBuffer(ReplayConfig cfg) : cfg_(cfg) {
  if (cfg_.capacity < 1) throw DomainError("replay buffer: capacity must be >= 1");
  if (cfg_.exponent < 0.0) throw DomainError("replay buffer: exponent must be >= 0");
}

void ReplayBuffer::push(Experience e) {
  if (items_.empty()) {
    e.priority = 1.0;
  } else {
    double max_priority = items_.front().priority;
    for (const auto& item : items_) max_priority = std::max(max_priority, item.priority);
    e.priority = max_priority;
  }
  if (static_cast<int>(items_.size()) < cfg_.capacity) {
    items_.push_back(std::move(e));
  } else {
    items_[write_pos_] = std::move(e);
  }
  write_pos_ = (write_pos_ + 1) % static_cast<size_t>(cfg_.capacity);
  ++pushed_;
}

std::vector<double> ReplayBuffer::sampling_probabilities() const {
  std::vector<double> p(items_.size());
  double total = 0.0;
  for (size_t i = 0; i < items_.size(); ++i) {
    p[i] = std::pow(items_[i].priority, cfg_.exponent);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<size_t> ReplayBuffer::sample(int batch_size, SplitMix64& rng) const {
  if (items_.empty()) throw DomainError("replay buffer: cannot sample from an empty buffer");
  if (batch_size < 1) throw DomainError("replay buffer: batch size must be >= 1");
  std::vector<double> cumulative(items_.size());
  double total = 0.0;
  for (size_t i = 0; i < items_.size(); ++i) {
    total += std::pow(items_[i].priority, cfg_.exponent);
    cumulative[i] = total;
  }
  std::vector<size_t> out(static_cast<size_t>(batch_size));
  for (auto& idx : out) {
    const double u = rng.next_double() * total;
    idx = static_cast<size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    if (idx >= items_.size()) idx = items_.size() - 1;
  }
  return out;
}

void ReplayBuffer::update_priorities(std::span<const size_t> indices, std::span<const double> td_errors) {
  if (indices.size() != td_errors.size()) throw DomainError("update_priorities: size mismatch");
  for (size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= items_.size()) throw DomainError("update_priorities: index out of range");
    items_[indices[i]].priority = std::abs(td_errors[i]) + cfg_.priority_floor;
  }
}

double compute_td_target(const Experience& exp, const QNetwork& net, const QNetwork& target_net, double gamma,
                         bool double_dqn) {
  if (exp.terminal()) return exp.reward;
  double bootstrap;
  if (double_dqn) {
    int best = 0;
    double best_q = net.forward(exp.next_state.scores, exp.next_actions[0]);
    for (size_t i = 1; i < exp.next_actions.size(); ++i) {
      const double q = net.forward(exp.next_state.scores, exp.next_actions[i]);
      if (q > best_q) {
        best_q = q;
        best = static_cast<int>(i);
      }
    }
    bootstrap = target_net.forward(exp.next_state.scores, exp.next_actions[best]);
  } else {
    bootstrap = target_net.forward(exp.next_state.scores, exp.next_actions[0]);
    for (size_t i = 1; i < exp.next_actions.size(); ++i) {
      bootstrap = std::max(bootstrap, target_net.forward(exp.next_state.scores, exp.next_actions[i]));
    }
  }
  return exp.reward + gamma * bootstrap;
}

std::vector<double> backward_q(const QNetwork& net, std::span<const QTrainingExample> batch) {
  if (batch.empty()) throw DomainError("backward_q: empty batch");
  std::vector<double> grad(kParamCount, 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& item : batch) {
    const double q = net.forward(item.state->scores, *item.action);
    net.accumulate_gradient(item.state->scores, *item.action, (q - item.target) * inv_n, grad);
  }
  return grad;
}

void soft_update_target(QNetwork& target_net, const QNetwork& net, double tau) {
  auto target = target_net.params();
  auto online = net.params();
  for (int i = 0; i < kParamCount; ++i) target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

double epsilon_value(int64_t update_count, const EpsilonSchedule& schedule) {
  if (update_count < 0) throw DomainError("epsilon_value: negative update count");
  if (update_count >= schedule.steps) return schedule.end;
  const double frac = static_cast<double>(update_count) / static_cast<double>(schedule.steps);
  return schedule.start + (schedule.end - schedule.start) * frac;
}

void tabular_q_update(QTable& table, int s, int a, double r, int s_next, double alpha, double gamma) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("tabular_q_update: alpha must be in (0,1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("tabular_q_update: gamma must be in [0,1)");
  if (s < 0 || s >= static_cast<int>(table.size())) throw DomainError("tabular_q_update: unknown state");
  if (s_next < 0 || s_next >= static_cast<int>(table.size())) throw DomainError("tabular_q_update: unknown next state");
  if (a < 0 || a >= static_cast<int>(table[s].size())) throw DomainError("tabular_q_update: unknown action");
  if (table[s_next].empty()) throw DomainError("tabular_q_update: next state has no actions");
  double best_next = table[s_next][0];
  for (double v : table[s_next]) best_next = std::max(best_next, v);
  table[s][a] = (1.0 - alpha) * table[s][a] + alpha * (r + gamma * best_next);
}

}  // namespace alkit::rl
