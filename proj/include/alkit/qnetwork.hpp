#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alkit/env.hpp"

namespace alkit::rl {

inline constexpr int kStateSize = 30;
inline constexpr int kActionSize = 3;
inline constexpr int kHidden1 = 10;
inline constexpr int kHidden2 = 5;
inline constexpr int kConcatSize = kHidden1 + kActionSize;  // 13
inline constexpr int kParamCount =
    kHidden1 * kStateSize + kHidden1 + kHidden2 * kConcatSize + kHidden2 + kHidden2 + 1;  // 386

// Q(s, a; theta): three fully connected layers. The state vector feeds a
// 30->10 linear+sigmoid layer; its output is concatenated with the 3 action
// features into a 13->5 linear+sigmoid layer; a final 5->1 linear layer
// produces the scalar value. Parameters live in one flat vector
// [W1 | b1 | W2 | b2 | W3 | b3] so they can be serialized and updated
// elementwise.
class QNetwork {
 public:
  QNetwork() : theta_(kParamCount, 0.0) {}

  static QNetwork random_init(uint64_t seed);
  static QNetwork from_params(std::span<const double> params);

  double forward(std::span<const double> state, const env::ActionFeatures& a) const;

  // Adds upstream * dQ/dtheta to grad (grad has kParamCount entries).
  void accumulate_gradient(std::span<const double> state, const env::ActionFeatures& a, double upstream,
                           std::span<double> grad) const;

  std::span<const double> params() const { return theta_; }
  std::span<double> params() { return theta_; }

 private:
  std::vector<double> theta_;
};

}  // namespace alkit::rl
