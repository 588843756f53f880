#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"

namespace lpmrl::envs {

/// Two-step tree MDP with seven states. The first decision goes right (+1) or
/// left (-1); the second goes up (+1) or down (-1). Leaves are terminal.
class ToyMdp {
 public:
  using action_type = int;

  enum State : int { start = 0, left = 1, right = 2, left_up = 3, left_down = 4, right_up = 5, right_down = 6 };
  static constexpr int kStateCount = 7;
  static constexpr int kActionCount = 2;
  // Action 1 is "right" in the start state and "up" in the middle states.
  static constexpr int kRightOrUp = 1;
  static constexpr int kLeftOrDown = 0;

  Vector reset(Rng&) { return reset_to(observation(start)); }

  Vector reset_to(const Vector& s) {
    require(s.size() == 1, "ToyMdp: observation has one component");
    const int idx = static_cast<int>(s[0]);
    require(idx == start || idx == left || idx == right, "ToyMdp: can only start in a decision state");
    state_ = static_cast<State>(idx);
    done_ = false;
    return observation(state_);
  }

  StepResult step(int action, Rng&) {
    if (done_) throw std::logic_error("ToyMdp: step after terminal");
    require(action == kRightOrUp || action == kLeftOrDown, "ToyMdp: invalid action");
    StepResult out;
    const bool up = action == kRightOrUp;
    switch (state_) {
      case start:
        state_ = up ? right : left;
        out.reward = up ? 1.0 : -1.0;
        break;
      case left:
        state_ = up ? left_up : left_down;
        out.reward = up ? 1.0 : -1.0;
        done_ = true;
        break;
      case right:
        state_ = up ? right_up : right_down;
        out.reward = up ? 1.0 : -1.0;
        done_ = true;
        break;
      default:
        throw std::logic_error("ToyMdp: step from a leaf");
    }
    out.terminal = done_;
    out.next_state = observation(state_);
    return out;
  }

  static Vector observation(int state) { return Vector::Constant(1, static_cast<double>(state)); }

 private:
  State state_ = start;
  bool done_ = false;
};

/// pi(right | start) = theta1 and pi(up | left) = pi(up | right) = theta2.
class ToyPolicy {
 public:
  using action_type = int;

  ToyPolicy(double theta1, double theta2) : theta_(2) {
    theta_ << theta1, theta2;
    validate();
  }

  double prob_first(const Vector& s) const {
    return static_cast<int>(s[0]) == ToyMdp::start ? theta_[0] : theta_[1];
  }

  int sample(const Vector& s, Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < prob_first(s) ? ToyMdp::kRightOrUp : ToyMdp::kLeftOrDown;
  }

  double log_prob(const Vector& s, int a) const {
    const double p = prob_first(s);
    return std::log(a == ToyMdp::kRightOrUp ? p : 1.0 - p);
  }

  Vector score(const Vector& s, int a) const {
    Vector g = Vector::Zero(2);
    const int k = static_cast<int>(s[0]) == ToyMdp::start ? 0 : 1;
    g[k] = a == ToyMdp::kRightOrUp ? 1.0 / theta_[k] : -1.0 / (1.0 - theta_[k]);
    return g;
  }

  Vector baseline_features(const Vector&) const { return Vector::Ones(1); }

  /// One-hot over (state, action) pairs.
  Vector state_action_features(const Vector& s, int a) const {
    Vector x = Vector::Zero(ToyMdp::kStateCount * ToyMdp::kActionCount);
    x[static_cast<int>(s[0]) * ToyMdp::kActionCount + a] = 1.0;
    return x;
  }

  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta) {
    theta_ = theta;
    validate();
  }

 private:
  void validate() const {
    require(theta_.size() == 2, "ToyPolicy: two parameters");
    require(theta_[0] >= 0.0 && theta_[0] <= 1.0 && theta_[1] >= 0.0 && theta_[1] <= 1.0,
            "ToyPolicy: parameters must lie in [0, 1]");
  }
  Vector theta_;
};

struct ToyMoments {
  double mean = 0.0;
  double variance = 0.0;
  double lpm_at_zero = 0.0;
};

/// Exact moments of the return by enumerating the four paths (returns -2, 0, 0, +2).
inline ToyMoments toy_mdp_exact_moments(double theta1, double theta2) {
  require(theta1 >= 0.0 && theta1 <= 1.0 && theta2 >= 0.0 && theta2 <= 1.0,
          "toy_mdp_exact_moments: parameters must lie in [0, 1]");
  const std::array<double, 4> prob{(1.0 - theta1) * (1.0 - theta2), (1.0 - theta1) * theta2,
                                   theta1 * (1.0 - theta2), theta1 * theta2};
  const std::array<double, 4> ret{-2.0, 0.0, 0.0, 2.0};
  ToyMoments m;
  double second = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    m.mean += prob[i] * ret[i];
    second += prob[i] * ret[i] * ret[i];
    m.lpm_at_zero += prob[i] * positive_part(-ret[i]);
  }
  m.variance = second - m.mean * m.mean;
  if (m.variance < 0.0) m.variance = 0.0;
  return m;
}

}  // namespace lpmrl::envs
