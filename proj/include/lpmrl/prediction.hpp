#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"

namespace lpmrl {

/// Online estimate of the expected immediate reward r(s, a).
///
/// Both modes are linear in a feature vector x(s, a). The tabular mode expects
/// one-hot features and keeps an exact running mean per index (or a constant-rate
/// average when `step_size > 0`); the linear mode is least-mean-squares regression.
class RewardMeanEstimator {
 public:
  enum class Mode { tabular, linear };

  RewardMeanEstimator() = default;

  static RewardMeanEstimator tabular(Eigen::Index size, double step_size = 0.0) {
    RewardMeanEstimator est;
    est.mode_ = Mode::tabular;
    est.weights_ = Vector::Zero(size);
    est.counts_ = Vector::Zero(size);
    est.step_size_ = step_size;
    return est;
  }

  static RewardMeanEstimator linear(Eigen::Index size, double step_size) {
    require(step_size > 0.0, "RewardMeanEstimator: linear mode needs a positive step size");
    RewardMeanEstimator est;
    est.mode_ = Mode::linear;
    est.weights_ = Vector::Zero(size);
    est.counts_ = Vector::Zero(size);
    est.step_size_ = step_size;
    return est;
  }

  double predict(const Vector& x) const {
    require(x.size() == weights_.size(), "RewardMeanEstimator: feature dimension mismatch");
    return x.dot(weights_);
  }

  void update(const Vector& x, double reward) {
    require(x.size() == weights_.size(), "RewardMeanEstimator: feature dimension mismatch");
    if (mode_ == Mode::tabular) {
      Eigen::Index idx = 0;
      x.maxCoeff(&idx);
      counts_[idx] += 1.0;
      const double rate = step_size_ > 0.0 ? step_size_ : 1.0 / counts_[idx];
      weights_[idx] += rate * (reward - weights_[idx]);
    } else {
      weights_ += step_size_ * (reward - x.dot(weights_)) * x;
    }
  }

  Mode mode() const { return mode_; }
  const Vector& weights() const { return weights_; }
  Vector& weights() { return weights_; }
  double step_size() const { return step_size_; }

 private:
  Mode mode_ = Mode::tabular;
  Vector weights_;
  Vector counts_;
  double step_size_ = 0.0;
};

enum class TargetKind { fixed, centralised, custom };

inline std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::fixed: return "fixed";
    case TargetKind::centralised: return "centralised";
    case TargetKind::custom: return "custom";
  }
  return "fixed";
}

/// Per-step target tau_R(s, a) defining which rewards count as downside.
template <class Action>
struct TargetFunction {
  TargetKind kind = TargetKind::fixed;
  // Return-level target for the fixed kind; the per-step value is (1 - discount) * tau.
  double tau = 0.0;
  double discount = 1.0;
  std::function<double(const Vector&, const Action&)> custom;

  static TargetFunction fixed(double tau, double discount) {
    TargetFunction t;
    t.kind = TargetKind::fixed;
    t.tau = tau;
    t.discount = discount;
    return t;
  }

  static TargetFunction centralised() {
    TargetFunction t;
    t.kind = TargetKind::centralised;
    return t;
  }

  static TargetFunction from(std::function<double(const Vector&, const Action&)> fn) {
    TargetFunction t;
    t.kind = TargetKind::custom;
    t.custom = std::move(fn);
    return t;
  }

  /// `reward_features` feeds the mean estimator and is ignored by the other kinds.
  double per_step(const Vector& state, const Action& action, const RewardMeanEstimator* mean,
                  const Vector& reward_features) const {
    switch (kind) {
      case TargetKind::fixed:
        return (1.0 - discount) * tau;
      case TargetKind::centralised:
        require(mean != nullptr, "centralised target needs a reward mean estimator");
        return mean->predict(reward_features);
      case TargetKind::custom: {
        require(static_cast<bool>(custom), "custom target has no function");
        const double value = custom(state, action);
        if (!std::isfinite(value)) throw std::runtime_error("custom target returned a non-finite value");
        return value;
      }
    }
    return 0.0;
  }
};

/// g(r) = ((tau_r - r)_+)^m, the reward transform whose value function bounds the LPM.
inline double transform_reward(double reward, double tau_r, int order) {
  require(order >= 1, "transform_reward: order must be >= 1");
  const double shortfall = positive_part(tau_r - reward);
  return order == 1 ? shortfall : std::pow(shortfall, order);
}

/// Linear critic estimate(s, a) = psi(s, a)^T w + phi(s)^T v with accumulating traces.
struct CompatibleLinearCritic {
  Vector w;
  Vector v;
  Vector trace_w;
  Vector trace_v;
  double step_size = 0.01;
  double trace_decay = 0.0;
  double discount = 1.0;
  // When set, step_size shrinks to 1 / |e^T (x - gamma x')| whenever an update would overshoot.
  bool bounded_step = false;

  CompatibleLinearCritic() = default;

  CompatibleLinearCritic(Eigen::Index score_dim, Eigen::Index baseline_dim, double step_size_,
                         double trace_decay_, double discount_)
      : w(Vector::Zero(score_dim)),
        v(Vector::Zero(baseline_dim)),
        trace_w(Vector::Zero(score_dim)),
        trace_v(Vector::Zero(baseline_dim)),
        step_size(step_size_),
        trace_decay(trace_decay_),
        discount(discount_) {
    require(step_size_ > 0.0, "critic step size must be positive");
    require(trace_decay_ >= 0.0 && trace_decay_ <= 1.0, "trace decay must be in [0, 1]");
    require(discount_ >= 0.0 && discount_ <= 1.0, "discount must be in [0, 1]");
  }

  void reset_traces() {
    trace_w.setZero();
    trace_v.setZero();
  }
};

inline double critic_estimate(const CompatibleLinearCritic& critic, const Vector& psi,
                              const Vector& phi) {
  require(psi.size() == critic.w.size() && phi.size() == critic.v.size(),
          "critic_estimate: dimension mismatch");
  return psi.dot(critic.w) + phi.dot(critic.v);
}

/// One SARSA(lambda) step; returns the TD error. With trace_decay = 0 this is plain SARSA.
///
/// `psi_next`/`phi_next` are ignored for terminal transitions. `reward_override`
/// replaces the observed reward.
template <class Action>
double sarsa_update(CompatibleLinearCritic& critic, const Transition<Action>& transition,
                    const Vector& psi, const Vector& psi_next, const Vector& phi,
                    const Vector& phi_next, std::optional<double> reward_override = std::nullopt) {
  require(psi.size() == critic.w.size() && phi.size() == critic.v.size(),
          "sarsa_update: dimension mismatch");
  const double reward = reward_override.value_or(transition.reward);
  double bootstrap = 0.0;
  if (!transition.terminal) {
    require(psi_next.size() == critic.w.size() && phi_next.size() == critic.v.size(),
            "sarsa_update: next-step dimension mismatch");
    bootstrap = critic.discount * critic_estimate(critic, psi_next, phi_next);
  }
  const double delta = reward + bootstrap - critic_estimate(critic, psi, phi);
  const double decay = critic.discount * critic.trace_decay;
  critic.trace_w = decay * critic.trace_w + psi;
  critic.trace_v = decay * critic.trace_v + phi;
  if (critic.bounded_step) {
    double u = critic.trace_w.dot(psi) + critic.trace_v.dot(phi);
    if (!transition.terminal) {
      u -= critic.discount * (critic.trace_w.dot(psi_next) + critic.trace_v.dot(phi_next));
    }
    if (std::abs(u) * critic.step_size > 1.0) critic.step_size = 1.0 / std::abs(u);
  }
  critic.w += (critic.step_size * delta) * critic.trace_w;
  critic.v += (critic.step_size * delta) * critic.trace_v;
  return delta;
}

/// TD update of the LPM proxy critic on the transformed reward (tau_R - r)_+^m.
///
/// For the centralised kind the mean estimator sees the raw reward only after the
/// target for this step has been read. Orders above one are limited to single-step
/// episodes, where the return equals the reward.
template <class Action>
double lpm_critic_update(CompatibleLinearCritic& critic, const Transition<Action>& transition,
                         const TargetFunction<Action>& target, RewardMeanEstimator* mean,
                         const Vector& reward_features, const Vector& psi, const Vector& psi_next,
                         const Vector& phi, const Vector& phi_next, int order = 1) {
  require(order >= 1, "lpm_critic_update: order must be >= 1");
  require(order == 1 || transition.terminal,
          "lpm_critic_update: orders above 1 are only valid for single-step episodes");
  const double tau_r = target.per_step(transition.state, transition.action, mean, reward_features);
  const double g = transform_reward(transition.reward, tau_r, order);
  const double delta = sarsa_update(critic, transition, psi, psi_next, phi, phi_next, g);
  if (target.kind == TargetKind::centralised && mean != nullptr) {
    mean->update(reward_features, transition.reward);
  }
  return delta;
}

}  // namespace lpmrl
