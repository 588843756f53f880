#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"
#include "lpmrl/prediction.hpp"

namespace lpmrl {

enum class MomentSide { lower, upper };

struct PartialMomentSpec {
  int order = 1;
  MomentSide side = MomentSide::lower;
  double target = 0.0;
};

/// Plug-in partial moment about `spec.target` under uniform sample weights.
///
/// The lower side is E[((tau - X)_+)^m]. The upper side is reported as the
/// non-negative magnitude E[((X - tau)_+)^m], which equals -E[(tau - X)_-] for m = 1.
inline double empirical_partial_moment(std::span<const double> samples, const PartialMomentSpec& spec) {
  require(!samples.empty(), "empirical_partial_moment: empty sample set");
  require(spec.order >= 1, "empirical_partial_moment: order must be >= 1");
  double acc = 0.0;
  for (double x : samples) {
    const double dev = spec.side == MomentSide::lower ? positive_part(spec.target - x)
                                                      : positive_part(x - spec.target);
    acc += spec.order == 1 ? dev : std::pow(dev, spec.order);
  }
  return acc / static_cast<double>(samples.size());
}

inline double lower_partial_moment(std::span<const double> samples, double target, int order = 1) {
  return empirical_partial_moment(samples, {order, MomentSide::lower, target});
}

inline double sample_mean(std::span<const double> samples) {
  require(!samples.empty(), "sample_mean: empty sample set");
  double acc = 0.0;
  for (double x : samples) acc += x;
  return acc / static_cast<double>(samples.size());
}

/// Population (1/n) variance, two-pass.
inline double population_variance(std::span<const double> samples) {
  const double mu = sample_mean(samples);
  double acc = 0.0;
  for (double x : samples) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(samples.size());
}

/// True iff M[X + Y | tau_x + tau_y] <= M[X | tau_x] + M[Y | tau_y] on the paired samples.
///
/// Only defined for first-order moments. A relative slack of 1e-12 absorbs rounding in
/// the summed variable; the pointwise inequality is otherwise exact.
inline bool check_subadditivity(std::span<const double> samples_x, std::span<const double> samples_y,
                                double tau_x, double tau_y, MomentSide side = MomentSide::lower,
                                int order = 1) {
  require(order == 1, "check_subadditivity: only defined for order 1");
  require(samples_x.size() == samples_y.size(), "check_subadditivity: samples must be paired");
  require(!samples_x.empty(), "check_subadditivity: empty sample set");
  std::vector<double> sum(samples_x.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = samples_x[i] + samples_y[i];
  const double lhs = empirical_partial_moment(sum, {1, side, tau_x + tau_y});
  const double rhs = empirical_partial_moment(samples_x, {1, side, tau_x}) +
                     empirical_partial_moment(samples_y, {1, side, tau_y});
  return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
}

/// Var[(c - X)_+] with the population convention.
inline double shortfall_variance(std::span<const double> samples, double c) {
  std::vector<double> shortfall(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) shortfall[i] = positive_part(c - samples[i]);
  return population_variance(shortfall);
}

/// True iff Var[(c - X)_+] <= Var[X] on the empirical measure (up to rounding).
inline bool check_variance_bound(std::span<const double> samples, double c) {
  require(!samples.empty(), "check_variance_bound: empty sample set");
  const double lhs = shortfall_variance(samples, c);
  const double rhs = population_variance(samples);
  return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs));
}

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MonteCarloEstimate mean_and_std_error(std::span<const double> samples) {
  MonteCarloEstimate est;
  est.n = samples.size();
  est.value = sample_mean(samples);
  if (samples.size() > 1) {
    double acc = 0.0;
    for (double x : samples) acc += (x - est.value) * (x - est.value);
    est.std_error = std::sqrt(acc / static_cast<double>(samples.size() - 1) /
                              static_cast<double>(samples.size()));
  }
  return est;
}

/// Monte-Carlo estimate of the first LPM of the return from (state, action).
///
/// The return-level target is unrolled alongside the return: each rollout
/// accumulates sum_k gamma^k tau_R(s_k, a_k), and the sample is (target - G)_+.
/// `mean` is consulted (never updated) for centralised targets.
template <ResettableEnvironment Env, Policy Pol>
  requires std::same_as<typename Env::action_type, typename Pol::action_type>
MonteCarloEstimate mc_lpm_of_return(Env& env, const Pol& policy, const Vector& start_state,
                                    const typename Env::action_type& start_action,
                                    const TargetFunction<typename Env::action_type>& target,
                                    std::size_t n_rollouts, double discount, Rng& rng,
                                    const RewardMeanEstimator* mean = nullptr,
                                    std::size_t max_steps = 100000) {
  require(n_rollouts >= 1, "mc_lpm_of_return: n_rollouts must be >= 1");
  require(discount >= 0.0 && discount <= 1.0, "mc_lpm_of_return: discount must be in [0, 1]");
  std::vector<double> samples;
  samples.reserve(n_rollouts);
  for (std::size_t i = 0; i < n_rollouts; ++i) {
    Vector s = env.reset_to(start_state);
    auto a = start_action;
    double ret = 0.0;
    double tau = 0.0;
    double weight = 1.0;
    bool terminated = false;
    for (std::size_t k = 0; k < max_steps; ++k) {
      const Vector x = target.kind == TargetKind::centralised ? policy.state_action_features(s, a) : Vector();
      tau += weight * target.per_step(s, a, mean, x);
      StepResult step = env.step(a, rng);
      ret += weight * step.reward;
      weight *= discount;
      if (step.terminal) {
        terminated = true;
        break;
      }
      s = std::move(step.next_state);
      a = policy.sample(s, rng);
    }
    if (!terminated && discount >= 1.0) {
      throw std::runtime_error("mc_lpm_of_return: rollout did not terminate within " +
                               std::to_string(max_steps) + " steps with discount 1");
    }
    samples.push_back(positive_part(tau - ret));
  }
  return mean_and_std_error(samples);
}

}  // namespace lpmrl
