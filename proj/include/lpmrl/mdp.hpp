#pragma once

#include <concepts>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "lpmrl/core.hpp"

namespace lpmrl {

/// Outcome of a single environment step.
struct StepResult {
  Vector next_state;
  double reward = 0.0;
  bool terminal = false;
};

/// One on-policy step. `next_action` is present exactly when the step is not terminal.
template <class Action>
struct Transition {
  Vector state;
  Action action{};
  double reward = 0.0;
  Vector next_state;
  std::optional<Action> next_action;
  bool terminal = false;
};

template <class Action>
struct Trajectory {
  std::vector<Transition<Action>> transitions;
  double discount = 1.0;
  // Set when the rollout hit its step cap before the environment terminated.
  bool truncated = false;

  std::size_t size() const { return transitions.size(); }
};

/// reset() draws from the initial distribution; step() after a terminal step throws std::logic_error.
template <class E>
concept Environment = requires(E& env, Rng& rng, const typename E::action_type& action) {
  typename E::action_type;
  { env.reset(rng) } -> std::convertible_to<Vector>;
  { env.step(action, rng) } -> std::convertible_to<StepResult>;
};

/// Environments that can be started from an arbitrary observation (exploring starts).
template <class E>
concept ResettableEnvironment = Environment<E> && requires(E& env, const Vector& s) {
  { env.reset_to(s) } -> std::convertible_to<Vector>;
};

/// Differentiable stochastic policy with compatible features.
template <class P>
concept Policy = requires(const P& p, P& mp, const Vector& s, const typename P::action_type& a,
                          Rng& rng, const Vector& theta) {
  typename P::action_type;
  { p.sample(s, rng) } -> std::convertible_to<typename P::action_type>;
  { p.log_prob(s, a) } -> std::convertible_to<double>;
  { p.score(s, a) } -> std::convertible_to<Vector>;
  { p.baseline_features(s) } -> std::convertible_to<Vector>;
  { p.state_action_features(s, a) } -> std::convertible_to<Vector>;
  { p.params() } -> std::convertible_to<const Vector&>;
  mp.set_params(theta);
};

/// Sum of discounted rewards from `from_index` to the end of the trajectory.
template <class Action>
double discounted_return(const Trajectory<Action>& traj, std::size_t from_index) {
  require(from_index < traj.size(), "discounted_return: index out of range");
  double g = 0.0;
  for (std::size_t k = traj.size(); k-- > from_index;) {
    g = traj.transitions[k].reward + traj.discount * g;
  }
  return g;
}

/// Samples an on-policy trajectory, truncating after `max_steps` transitions.
template <Environment Env, Policy Pol>
  requires std::same_as<typename Env::action_type, typename Pol::action_type>
Trajectory<typename Env::action_type> rollout(Env& env, const Pol& policy, Rng& rng,
                                              std::size_t max_steps, double discount = 1.0) {
  require(max_steps >= 1, "rollout: max_steps must be >= 1");
  Trajectory<typename Env::action_type> traj;
  traj.discount = discount;
  Vector s = env.reset(rng);
  auto a = policy.sample(s, rng);
  for (std::size_t t = 0; t < max_steps; ++t) {
    StepResult step = env.step(a, rng);
    Transition<typename Env::action_type> tr;
    tr.state = std::move(s);
    tr.action = a;
    tr.reward = step.reward;
    tr.next_state = step.next_state;
    tr.terminal = step.terminal;
    if (!step.terminal) {
      tr.next_action = policy.sample(step.next_state, rng);
      a = *tr.next_action;
    }
    s = std::move(step.next_state);
    traj.transitions.push_back(std::move(tr));
    if (traj.transitions.back().terminal) return traj;
  }
  traj.truncated = true;
  return traj;
}

inline void append_components(std::vector<double>& out, int action) {
  out.push_back(static_cast<double>(action));
}

inline void append_components(std::vector<double>& out, const Vector& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

/// Writes transitions as CSV rows: trial,step,s0..,a0..,reward,terminal.
template <class Action>
void write_trajectory_csv(std::ostream& os, const Trajectory<Action>& traj, int trial,
                          bool with_header) {
  if (traj.transitions.empty()) return;
  const auto& first = traj.transitions.front();
  std::vector<double> action_parts;
  append_components(action_parts, first.action);
  if (with_header) {
    os << "trial,step";
    for (Eigen::Index i = 0; i < first.state.size(); ++i) os << ",s" << i;
    for (std::size_t i = 0; i < action_parts.size(); ++i) os << ",a" << i;
    os << ",reward,terminal\n";
  }
  std::size_t step = 0;
  for (const auto& tr : traj.transitions) {
    os << trial << ',' << step++;
    for (Eigen::Index i = 0; i < tr.state.size(); ++i) os << ',' << tr.state[i];
    std::vector<double> parts;
    append_components(parts, tr.action);
    for (double p : parts) os << ',' << p;
    os << ',' << tr.reward << ',' << (tr.terminal ? 1 : 0) << '\n';
  }
}

}  // namespace lpmrl
