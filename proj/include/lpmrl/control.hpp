#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"
#include "lpmrl/moments.hpp"
#include "lpmrl/prediction.hpp"

namespace lpmrl {

enum class LagrangeMode { adaptive, constant };

struct LagrangianState {
  double lambda = 0.0;
  double nu = 0.0;
  double step_size = 0.001;
  LagrangeMode mode = LagrangeMode::adaptive;
};

/// Projected descent on lambda: lambda <- max(0, lambda + step * (J_C - nu)). No-op in constant mode.
inline LagrangianState lagrange_update(LagrangianState lag, double constraint_estimate) {
  if (lag.mode == LagrangeMode::constant) return lag;
  lag.lambda = std::max(0.0, lag.lambda + lag.step_size * (constraint_estimate - lag.nu));
  return lag;
}

/// theta + eta * d / ||d||_2 with d = w_q - lambda * w_rho; skipped when ||d|| < 1e-12.
inline Vector natural_policy_update(const Vector& theta, const Vector& w_q, const Vector& w_rho,
                                    double lambda, double eta) {
  require(theta.size() == w_q.size() && w_q.size() == w_rho.size(),
          "natural_policy_update: dimension mismatch");
  if (!theta.allFinite() || !w_q.allFinite() || !w_rho.allFinite() || !std::isfinite(lambda) ||
      !std::isfinite(eta)) {
    throw DivergenceError("natural_policy_update: non-finite input");
  }
  const Vector direction = w_q - lambda * w_rho;
  const double norm = direction.norm();
  if (norm < 1e-12) return theta;
  return theta + (eta / norm) * direction;
}

enum class PeriodUnit { steps, episodes };

struct TrainingSchedule {
  std::size_t policy_period = 100;
  PeriodUnit period_unit = PeriodUnit::episodes;
  double eta = 0.001;
  std::size_t pretrain_episodes = 0;
  std::size_t total_episodes = 1000;
  // 0 disables evaluation.
  std::size_t eval_every = 0;
  std::size_t eval_rollouts = 100;
  std::size_t max_episode_steps = 100000;
  // Episode starts averaged into the constraint estimate fed to the multiplier.
  std::size_t constraint_window = 100;
  bool record_theta_trace = false;

  bool operator==(const TrainingSchedule&) const = default;

  void validate() const {
    require(policy_period >= 1 && total_episodes >= 1 && max_episode_steps >= 1 && constraint_window >= 1,
            "TrainingSchedule: counts must be >= 1");
    require(eta > 0.0, "TrainingSchedule: eta must be positive");
  }
};

template <class Action>
struct NrcpoConfig {
  double critic_step_size = 0.005;
  // 0 means "same as critic_step_size".
  double rho_step_size = 0.0;
  bool bounded_critic_step = false;
  double trace_decay = 0.0;
  double discount = 1.0;
  TargetFunction<Action> target = TargetFunction<Action>::fixed(0.0, 1.0);
  int lpm_order = 1;
  std::optional<RewardMeanEstimator> mean_estimator;
  LagrangianState lagrangian;
  TrainingSchedule schedule;
};

struct EvalResult {
  double mean_return = 0.0;
  double mean_constraint = 0.0;
  double lpm_return = 0.0;  // centralised first LPM of the returns
  double min_return = 0.0;
  std::vector<double> returns;
};

struct EvalRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;
  double mean_return = 0.0;
  double constraint = 0.0;
  double lpm_return = 0.0;
  double min_return = 0.0;
  double lambda = 0.0;
  double constraint_consumed = 0.0;
  std::size_t consumed_at_episode = 0;
  double wall_clock = 0.0;
};

struct TrainingLog {
  std::vector<double> episode_returns;
  std::vector<double> lambda_trace;
  std::vector<std::size_t> policy_update_steps;
  std::vector<Vector> theta_trace;
  std::vector<EvalRecord> evals;
  Vector final_theta;
  double final_lambda = 0.0;
  std::size_t total_steps = 0;
  bool diverged = false;
  std::string diagnostic;
};

/// NRCPO actor-critic: a reward critic and an LPM-proxy critic sharing the policy
/// score as features, a Lagrange multiplier, and L2-normalised natural-gradient steps.
template <Environment Env, Policy Pol>
  requires std::same_as<typename Env::action_type, typename Pol::action_type>
class NrcpoAgent {
 public:
  using Action = typename Pol::action_type;
  using EpisodeCallback = std::function<void(std::size_t episode, const Pol& policy)>;

  NrcpoAgent(Env env, Pol policy, NrcpoConfig<Action> config)
      : env_(std::move(env)), policy_(std::move(policy)), config_(std::move(config)), lag_(config_.lagrangian) {
    config_.schedule.validate();
    require(config_.lpm_order >= 1, "NrcpoAgent: lpm order must be >= 1");
    require(config_.lagrangian.lambda >= 0.0, "NrcpoAgent: lambda must be non-negative");
    Rng probe(0);
    const Vector s = env_.reset(probe);
    const Eigen::Index baseline_dim = policy_.baseline_features(s).size();
    const Eigen::Index score_dim = policy_.params().size();
    q_ = CompatibleLinearCritic(score_dim, baseline_dim, config_.critic_step_size, config_.trace_decay,
                                config_.discount);
    const double rho_rate = config_.rho_step_size > 0.0 ? config_.rho_step_size : config_.critic_step_size;
    rho_ = CompatibleLinearCritic(score_dim, baseline_dim, rho_rate, config_.trace_decay, config_.discount);
    q_.bounded_step = config_.bounded_critic_step;
    rho_.bounded_step = config_.bounded_critic_step;
    if (config_.target.kind == TargetKind::centralised) {
      require(config_.mean_estimator.has_value(), "NrcpoAgent: centralised target needs a mean estimator");
      mean_ = *config_.mean_estimator;
    }
  }

  /// Critic and multiplier updates only, against the current (frozen) policy.
  void pretrain(std::size_t episodes, Rng& rng) {
    for (std::size_t i = 0; i < episodes && !log_.diverged; ++i) run_episode(rng, false);
  }

  /// Pretraining followed by the full training schedule. `eval_rng` is consumed only by evaluation.
  TrainingLog train(Rng& rng, Rng& eval_rng, const EpisodeCallback& on_episode = {}) {
    const auto& sched = config_.schedule;
    const auto start = std::chrono::steady_clock::now();
    pretrain(sched.pretrain_episodes, rng);
    for (std::size_t ep = 1; ep <= sched.total_episodes && !log_.diverged; ++ep) {
      log_.episode_returns.push_back(run_episode(rng, true));
      if (on_episode) on_episode(ep, policy_);
      if (sched.eval_every > 0 && ep % sched.eval_every == 0 && !log_.diverged) {
        const EvalResult ev = evaluate(sched.eval_rollouts, eval_rng);
        EvalRecord rec;
        rec.episode = ep;
        rec.steps = steps_;
        rec.mean_return = ev.mean_return;
        rec.constraint = ev.mean_constraint;
        rec.lpm_return = ev.lpm_return;
        rec.min_return = ev.min_return;
        rec.lambda = lag_.lambda;
        rec.constraint_consumed = last_consumed_;
        rec.consumed_at_episode = consumed_at_episode_;
        rec.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log_.evals.push_back(rec);
      }
    }
    log_.final_theta = policy_.params();
    log_.final_lambda = lag_.lambda;
    log_.total_steps = steps_;
    return log_;
  }

  /// On-policy evaluation rollouts; critics and estimators are not touched.
  EvalResult evaluate(std::size_t rollouts, Rng& rng) const {
    require(rollouts >= 1, "evaluate: need at least one rollout");
    Env env = env_;
    EvalResult out;
    out.returns.reserve(rollouts);
    double constraint_sum = 0.0;
    const RewardMeanEstimator* mean = config_.target.kind == TargetKind::centralised ? &mean_ : nullptr;
    for (std::size_t i = 0; i < rollouts; ++i) {
      Vector s = env.reset(rng);
      double ret = 0.0;
      double cost = 0.0;
      double weight = 1.0;
      for (std::size_t t = 0; t < config_.schedule.max_episode_steps; ++t) {
        const Action a = policy_.sample(s, rng);
        const Vector x = mean ? policy_.state_action_features(s, a) : Vector();
        const double tau_r = config_.target.per_step(s, a, mean, x);
        StepResult st = env.step(a, rng);
        ret += weight * st.reward;
        cost += weight * transform_reward(st.reward, tau_r, config_.lpm_order);
        weight *= config_.discount;
        if (st.terminal) break;
        s = std::move(st.next_state);
      }
      out.returns.push_back(ret);
      constraint_sum += cost;
    }
    out.mean_return = sample_mean(out.returns);
    out.mean_constraint = constraint_sum / static_cast<double>(rollouts);
    out.lpm_return = lower_partial_moment(out.returns, out.mean_return);
    out.min_return = *std::min_element(out.returns.begin(), out.returns.end());
    return out;
  }

  /// Mean of the LPM critic's estimates at recent episode starts.
  double constraint_estimate() const {
    if (start_estimates_.empty()) return 0.0;
    double acc = 0.0;
    for (double x : start_estimates_) acc += x;
    return acc / static_cast<double>(start_estimates_.size());
  }

  const Pol& policy() const { return policy_; }
  Pol& policy() { return policy_; }
  const CompatibleLinearCritic& q_critic() const { return q_; }
  const CompatibleLinearCritic& rho_critic() const { return rho_; }
  const RewardMeanEstimator& mean_estimator() const { return mean_; }
  const LagrangianState& lagrangian() const { return lag_; }
  const TrainingLog& log() const { return log_; }
  std::size_t steps() const { return steps_; }
  std::size_t episodes() const { return episodes_; }
  const NrcpoConfig<Action>& config() const { return config_; }

 private:
  double run_episode(Rng& rng, bool learn_policy) {
    const auto& sched = config_.schedule;
    const bool centralised = config_.target.kind == TargetKind::centralised;
    RewardMeanEstimator* mean = centralised ? &mean_ : nullptr;

    Vector s = env_.reset(rng);
    q_.reset_traces();
    rho_.reset_traces();
    Action a = policy_.sample(s, rng);
    Vector psi = policy_.score(s, a);
    Vector phi = policy_.baseline_features(s);
    start_estimates_.push_back(critic_estimate(rho_, psi, phi));
    if (start_estimates_.size() > sched.constraint_window) start_estimates_.pop_front();

    double ret = 0.0;
    double weight = 1.0;
    Vector psi_next;
    Vector phi_next;
    for (std::size_t t = 0; t < sched.max_episode_steps; ++t) {
      StepResult st = env_.step(a, rng);
      ret += weight * st.reward;
      weight *= config_.discount;

      Transition<Action> tr;
      tr.state = s;
      tr.action = a;
      tr.reward = st.reward;
      tr.terminal = st.terminal;
      Action a_next{};
      if (!st.terminal) {
        a_next = policy_.sample(st.next_state, rng);
        tr.next_action = a_next;
        psi_next = policy_.score(st.next_state, a_next);
        phi_next = policy_.baseline_features(st.next_state);
      }
      const Vector x = centralised ? policy_.state_action_features(s, a) : Vector();
      sarsa_update(q_, tr, psi, psi_next, phi, phi_next);
      lpm_critic_update(rho_, tr, config_.target, mean, x, psi, psi_next, phi, phi_next, config_.lpm_order);
      ++steps_;

      bool theta_changed = false;
      if (sched.period_unit == PeriodUnit::steps && steps_ % sched.policy_period == 0) {
        theta_changed = periodic_update(learn_policy);
        if (log_.diverged) return ret;
      }
      if (st.terminal) break;
      s = std::move(st.next_state);
      a = std::move(a_next);
      psi = theta_changed ? policy_.score(s, a) : psi_next;
      phi = phi_next;
    }
    ++episodes_;
    if (sched.period_unit == PeriodUnit::episodes && episodes_ % sched.policy_period == 0) {
      periodic_update(learn_policy);
    }
    if (!q_.w.allFinite() || !rho_.w.allFinite() || !q_.v.allFinite() || !rho_.v.allFinite()) {
      flag_divergence("critic weights became non-finite");
    }
    return ret;
  }

  bool periodic_update(bool learn_policy) {
    bool changed = false;
    if (learn_policy) {
      try {
        const Vector theta = natural_policy_update(policy_.params(), q_.w, rho_.w, lag_.lambda,
                                                   config_.schedule.eta);
        changed = theta != policy_.params();
        policy_.set_params(theta);
      } catch (const DivergenceError& e) {
        flag_divergence(e.what());
        return false;
      }
      log_.policy_update_steps.push_back(steps_);
      if (config_.schedule.record_theta_trace) log_.theta_trace.push_back(policy_.params());
    }
    last_consumed_ = constraint_estimate();
    consumed_at_episode_ = episodes_;
    lag_ = lagrange_update(lag_, last_consumed_);
    log_.lambda_trace.push_back(lag_.lambda);
    return changed;
  }

  void flag_divergence(const std::string& why) {
    log_.diverged = true;
    log_.diagnostic = why + " (episode " + std::to_string(episodes_) + ", step " + std::to_string(steps_) + ")";
  }

  Env env_;
  Pol policy_;
  NrcpoConfig<Action> config_;
  CompatibleLinearCritic q_;
  CompatibleLinearCritic rho_;
  RewardMeanEstimator mean_;
  LagrangianState lag_;
  std::deque<double> start_estimates_;
  double last_consumed_ = 0.0;
  std::size_t consumed_at_episode_ = 0;
  std::size_t steps_ = 0;
  std::size_t episodes_ = 0;
  TrainingLog log_;
};

template <Environment Env, Policy Pol>
void pretrain(NrcpoAgent<Env, Pol>& agent, std::size_t episodes, Rng& rng) {
  agent.pretrain(episodes, rng);
}

template <Environment Env, Policy Pol>
TrainingLog train_nrcpo(Env env, Pol policy, NrcpoConfig<typename Pol::action_type> config, Rng& rng,
                        Rng& eval_rng) {
  NrcpoAgent<Env, Pol> agent(std::move(env), std::move(policy), std::move(config));
  return agent.train(rng, eval_rng);
}

struct NacTrace {
  std::vector<double> episode_returns;
  std::vector<Vector> theta_trace;
  Vector final_theta;
};

/// Plain natural actor-critic: one compatible SARSA critic and theta += eta * w / ||w||.
template <Environment Env, Policy Pol>
  requires std::same_as<typename Env::action_type, typename Pol::action_type>
NacTrace train_nac(Env env, Pol policy, double critic_step_size, double trace_decay, double discount,
                   const TrainingSchedule& schedule, Rng& rng) {
  using Action = typename Pol::action_type;
  schedule.validate();
  Rng probe(0);
  const Eigen::Index baseline_dim = policy.baseline_features(env.reset(probe)).size();
  CompatibleLinearCritic critic(policy.params().size(), baseline_dim, critic_step_size, trace_decay, discount);
  NacTrace trace;
  std::size_t steps = 0;
  std::size_t episodes = 0;

  auto improve = [&](bool learn) -> bool {
    if (!learn) return false;
    const double norm = critic.w.norm();
    bool changed = false;
    if (norm >= 1e-12) {
      Vector theta = policy.params() + (schedule.eta / norm) * critic.w;
      changed = theta != policy.params();
      policy.set_params(theta);
    }
    if (schedule.record_theta_trace) trace.theta_trace.push_back(policy.params());
    return changed;
  };

  auto episode = [&](bool learn) {
    Vector s = env.reset(rng);
    critic.reset_traces();
    Action a = policy.sample(s, rng);
    Vector psi = policy.score(s, a);
    Vector phi = policy.baseline_features(s);
    double ret = 0.0;
    double weight = 1.0;
    for (std::size_t t = 0; t < schedule.max_episode_steps; ++t) {
      StepResult st = env.step(a, rng);
      ret += weight * st.reward;
      weight *= discount;
      Transition<Action> tr;
      tr.state = s;
      tr.action = a;
      tr.reward = st.reward;
      tr.terminal = st.terminal;
      Action a_next{};
      Vector psi_next;
      Vector phi_next;
      if (!st.terminal) {
        a_next = policy.sample(st.next_state, rng);
        tr.next_action = a_next;
        psi_next = policy.score(st.next_state, a_next);
        phi_next = policy.baseline_features(st.next_state);
      }
      sarsa_update(critic, tr, psi, psi_next, phi, phi_next);
      ++steps;
      bool changed = false;
      if (schedule.period_unit == PeriodUnit::steps && steps % schedule.policy_period == 0) changed = improve(learn);
      if (st.terminal) break;
      s = std::move(st.next_state);
      a = std::move(a_next);
      psi = changed ? policy.score(s, a) : psi_next;
      phi = phi_next;
    }
    ++episodes;
    if (schedule.period_unit == PeriodUnit::episodes && episodes % schedule.policy_period == 0) improve(learn);
    return ret;
  };

  for (std::size_t i = 0; i < schedule.pretrain_episodes; ++i) episode(false);
  for (std::size_t i = 0; i < schedule.total_episodes; ++i) trace.episode_returns.push_back(episode(true));
  trace.final_theta = policy.params();
  return trace;
}

}  // namespace lpmrl
