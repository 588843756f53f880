#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "lpmrl/control.hpp"
#include "lpmrl/envs/bandit.hpp"
#include "lpmrl/envs/consumption.hpp"
#include "lpmrl/envs/portfolio.hpp"
#include "lpmrl/envs/toy_mdp.hpp"
#include "lpmrl/harness/config.hpp"
#include "lpmrl/harness/csv.hpp"
#include "lpmrl/harness/pool.hpp"
#include "lpmrl/harness/stats.hpp"
#include "lpmrl/moments.hpp"
#include "lpmrl/policies/gaussian_beta.hpp"
#include "lpmrl/policies/softmax.hpp"
#include "lpmrl/prediction.hpp"

namespace lpmrl::harness {

/// Random stream identifiers; every generator is make_rng(base_seed, trial, stream).
enum Stream : std::uint64_t { kTrainStream = 0, kEvalStream = 1, kFinalStream = 2, kOracleStream = 3 };

inline std::string nu_label(double nu) { return detail::format_double(nu); }

// ---------------------------------------------------------------------------
// Landscape

struct LandscapePoint {
  double theta1 = 0.0, theta2 = 0.0;
  double mean_exact = 0.0, var_exact = 0.0, lpm0_exact = 0.0;
  double mean_mc = 0.0, var_mc = 0.0, lpm0_mc = 0.0;
  double mean_se = 0.0, var_se = 0.0, lpm0_se = 0.0;
};

struct LandscapeResult {
  int resolution = 0;
  std::vector<LandscapePoint> points;  // theta1-major

  const LandscapePoint& at(int i, int j) const { return points[static_cast<std::size_t>(i * resolution + j)]; }
};

inline LandscapeResult run_landscape(const RunConfig& c) {
  const int n = c.landscape.resolution;
  LandscapeResult out;
  out.resolution = n;
  const auto count = static_cast<std::size_t>(n * n);
  out.points = run_indexed<LandscapePoint>(count, c.threads, [&](std::size_t k) {
    LandscapePoint p;
    p.theta1 = static_cast<double>(k / n) / (n - 1);
    p.theta2 = static_cast<double>(k % n) / (n - 1);
    const auto exact = envs::toy_mdp_exact_moments(p.theta1, p.theta2);
    p.mean_exact = exact.mean;
    p.var_exact = exact.variance;
    p.lpm0_exact = exact.lpm_at_zero;

    envs::ToyMdp env;
    envs::ToyPolicy policy(p.theta1, p.theta2);
    Rng rng = make_rng(c.base_seed, k, kOracleStream);
    std::vector<double> returns;
    returns.reserve(c.landscape.rollouts);
    for (std::size_t r = 0; r < c.landscape.rollouts; ++r) {
      returns.push_back(discounted_return(rollout(env, policy, rng, 10, 1.0), 0));
    }
    const double n_r = static_cast<double>(returns.size());
    p.mean_mc = sample_mean(returns);
    p.var_mc = population_variance(returns);
    std::vector<double> shortfall(returns.size());
    std::vector<double> centred_sq(returns.size());
    for (std::size_t r = 0; r < returns.size(); ++r) {
      shortfall[r] = positive_part(-returns[r]);
      centred_sq[r] = (returns[r] - p.mean_mc) * (returns[r] - p.mean_mc);
    }
    const auto lpm = mean_and_std_error(shortfall);
    p.lpm0_mc = lpm.value;
    p.lpm0_se = lpm.std_error;
    p.mean_se = std::sqrt(p.var_mc / n_r);
    p.var_se = mean_and_std_error(centred_sq).std_error;
    return p;
  });
  return out;
}

inline void write_landscape(const LandscapeResult& r, const std::filesystem::path& path) {
  CsvWriter csv(path, {"theta1", "theta2", "mean_exact", "var_exact", "lpm0_exact", "mean_mc", "var_mc", "lpm0_mc"});
  for (const auto& p : r.points) {
    csv.row(p.theta1, p.theta2, p.mean_exact, p.var_exact, p.lpm0_exact, p.mean_mc, p.var_mc, p.lpm0_mc);
  }
}

/// Grid points strictly greater than every neighbour (8-connected) of `value`.
template <class F>
std::vector<std::pair<int, int>> strict_local_maxima(const LandscapeResult& r, F value) {
  std::vector<std::pair<int, int>> out;
  const int n = r.resolution;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = value(r.at(i, j));
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= n || b >= n) continue;
          if (value(r.at(a, b)) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) out.emplace_back(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bandit

struct BanditObjective {
  std::string name;
  double lambda = 0.0;
  int order = 1;
  int target_arm = 0;
};

inline std::vector<BanditObjective> bandit_objectives(const RunConfig& c) {
  return {{"mean", 0.0, 1, static_cast<int>(envs::Arm::B)},
          {"mean_minus_lpm1", c.bandit_suite.lambda_first_order, 1, static_cast<int>(envs::Arm::C)},
          {"mean_minus_lpm2", c.bandit_suite.lambda_second_order, 2, static_cast<int>(envs::Arm::C)}};
}

struct BanditCurve {
  BanditObjective objective;
  std::vector<std::size_t> samples;
  std::vector<std::array<double, 3>> mean_probs;  // averaged over trials
  std::vector<std::array<double, 3>> final_probs;  // one per trial
  // First recorded sample count with mean P(target) > 0.5; 0 if never.
  std::size_t crossing = 0;
  bool diverged = false;
};

inline NrcpoConfig<int> bandit_nrcpo_config(const RunConfig& c, const BanditObjective& obj) {
  NrcpoConfig<int> cfg;
  cfg.critic_step_size = c.critic.step_size;
  cfg.rho_step_size = c.critic.rho_step_size;
  cfg.bounded_critic_step = c.critic.bounded_step;
  cfg.trace_decay = c.critic.trace_decay;
  cfg.discount = c.critic.discount;
  cfg.lpm_order = obj.order;
  if (c.target.kind == TargetKind::fixed) {
    cfg.target = TargetFunction<int>::fixed(c.target.tau, c.critic.discount);
  } else {
    cfg.target = TargetFunction<int>::centralised();
    cfg.mean_estimator = RewardMeanEstimator::tabular(envs::Bandit::kArmCount, c.target.mean_step);
  }
  cfg.lagrangian = {obj.lambda, 0.0, 0.0, LagrangeMode::constant};
  cfg.schedule = c.schedule;
  cfg.schedule.eval_every = 0;
  return cfg;
}

inline std::vector<BanditCurve> run_bandit_suite(const RunConfig& c) {
  const auto objectives = bandit_objectives(c);
  const std::size_t every = c.bandit_suite.record_every;
  const std::size_t points = c.schedule.total_episodes / every;
  struct TrialOut {
    std::vector<std::array<double, 3>> probs;
    std::array<double, 3> final{};
    bool diverged = false;
  };
  std::vector<BanditCurve> curves;
  for (std::size_t o = 0; o < objectives.size(); ++o) {
    const auto& obj = objectives[o];
    const auto cfg = bandit_nrcpo_config(c, obj);
    auto trials = run_indexed<TrialOut>(c.trials, c.threads, [&](std::size_t t) {
      TrialOut out;
      out.probs.reserve(points);
      NrcpoAgent agent(envs::Bandit(c.bandit), policies::GibbsStateless(envs::Bandit::kArmCount), cfg);
      Rng rng = make_rng(c.base_seed, t, 10 * o + kTrainStream);
      Rng eval_rng = make_rng(c.base_seed, t, 10 * o + kEvalStream);
      auto log = agent.train(rng, eval_rng, [&](std::size_t ep, const policies::GibbsStateless& pi) {
        if (ep % every == 0) {
          const Vector p = pi.probabilities();
          out.probs.push_back({p[0], p[1], p[2]});
        }
      });
      const Vector p = agent.policy().probabilities();
      out.final = {p[0], p[1], p[2]};
      out.diverged = log.diverged;
      return out;
    });
    BanditCurve curve;
    curve.objective = obj;
    curve.mean_probs.assign(points, {0.0, 0.0, 0.0});
    for (std::size_t k = 0; k < points; ++k) curve.samples.push_back((k + 1) * every);
    for (const auto& tr : trials) {
      curve.final_probs.push_back(tr.final);
      curve.diverged = curve.diverged || tr.diverged;
      for (std::size_t k = 0; k < points; ++k) {
        // A diverged trial stops early; its last probabilities carry forward.
        const auto& p = k < tr.probs.size() ? tr.probs[k] : tr.final;
        for (int a = 0; a < 3; ++a) curve.mean_probs[k][a] += p[a] / static_cast<double>(c.trials);
      }
    }
    for (std::size_t k = 0; k < points; ++k) {
      if (curve.mean_probs[k][obj.target_arm] > 0.5) {
        curve.crossing = curve.samples[k];
        break;
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

inline void write_bandit(const std::vector<BanditCurve>& curves, const std::filesystem::path& path) {
  CsvWriter csv(path, {"objective", "samples", "p_a", "p_b", "p_c"});
  for (const auto& cv : curves) {
    for (std::size_t k = 0; k < cv.samples.size(); ++k) {
      csv.row(cv.objective.name, cv.samples[k], cv.mean_probs[k][0], cv.mean_probs[k][1], cv.mean_probs[k][2]);
    }
  }
}

// ---------------------------------------------------------------------------
// Shared pieces for the constrained sweeps

struct SweepRun {
  double nu = 0.0;
  std::size_t trial = 0;
  TrainingLog log;
  EvalResult final_eval;
};

inline void write_training_log(const std::vector<SweepRun>& runs, const std::filesystem::path& path,
                               bool wall_clock) {
  std::vector<std::string> header{"nu", "trial", "episode", "steps", "mean_return", "constraint", "lambda"};
  if (wall_clock) header.push_back("wall_clock");
  CsvWriter csv(path, header);
  for (const auto& r : runs) {
    for (const auto& e : r.log.evals) {
      if (wall_clock) {
        csv.row(nu_label(r.nu), r.trial, e.episode, e.steps, e.mean_return, e.constraint, e.lambda, e.wall_clock);
      } else {
        csv.row(nu_label(r.nu), r.trial, e.episode, e.steps, e.mean_return, e.constraint, e.lambda);
      }
    }
  }
}

template <class Action>
void fill_common(NrcpoConfig<Action>& cfg, const RunConfig& c, double nu) {
  cfg.critic_step_size = c.critic.step_size;
  cfg.rho_step_size = c.critic.rho_step_size;
  cfg.bounded_critic_step = c.critic.bounded_step;
  cfg.trace_decay = c.critic.trace_decay;
  cfg.discount = c.critic.discount;
  cfg.lpm_order = c.target.order;
  LagrangianSpec lag = c.lagrangian;
  lag.nu = nu;
  cfg.lagrangian = lag.state();
  cfg.schedule = c.schedule;
}

// ---------------------------------------------------------------------------
// Portfolio frontier

struct FrontierRow {
  double nu = 0.0;
  std::size_t trial = 0;
  double mean_return = 0.0;
  double lpm_return = 0.0;
  double min_return = 0.0;
  double constraint = 0.0;
  double lambda = 0.0;
  bool feasible = true;
  bool diverged = false;
};

struct FrontierResult {
  std::vector<FrontierRow> rows;
  std::vector<SweepRun> runs;
  double spearman_mean = 0.0;
  double spearman_lpm = 0.0;
};

inline NrcpoConfig<int> portfolio_nrcpo_config(const RunConfig& c, double nu, Eigen::Index feature_dim) {
  NrcpoConfig<int> cfg;
  fill_common(cfg, c, nu);
  if (c.target.kind == TargetKind::fixed) {
    cfg.target = TargetFunction<int>::fixed(c.target.tau, c.critic.discount);
  } else {
    cfg.target = TargetFunction<int>::centralised();
    cfg.mean_estimator = RewardMeanEstimator::linear(feature_dim, c.target.mean_step);
  }
  return cfg;
}

inline FrontierResult run_frontier(const RunConfig& c) {
  require(!c.nu_values.empty(), "run_frontier: nu_values must not be empty");
  const std::size_t n = c.nu_values.size() * c.trials;
  FrontierResult out;
  out.runs = run_indexed<SweepRun>(n, c.threads, [&](std::size_t k) {
    SweepRun run;
    run.nu = c.nu_values[k / c.trials];
    run.trial = k % c.trials;
    envs::Portfolio env(c.portfolio);
    policies::LinearPerActionBasis basis{env.state_dim(), env.action_count()};
    NrcpoAgent agent(env, policies::GibbsLinear(basis), portfolio_nrcpo_config(c, run.nu, basis.dimension()));
    Rng rng = make_rng(c.base_seed, run.trial, kTrainStream);
    Rng eval_rng = make_rng(c.base_seed, run.trial, kEvalStream);
    run.log = agent.train(rng, eval_rng);
    Rng final_rng = make_rng(c.base_seed, run.trial, kFinalStream);
    run.final_eval = agent.evaluate(c.final_rollouts, final_rng);
    run.final_eval.returns.clear();
    return run;
  });
  std::vector<double> nus, means, lpms;
  for (const auto& r : out.runs) {
    FrontierRow row;
    row.nu = r.nu;
    row.trial = r.trial;
    row.mean_return = r.final_eval.mean_return;
    row.lpm_return = r.final_eval.lpm_return;
    row.min_return = r.final_eval.min_return;
    row.constraint = r.final_eval.mean_constraint;
    row.lambda = r.log.final_lambda;
    row.feasible = row.constraint <= r.nu;
    row.diverged = r.log.diverged;
    out.rows.push_back(row);
    nus.push_back(row.nu);
    means.push_back(row.mean_return);
    lpms.push_back(row.lpm_return);
  }
  if (out.rows.size() >= 2) {
    out.spearman_mean = spearman(nus, means);
    out.spearman_lpm = spearman(nus, lpms);
  }
  return out;
}

inline void write_frontier(const FrontierResult& r, const std::filesystem::path& dir, bool wall_clock) {
  CsvWriter csv(dir / "portfolio_frontier.csv", {"nu", "trial", "mean_return", "lpm_return", "min_return",
                                                 "constraint", "lambda", "feasible", "diverged"});
  for (const auto& row : r.rows) {
    csv.row(nu_label(row.nu), row.trial, row.mean_return, row.lpm_return, row.min_return, row.constraint,
            row.lambda, row.feasible, row.diverged);
  }
  write_training_log(r.runs, dir / "portfolio_training.csv", wall_clock);
  for (const auto& run : r.runs) {
    write_named_vector(dir / "params" / ("portfolio_nu" + nu_label(run.nu) + "_trial" + std::to_string(run.trial) + ".txt"),
                       "theta", run.log.final_theta);
  }
}

// ---------------------------------------------------------------------------
// Consumption

struct ConsumptionRun {
  SweepRun run;
  std::vector<double> j_r_smooth;
  std::vector<double> j_c_smooth;
  double final_j_r = 0.0;
  double final_j_c = 0.0;
  double max_lambda = 0.0;
};

struct ConsumptionResult {
  std::vector<ConsumptionRun> runs;
};

inline policies::GaussianBeta consumption_policy(const RunConfig& c) {
  policies::GaussianBeta pi(policies::StateNormalizer{c.consumption.horizon_time(), c.policy.wealth_max},
                            c.policy.fourier_order, c.policy.sigma_floor);
  Vector theta = pi.params();
  const Eigen::Index f = pi.feature_dim();
  // The first Fourier feature is the constant one.
  theta[0] += c.policy.init_mu_bias;
  theta[f] += c.policy.init_sigma_bias;
  theta[2 * f] += c.policy.init_alpha_bias;
  theta[3 * f] += c.policy.init_beta_bias;
  pi.set_params(theta);
  return pi;
}

inline NrcpoConfig<Vector> consumption_nrcpo_config(const RunConfig& c, double nu) {
  NrcpoConfig<Vector> cfg;
  fill_common(cfg, c, nu);
  if (c.target.kind == TargetKind::fixed) {
    cfg.target = TargetFunction<Vector>::fixed(c.target.tau, c.critic.discount);
  } else if (c.target.kind == TargetKind::custom) {
    const envs::ConsumptionParams p = c.consumption;
    cfg.target = TargetFunction<Vector>::from(
        [p](const Vector& s, const Vector&) { return envs::consumption_target(p, s); });
  } else {
    throw ConfigError("target.kind: the consumption experiment supports fixed or custom targets");
  }
  return cfg;
}

inline ConsumptionResult run_consumption(const RunConfig& c) {
  require(!c.nu_values.empty(), "run_consumption: nu_values must not be empty");
  const std::size_t n = c.nu_values.size() * c.trials;
  ConsumptionResult out;
  out.runs = run_indexed<ConsumptionRun>(n, c.threads, [&](std::size_t k) {
    ConsumptionRun cr;
    cr.run.nu = c.nu_values[k / c.trials];
    cr.run.trial = k % c.trials;
    NrcpoAgent agent(envs::Consumption(c.consumption), consumption_policy(c), consumption_nrcpo_config(c, cr.run.nu));
    Rng rng = make_rng(c.base_seed, cr.run.trial, kTrainStream);
    Rng eval_rng = make_rng(c.base_seed, cr.run.trial, kEvalStream);
    cr.run.log = agent.train(rng, eval_rng);
    std::vector<double> jr, jc;
    for (const auto& e : cr.run.log.evals) {
      jr.push_back(e.mean_return);
      jc.push_back(e.constraint);
      cr.max_lambda = std::max(cr.max_lambda, e.lambda);
    }
    for (double l : cr.run.log.lambda_trace) cr.max_lambda = std::max(cr.max_lambda, l);
    cr.j_r_smooth = moving_average(jr, c.smoothing_window);
    cr.j_c_smooth = moving_average(jc, c.smoothing_window);
    if (!jr.empty()) {
      cr.final_j_r = cr.j_r_smooth.back();
      cr.final_j_c = cr.j_c_smooth.back();
    }
    return cr;
  });
  return out;
}

inline void write_consumption(const ConsumptionResult& r, const std::filesystem::path& dir, bool wall_clock) {
  {
    CsvWriter csv(dir / "consumption_curves.csv",
                  {"nu", "trial", "episode", "j_r", "j_c", "j_r_smooth", "j_c_smooth", "lambda"});
    for (const auto& cr : r.runs) {
      const auto& ev = cr.run.log.evals;
      for (std::size_t i = 0; i < ev.size(); ++i) {
        csv.row(nu_label(cr.run.nu), cr.run.trial, ev[i].episode, ev[i].mean_return, ev[i].constraint,
                cr.j_r_smooth[i], cr.j_c_smooth[i], ev[i].lambda);
      }
    }
  }
  {
    CsvWriter csv(dir / "consumption_summary.csv",
                  {"nu", "trial", "final_j_r", "final_j_c", "final_lambda", "max_lambda", "diverged"});
    for (const auto& cr : r.runs) {
      csv.row(nu_label(cr.run.nu), cr.run.trial, cr.final_j_r, cr.final_j_c, cr.run.log.final_lambda, cr.max_lambda,
              cr.run.log.diverged);
    }
  }
  std::vector<SweepRun> runs;
  for (const auto& cr : r.runs) runs.push_back(cr.run);
  write_training_log(runs, dir / "consumption_training.csv", wall_clock);
  for (const auto& cr : r.runs) {
    write_named_vector(dir / "params" / ("consumption_nu" + nu_label(cr.run.nu) + "_trial" +
                                         std::to_string(cr.run.trial) + ".txt"),
                       "theta", cr.run.log.final_theta);
  }
}

// ---------------------------------------------------------------------------
// Prediction-only bound check on the toy MDP

struct BoundCheckRow {
  double theta1 = 0.0, theta2 = 0.0;
  int state = 0, action = 0;
  double rho_hat = 0.0;
  double rho_mc = 0.0;
  double rho_mc_se = 0.0;
  std::size_t visits = 0;
  bool holds = false;
};

/// Tabular TD(0) estimate of the LPM proxy for every decision (state, action) of the toy MDP.
///
/// Episodes use exploring starts. Step sizes are 1/n per pair; counts restart halfway so the
/// final averages only see targets built from already-settled successor estimates.
inline CompatibleLinearCritic toy_lpm_td(const envs::ToyPolicy& policy, const TargetFunction<int>& target,
                                         double discount, std::size_t episodes, Rng& rng,
                                         std::vector<std::size_t>* visits = nullptr) {
  constexpr int pairs = envs::ToyMdp::kStateCount * envs::ToyMdp::kActionCount;
  CompatibleLinearCritic critic(pairs, 0, 1.0, 0.0, discount);
  std::vector<std::size_t> counts(pairs, 0);
  envs::ToyMdp env;
  const Vector no_baseline(0);
  std::uniform_int_distribution<int> pick_state(0, 2);
  std::uniform_int_distribution<int> pick_action(0, 1);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    if (ep == episodes / 2) std::fill(counts.begin(), counts.end(), 0);
    Vector s = env.reset_to(envs::ToyMdp::observation(pick_state(rng)));
    int a = pick_action(rng);
    for (;;) {
      const StepResult st = env.step(a, rng);
      Transition<int> tr{s, a, st.reward, st.next_state, std::nullopt, st.terminal};
      const Vector x = policy.state_action_features(s, a);
      Vector x_next = Vector::Zero(pairs);
      int a_next = 0;
      if (!st.terminal) {
        a_next = policy.sample(st.next_state, rng);
        tr.next_action = a_next;
        x_next = policy.state_action_features(st.next_state, a_next);
      }
      const int idx = static_cast<int>(s[0]) * envs::ToyMdp::kActionCount + a;
      critic.step_size = 1.0 / static_cast<double>(++counts[idx]);
      lpm_critic_update(critic, tr, target, nullptr, Vector(), x, x_next, no_baseline, no_baseline, 1);
      if (st.terminal) break;
      s = st.next_state;
      a = a_next;
    }
  }
  if (visits != nullptr) *visits = counts;
  return critic;
}

inline std::vector<BoundCheckRow> run_predict(const RunConfig& c) {
  const int n = c.predict.resolution;
  const auto target = TargetFunction<int>::fixed(c.target.tau, c.critic.discount);
  auto grid = run_indexed<std::vector<BoundCheckRow>>(static_cast<std::size_t>(n * n), c.threads, [&](std::size_t k) {
    const double t1 = static_cast<double>(k / n) / (n - 1);
    const double t2 = static_cast<double>(k % n) / (n - 1);
    envs::ToyPolicy policy(t1, t2);
    Rng rng = make_rng(c.base_seed, k, kTrainStream);
    std::vector<std::size_t> visits;
    const auto critic = toy_lpm_td(policy, target, c.critic.discount, c.predict.td_episodes, rng, &visits);
    std::vector<BoundCheckRow> rows;
    Rng mc_rng = make_rng(c.base_seed, k, kOracleStream);
    envs::ToyMdp env;
    for (int s : {envs::ToyMdp::start, envs::ToyMdp::left, envs::ToyMdp::right}) {
      for (int a = 0; a < envs::ToyMdp::kActionCount; ++a) {
        BoundCheckRow row;
        row.theta1 = t1;
        row.theta2 = t2;
        row.state = s;
        row.action = a;
        const int idx = s * envs::ToyMdp::kActionCount + a;
        row.rho_hat = critic.w[idx];
        row.visits = visits[idx];
        // The oracle uses the return-level target; per step the fixed target is (1 - gamma) tau.
        const auto mc = mc_lpm_of_return(env, policy, envs::ToyMdp::observation(s), a, target,
                                         c.predict.mc_rollouts, c.critic.discount, mc_rng);
        row.rho_mc = mc.value;
        row.rho_mc_se = mc.std_error;
        row.holds = row.rho_hat >= row.rho_mc - 3.0 * row.rho_mc_se - 1e-12;
        rows.push_back(row);
      }
    }
    return rows;
  });
  std::vector<BoundCheckRow> out;
  for (auto& g : grid) out.insert(out.end(), g.begin(), g.end());
  return out;
}

inline void write_predict(const std::vector<BoundCheckRow>& rows, const std::filesystem::path& path) {
  CsvWriter csv(path, {"theta1", "theta2", "state", "action", "rho_hat", "rho_mc", "rho_mc_se", "visits", "holds"});
  for (const auto& r : rows) {
    csv.row(r.theta1, r.theta2, r.state, r.action, r.rho_hat, r.rho_mc, r.rho_mc_se, r.visits, r.holds);
  }
}

}  // namespace lpmrl::harness
