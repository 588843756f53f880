#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lpmrl/envs/bandit.hpp"
#include "lpmrl/envs/portfolio.hpp"
#include "lpmrl/envs/toy_mdp.hpp"
#include "lpmrl/harness/experiments.hpp"
#include "lpmrl/moments.hpp"
#include "lpmrl/policies/softmax.hpp"
#include "lpmrl/prediction.hpp"
#include "support.hpp"

using namespace lpmrl;

namespace {

Transition<int> step_of(double reward, bool terminal) {
  Transition<int> tr;
  tr.state = Vector::Zero(1);
  tr.reward = reward;
  tr.terminal = terminal;
  if (!terminal) tr.next_action = 0;
  return tr;
}

const Vector kOne = Vector::Ones(1);
const Vector kNone = Vector(0);

}  // namespace

TEST(CriticEstimate, Examples) {
  CompatibleLinearCritic c(3, 1, 0.1, 0.0, 1.0);
  Vector psi(3);
  psi << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0;
  EXPECT_EQ(critic_estimate(c, psi, kOne), 0.0);
  c.w << 3.0, 0.0, 0.0;
  c.v << 0.25;
  EXPECT_DOUBLE_EQ(critic_estimate(c, psi, kOne), 2.25);
  EXPECT_THROW(critic_estimate(c, kOne, kOne), PreconditionError);
}

TEST(CriticEstimate, ScoreTermAveragesToZeroUnderThePolicy) {
  Rng rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Vector theta(3), w(3);
  for (int i = 0; i < 3; ++i) {
    theta[i] = n(rng);
    w[i] = n(rng);
  }
  policies::GibbsStateless pi(theta);
  const Vector p = pi.probabilities();
  double expectation = 0.0;
  for (int a = 0; a < 3; ++a) expectation += p[a] * pi.score(Vector(), a).dot(w);
  EXPECT_NEAR(expectation, 0.0, 1e-15);
}

TEST(SarsaUpdate, GeometricSeries) {
  CompatibleLinearCritic c(1, 0, 0.1, 0.0, 0.9);
  const auto tr = step_of(1.0, false);
  for (int i = 0; i < 5000; ++i) sarsa_update(c, tr, kOne, kOne, kNone, kNone);
  EXPECT_NEAR(critic_estimate(c, kOne, kNone), 10.0, 1e-3);
}

TEST(SarsaUpdate, TerminalHasNoBootstrap) {
  CompatibleLinearCritic c(1, 0, 0.5, 0.0, 0.9);
  c.w[0] = 4.0;
  const double delta = sarsa_update(c, step_of(1.0, true), kOne, Vector(), kNone, Vector());
  EXPECT_DOUBLE_EQ(delta, 1.0 - 4.0);
  EXPECT_DOUBLE_EQ(c.w[0], 4.0 - 1.5);
}

TEST(SarsaUpdate, AccumulatingTrace) {
  CompatibleLinearCritic c(2, 0, 0.5, 0.5, 0.8);
  Vector x0(2), x1(2);
  x0 << 1.0, 0.0;
  x1 << 0.0, 1.0;
  Transition<int> tr = step_of(1.0, false);
  sarsa_update(c, tr, x0, x1, kNone, kNone);
  EXPECT_TRUE(c.trace_w.isApprox(x0));
  EXPECT_DOUBLE_EQ(c.w[0], 0.5);
  sarsa_update(c, step_of(2.0, true), x1, Vector(), kNone, Vector());
  Vector trace(2);
  trace << 0.4, 1.0;
  EXPECT_TRUE(c.trace_w.isApprox(trace));
  EXPECT_DOUBLE_EQ(c.w[0], 0.5 + 0.5 * 2.0 * 0.4);
  EXPECT_DOUBLE_EQ(c.w[1], 0.5 * 2.0);
  c.reset_traces();
  EXPECT_EQ(c.trace_w.norm(), 0.0);
}

TEST(SarsaUpdate, RewardOverrideReplacesReward) {
  CompatibleLinearCritic c(1, 0, 1.0, 0.0, 1.0);
  const double delta = sarsa_update(c, step_of(5.0, true), kOne, Vector(), kNone, Vector(), 2.0);
  EXPECT_DOUBLE_EQ(delta, 2.0);
}

TEST(SarsaUpdate, DimensionMismatch) {
  CompatibleLinearCritic c(2, 1, 0.1, 0.0, 1.0);
  EXPECT_THROW(sarsa_update(c, step_of(1.0, true), kOne, kOne, kOne, kOne), PreconditionError);
  EXPECT_THROW(CompatibleLinearCritic(1, 0, 0.0, 0.0, 1.0), PreconditionError);
  EXPECT_THROW(CompatibleLinearCritic(1, 0, 0.1, 1.5, 1.0), PreconditionError);
}

TEST(SarsaUpdate, BoundedStepNeverOvershoots) {
  CompatibleLinearCritic c(1, 0, 1.0, 0.0, 0.5);
  c.bounded_step = true;
  Vector big = Vector::Constant(1, 10.0);
  sarsa_update(c, step_of(1.0, true), big, Vector(), kNone, Vector());
  EXPECT_DOUBLE_EQ(c.step_size, 0.01);
  EXPECT_NEAR(critic_estimate(c, big, kNone), 1.0, 1e-12);
}

TEST(SarsaUpdate, TwoStateDeterministicChainMatchesDynamicProgramming) {
  // State 0 -> state 1 with reward 1, state 1 -> state 0 with reward -2, gamma 0.9.
  const double gamma = 0.9;
  const double q0 = (1.0 - 2.0 * gamma) / (1.0 - gamma * gamma);
  const double q1 = (-2.0 + gamma) / (1.0 - gamma * gamma);
  CompatibleLinearCritic c(2, 0, 0.05, 0.0, gamma);
  Vector x0(2), x1(2);
  x0 << 1.0, 0.0;
  x1 << 0.0, 1.0;
  for (int i = 0; i < 50000; ++i) {
    sarsa_update(c, step_of(1.0, false), x0, x1, kNone, kNone);
    sarsa_update(c, step_of(-2.0, false), x1, x0, kNone, kNone);
  }
  EXPECT_NEAR(c.w[0], q0, 1e-2);
  EXPECT_NEAR(c.w[1], q1, 1e-2);
}

TEST(SarsaUpdateProperty, TabularFixedPointMatchesDynamicProgramming) {
  Rng rng(2);
  for (int rep = 0; rep < 2; ++rep) {
    auto mdp = test_support::RandomMdp::generate(rng);
    const auto pi = test_support::TablePolicy::generate(rng, mdp.states, mdp.actions);
    const Vector exact = test_support::dp_action_values(mdp, pi, 0.9);
    const Vector td = test_support::tabular_sarsa(mdp, pi, 0.9, 500000, rng);
    EXPECT_LT((exact - td).cwiseAbs().maxCoeff(), 1e-2);
  }
}

TEST(SarsaUpdateProperty, BlockLayoutIsInterchangeable) {
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  CompatibleLinearCritic a(3, 2, 0.05, 0.7, 0.95);
  CompatibleLinearCritic b(2, 3, 0.05, 0.7, 0.95);
  Vector psi(3), phi(2);
  for (int t = 0; t < 200; ++t) {
    Vector psi_next(3), phi_next(2);
    for (auto& x : psi_next) x = n(rng);
    for (auto& x : phi_next) x = n(rng);
    if (t == 0) {
      psi = psi_next;
      phi = phi_next;
      continue;
    }
    const auto tr = step_of(n(rng), t % 17 == 0);
    const double da = sarsa_update(a, tr, psi, psi_next, phi, phi_next);
    const double db = sarsa_update(b, tr, phi, phi_next, psi, psi_next);
    EXPECT_NEAR(da, db, 1e-12);
    if (tr.terminal) {
      a.reset_traces();
      b.reset_traces();
    }
    psi = psi_next;
    phi = phi_next;
  }
  EXPECT_TRUE(a.w.isApprox(b.v, 1e-12));
  EXPECT_TRUE(a.v.isApprox(b.w, 1e-12));
}

TEST(TargetFunction, FixedUndiscountedIsZeroPerStep) {
  const auto t = TargetFunction<int>::fixed(3.0, 1.0);
  EXPECT_EQ(t.per_step(Vector(), 0, nullptr, Vector()), 0.0);
  EXPECT_DOUBLE_EQ(TargetFunction<int>::fixed(3.0, 0.9).per_step(Vector(), 0, nullptr, Vector()), 0.3);
}

TEST(TargetFunction, NonFiniteCustomTargetIsAnError) {
  const auto t = TargetFunction<int>::from([](const Vector&, const int&) { return std::nan(""); });
  CompatibleLinearCritic c(1, 0, 0.1, 0.0, 1.0);
  EXPECT_THROW(lpm_critic_update(c, step_of(1.0, true), t, nullptr, Vector(), kOne, Vector(), kNone, Vector()),
               std::runtime_error);
}

TEST(TargetFunction, CentralisedNeedsEstimator) {
  const auto t = TargetFunction<int>::centralised();
  EXPECT_THROW(t.per_step(Vector(), 0, nullptr, Vector()), PreconditionError);
}

TEST(RewardMeanEstimator, TabularTracksSampleMean) {
  auto est = RewardMeanEstimator::tabular(2);
  Rng rng(4);
  std::normal_distribution<double> n(3.0, 2.0);
  double sum = 0.0;
  Vector x = Vector::Zero(2);
  x[1] = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = n(rng);
    sum += r;
    est.update(x, r);
  }
  EXPECT_NEAR(est.predict(x), sum / 1000.0, 1e-12);
  EXPECT_EQ(est.weights()[0], 0.0);
}

TEST(RewardMeanEstimator, LinearRegressionConverges) {
  auto est = RewardMeanEstimator::linear(2, 0.01);
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 0.1);
  for (int i = 0; i < 100000; ++i) {
    Vector x(2);
    x << 1.0, u(rng);
    est.update(x, 2.0 - 3.0 * x[1] + n(rng));
  }
  EXPECT_NEAR(est.weights()[0], 2.0, 0.05);
  EXPECT_NEAR(est.weights()[1], -3.0, 0.05);
  EXPECT_THROW(RewardMeanEstimator::linear(2, 0.0), PreconditionError);
}

TEST(LpmCritic, RewardsAboveTargetGiveZero) {
  CompatibleLinearCritic c(2, 1, 0.1, 0.5, 0.9);
  const auto t = TargetFunction<int>::fixed(-1.0, 1.0);
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  Vector x(2);
  x << 0.3, -0.7;
  for (int i = 0; i < 1000; ++i) {
    lpm_critic_update(c, step_of(u(rng), i % 5 == 4), t, nullptr, Vector(), x, x, kOne, kOne);
  }
  EXPECT_EQ(c.w.norm(), 0.0);
  EXPECT_EQ(c.v.norm(), 0.0);
}

TEST(LpmCritic, OneStepBanditFixedPointIsExpectedShortfall) {
  envs::Bandit env;
  Rng rng(7);
  const double tau = 1.0;
  CompatibleLinearCritic c(3, 0, 1.0, 0.0, 0.7);
  const auto target = TargetFunction<int>::fixed(tau / (1.0 - 0.7), 0.7);
  std::vector<std::vector<double>> shortfall(3);
  for (int i = 0; i < 300000; ++i) {
    const int a = i % 3;
    env.reset(rng);
    const auto st = env.step(a, rng);
    Transition<int> tr{Vector(), a, st.reward, Vector(), std::nullopt, true};
    Vector x = Vector::Zero(3);
    x[a] = 1.0;
    c.step_size = 1.0 / static_cast<double>(i / 3 + 1);
    lpm_critic_update(c, tr, target, nullptr, Vector(), x, Vector(), kNone, Vector());
    shortfall[static_cast<std::size_t>(a)].push_back(positive_part(tau - st.reward));
  }
  // Arm A ~ N(1, 1): E[(1 - X)_+] = 1 / sqrt(2 pi).
  EXPECT_NEAR(c.w[0], 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.005);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(c.w[a], sample_mean(shortfall[static_cast<std::size_t>(a)]), 1e-9);
  EXPECT_EQ(c.w[2], 0.0);
}

TEST(LpmCritic, SecondOrderOnlyForSingleStepEpisodes) {
  CompatibleLinearCritic c(1, 0, 0.1, 0.0, 1.0);
  const auto t = TargetFunction<int>::fixed(0.0, 1.0);
  EXPECT_THROW(lpm_critic_update(c, step_of(-1.0, false), t, nullptr, Vector(), kOne, kOne, kNone, kNone, 2),
               PreconditionError);
  lpm_critic_update(c, step_of(-3.0, true), t, nullptr, Vector(), kOne, Vector(), kNone, Vector(), 2);
  EXPECT_DOUBLE_EQ(c.w[0], 0.9);
}

TEST(LpmCritic, CentralisedEstimatorSeesRewardAfterTheTarget) {
  CompatibleLinearCritic c(1, 0, 1.0, 0.0, 1.0);
  auto mean = RewardMeanEstimator::tabular(1);
  const auto t = TargetFunction<int>::centralised();
  // First step: target is the initial estimate 0, so the shortfall is 2.
  EXPECT_EQ(lpm_critic_update(c, step_of(-2.0, true), t, &mean, kOne, kOne, Vector(), kNone, Vector()), 2.0);
  EXPECT_EQ(mean.predict(kOne), -2.0);
  EXPECT_DOUBLE_EQ(c.w[0], 2.0);
  // Second step: target -2, reward -4, shortfall 2 matches the estimate.
  EXPECT_EQ(lpm_critic_update(c, step_of(-4.0, true), t, &mean, kOne, kOne, Vector(), kNone, Vector()), 0.0);
  EXPECT_EQ(mean.predict(kOne), -3.0);
  EXPECT_DOUBLE_EQ(c.w[0], 2.0);
}

TEST(LpmCriticProperty, ToyUpperBoundAtHalf) {
  envs::ToyPolicy pi(0.5, 0.5);
  const auto target = TargetFunction<int>::fixed(0.0, 1.0);
  Rng rng(8);
  const auto critic = harness::toy_lpm_td(pi, target, 1.0, 100000, rng);
  envs::ToyMdp env;
  const auto s0 = envs::ToyMdp::observation(envs::ToyMdp::start);
  const auto mc = mc_lpm_of_return(env, pi, s0, envs::ToyMdp::kRightOrUp, target, 20000, 1.0, rng);
  const double rho_hat = critic.w[envs::ToyMdp::start * 2 + envs::ToyMdp::kRightOrUp];
  EXPECT_GE(rho_hat, mc.value - 3.0 * mc.std_error);
  // Per-step shortfalls: right then down costs 1 half the time, although that return is 0.
  EXPECT_NEAR(rho_hat, 0.5, 0.02);
  const double left = critic.w[envs::ToyMdp::start * 2 + envs::ToyMdp::kLeftOrDown];
  EXPECT_NEAR(left, 1.5, 0.02);
}

TEST(LpmCriticProperty, CentralisedUpperBoundOnBandit) {
  envs::Bandit env;
  policies::GibbsStateless pi(3);
  Rng rng(9);
  auto mean = RewardMeanEstimator::tabular(3);
  const auto target = TargetFunction<int>::centralised();
  CompatibleLinearCritic c(3, 0, 1.0, 0.0, 1.0);
  for (int i = 0; i < 60000; ++i) {
    const int a = i % 3;
    env.reset(rng);
    const auto st = env.step(a, rng);
    Transition<int> tr{Vector(), a, st.reward, Vector(), std::nullopt, true};
    const Vector x = pi.state_action_features(Vector(), a);
    c.step_size = 1.0 / static_cast<double>(i / 3 + 1);
    lpm_critic_update(c, tr, target, &mean, x, x, Vector(), kNone, Vector());
  }
  for (int a = 0; a < 2; ++a) {
    const auto mc = mc_lpm_of_return(env, pi, Vector(), a, target, 20000, 1.0, rng, &mean);
    EXPECT_GE(c.w[a], mc.value - 3.0 * mc.std_error) << "arm " << a;
  }
}

TEST(LpmCriticProperty, TransformedRewardsHaveLowerVariance) {
  envs::Portfolio env;
  policies::GibbsLinear pi({env.state_dim(), env.action_count()});
  Rng rng(10);
  for (double tau_r : {-0.01, 0.0, 0.005, 0.02}) {
    std::vector<double> raw, transformed;
    for (int ep = 0; ep < 50; ++ep) {
      const auto tr = rollout(env, pi, rng, 100);
      for (const auto& t : tr.transitions) {
        raw.push_back(t.reward);
        transformed.push_back(transform_reward(t.reward, tau_r, 1));
      }
    }
    EXPECT_LE(population_variance(transformed), population_variance(raw) * (1.0 + 1e-12));
  }
}
