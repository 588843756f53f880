#include <gtest/gtest.h>

#include <sstream>

#include "lpmrl/envs/bandit.hpp"
#include "lpmrl/envs/portfolio.hpp"
#include "lpmrl/envs/toy_mdp.hpp"
#include "lpmrl/mdp.hpp"
#include "lpmrl/policies/softmax.hpp"

using namespace lpmrl;

namespace {

Trajectory<int> make_traj(std::vector<double> rewards, double discount) {
  Trajectory<int> t;
  t.discount = discount;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    Transition<int> tr;
    tr.state = Vector::Constant(1, static_cast<double>(i));
    tr.reward = rewards[i];
    tr.terminal = i + 1 == rewards.size();
    t.transitions.push_back(tr);
  }
  return t;
}

/// Environment that never terminates.
struct Endless {
  using action_type = int;
  Vector reset(Rng&) { return Vector::Zero(1); }
  StepResult step(int, Rng&) { return {Vector::Zero(1), 1.0, false}; }
};

struct Constant {
  using action_type = int;
  int sample(const Vector&, Rng&) const { return 0; }
  double log_prob(const Vector&, int) const { return 0.0; }
  Vector score(const Vector&, int) const { return Vector::Zero(1); }
  Vector baseline_features(const Vector&) const { return Vector::Ones(1); }
  Vector state_action_features(const Vector&, int) const { return Vector::Ones(1); }
  const Vector& params() const { return theta; }
  void set_params(const Vector& t) { theta = t; }
  Vector theta = Vector::Zero(1);
};

}  // namespace

TEST(DiscountedReturn, UndiscountedSum) { EXPECT_DOUBLE_EQ(discounted_return(make_traj({1, 1}, 1.0), 0), 2.0); }

TEST(DiscountedReturn, GeometricWeighting) { EXPECT_DOUBLE_EQ(discounted_return(make_traj({1, 1}, 0.5), 0), 1.5); }

TEST(DiscountedReturn, ToyLeftDownPath) { EXPECT_DOUBLE_EQ(discounted_return(make_traj({-1, -1}, 1.0), 0), -2.0); }

TEST(DiscountedReturn, IndexOutOfRange) {
  EXPECT_THROW(discounted_return(make_traj({1, 1}, 1.0), 2), PreconditionError);
}

TEST(DiscountedReturnProperty, BellmanConsistency) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> r(1 + rep % 20);
    for (auto& x : r) x = u(rng);
    const double gamma = 0.01 * (rep % 101);
    const auto t = make_traj(r, gamma);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      EXPECT_NEAR(discounted_return(t, i), r[i] + gamma * discounted_return(t, i + 1), 1e-12);
    }
  }
}

TEST(Rollout, ToyDeterministicPolicyGoesRightThenUp) {
  envs::ToyMdp env;
  envs::ToyPolicy pi(1.0, 1.0);
  Rng rng(1);
  const auto t = rollout(env, pi, rng, 10);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.transitions[0].action, envs::ToyMdp::kRightOrUp);
  EXPECT_EQ(t.transitions[1].action, envs::ToyMdp::kRightOrUp);
  EXPECT_EQ(t.transitions[0].reward, 1.0);
  EXPECT_EQ(t.transitions[1].reward, 1.0);
  EXPECT_EQ(static_cast<int>(t.transitions[1].state[0]), envs::ToyMdp::right);
  EXPECT_FALSE(t.truncated);
  EXPECT_TRUE(t.transitions[1].terminal);
  EXPECT_FALSE(t.transitions[1].next_action.has_value());
  EXPECT_TRUE(t.transitions[0].next_action.has_value());
}

TEST(Rollout, BanditIsSingleStep) {
  envs::Bandit env;
  policies::GibbsStateless pi(3);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto t = rollout(env, pi, rng, 10);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_TRUE(t.transitions[0].terminal);
  }
}

TEST(Rollout, PortfolioEpisodeHasFiftyTransitions) {
  envs::Portfolio env;
  policies::GibbsLinear pi({env.state_dim(), env.action_count()});
  Rng rng(3);
  const auto t = rollout(env, pi, rng, 1000, 0.99);
  EXPECT_EQ(t.size(), 50u);
  EXPECT_TRUE(t.transitions.back().terminal);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) EXPECT_FALSE(t.transitions[i].terminal);
}

TEST(Rollout, TruncationIsDistinctFromTermination) {
  Endless env;
  Constant pi;
  Rng rng(4);
  const auto t = rollout(env, pi, rng, 7);
  EXPECT_EQ(t.size(), 7u);
  EXPECT_TRUE(t.truncated);
  EXPECT_FALSE(t.transitions.back().terminal);
  EXPECT_THROW(rollout(env, pi, rng, 0), PreconditionError);
}

TEST(Rollout, FixedSeedIsReproducible) {
  envs::Portfolio env;
  policies::GibbsLinear pi({env.state_dim(), env.action_count()});
  Rng a(99), b(99);
  const auto ta = rollout(env, pi, a, 100);
  const auto tb = rollout(env, pi, b, 100);
  ASSERT_EQ(ta.size(), tb.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta.transitions[i].action, tb.transitions[i].action);
    EXPECT_EQ(ta.transitions[i].reward, tb.transitions[i].reward);
    EXPECT_EQ(ta.transitions[i].state, tb.transitions[i].state);
  }
}

TEST(TrajectoryCsv, HeaderAndRows) {
  envs::ToyMdp env;
  envs::ToyPolicy pi(1.0, 1.0);
  Rng rng(1);
  std::ostringstream os;
  write_trajectory_csv(os, rollout(env, pi, rng, 10), 3, true);
  EXPECT_EQ(os.str(), "trial,step,s0,a0,reward,terminal\n3,0,0,1,1,0\n3,1,2,1,1,1\n");
}

TEST(EnvironmentContract, StepAfterTerminalThrows) {
  envs::Bandit bandit;
  Rng rng(1);
  bandit.reset(rng);
  bandit.step(0, rng);
  EXPECT_THROW(bandit.step(0, rng), std::logic_error);
  envs::ToyMdp toy;
  toy.reset(rng);
  toy.step(1, rng);
  toy.step(1, rng);
  EXPECT_THROW(toy.step(1, rng), std::logic_error);
}
