#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"
#include "lpmrl/prediction.hpp"

namespace lpmrl::test_support {

inline std::string source_path(const std::string& relative) { return std::string(LPMRL_SOURCE_DIR) + "/" + relative; }

enum class SampleFamily { normal, uniform, pareto, mixture };

inline const char* family_name(SampleFamily f) {
  switch (f) {
    case SampleFamily::normal: return "normal";
    case SampleFamily::uniform: return "uniform";
    case SampleFamily::pareto: return "pareto";
    case SampleFamily::mixture: return "mixture";
  }
  return "?";
}

/// Draws `n` samples from a randomly parameterised member of `family`.
inline std::vector<double> draw_family(SampleFamily family, std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  switch (family) {
    case SampleFamily::normal: {
      std::normal_distribution<double> d(-3.0 + 6.0 * u(rng), 0.1 + 4.0 * u(rng));
      for (auto& v : x) v = d(rng);
      break;
    }
    case SampleFamily::uniform: {
      const double a = -5.0 + 8.0 * u(rng);
      std::uniform_real_distribution<double> d(a, a + 0.1 + 5.0 * u(rng));
      for (auto& v : x) v = d(rng);
      break;
    }
    case SampleFamily::pareto: {
      const double scale = 0.1 + 2.0 * u(rng);
      const double shape = 1.1 + 3.0 * u(rng);
      const double shift = -4.0 + 4.0 * u(rng);
      for (auto& v : x) v = shift + scale * std::pow(1.0 - u(rng), -1.0 / shape);
      break;
    }
    case SampleFamily::mixture: {
      const double w = u(rng);
      std::normal_distribution<double> lo(-4.0 + 3.0 * u(rng), 0.2 + u(rng));
      std::normal_distribution<double> hi(1.0 + 3.0 * u(rng), 0.2 + 2.0 * u(rng));
      for (auto& v : x) v = u(rng) < w ? lo(rng) : hi(rng);
      break;
    }
  }
  return x;
}

/// Central finite difference of f at theta with step h.
template <class F>
Vector finite_difference(F f, const Vector& theta, double h = 1e-5) {
  Vector g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Vector up = theta, down = theta;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& analytic, const Vector& numeric) {
  return (analytic - numeric).norm() / std::max(numeric.norm(), 1e-8);
}

/// Small finite MDP with random transitions, deterministic rewards and a per-step
/// termination probability. Observation is the state index.
struct RandomMdp {
  using action_type = int;

  int states = 5;
  int actions = 2;
  double p_terminate = 0.2;
  std::vector<std::vector<double>> transition;  // [s * actions + a][s']
  std::vector<double> reward;                   // [s * actions + a]
  int state = 0;
  bool done = false;

  static RandomMdp generate(Rng& rng, int states = 5, int actions = 2, double p_terminate = 0.2) {
    RandomMdp m;
    m.states = states;
    m.actions = actions;
    m.p_terminate = p_terminate;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < states * actions; ++k) {
      std::vector<double> row(static_cast<std::size_t>(states));
      double total = 0.0;
      for (auto& p : row) total += (p = u(rng));
      for (auto& p : row) p /= total;
      m.transition.push_back(row);
      m.reward.push_back(-1.0 + 2.0 * u(rng));
    }
    return m;
  }

  Vector reset(Rng& rng) { return reset_to(Vector::Constant(1, std::uniform_int_distribution<int>(0, states - 1)(rng))); }

  Vector reset_to(const Vector& s) {
    state = static_cast<int>(s[0]);
    done = false;
    return s;
  }

  StepResult step(int a, Rng& rng) {
    if (done) throw std::logic_error("RandomMdp: step after terminal");
    const auto& row = transition[static_cast<std::size_t>(state * actions + a)];
    StepResult out;
    out.reward = reward[static_cast<std::size_t>(state * actions + a)];
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double draw = u(rng);
    double acc = 0.0;
    int next = states - 1;
    for (int s = 0; s < states; ++s) {
      acc += row[static_cast<std::size_t>(s)];
      if (draw < acc) {
        next = s;
        break;
      }
    }
    state = next;
    done = u(rng) < p_terminate;
    out.terminal = done;
    out.next_state = Vector::Constant(1, next);
    return out;
  }
};

/// Fixed stochastic policy given by a probability table, with one-hot state-action features.
struct TablePolicy {
  using action_type = int;

  int states = 5;
  int actions = 2;
  std::vector<double> probs;  // [s * actions + a]
  Vector theta = Vector::Zero(1);

  static TablePolicy generate(Rng& rng, int states, int actions) {
    TablePolicy p;
    p.states = states;
    p.actions = actions;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int s = 0; s < states; ++s) {
      std::vector<double> row(static_cast<std::size_t>(actions));
      double total = 0.0;
      for (auto& x : row) total += (x = u(rng));
      for (auto& x : row) p.probs.push_back(x / total);
    }
    return p;
  }

  double prob(int s, int a) const { return probs[static_cast<std::size_t>(s * actions + a)]; }

  int sample(const Vector& s, Rng& rng) const {
    const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (int a = 0; a < actions; ++a) {
      acc += prob(static_cast<int>(s[0]), a);
      if (draw < acc) return a;
    }
    return actions - 1;
  }
  double log_prob(const Vector& s, int a) const { return std::log(prob(static_cast<int>(s[0]), a)); }
  Vector score(const Vector&, int) const { return Vector::Zero(1); }
  Vector baseline_features(const Vector&) const { return Vector(0); }
  Vector state_action_features(const Vector& s, int a) const {
    Vector x = Vector::Zero(states * actions);
    x[static_cast<int>(s[0]) * actions + a] = 1.0;
    return x;
  }
  const Vector& params() const { return theta; }
  void set_params(const Vector& t) { theta = t; }
};

/// Exact Q^pi by solving the linear Bellman system.
inline Vector dp_action_values(const RandomMdp& m, const TablePolicy& pi, double discount) {
  const int n = m.states * m.actions;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Vector b(n);
  for (int k = 0; k < n; ++k) {
    b[k] = m.reward[static_cast<std::size_t>(k)];
    for (int s2 = 0; s2 < m.states; ++s2) {
      const double p = discount * (1.0 - m.p_terminate) * m.transition[static_cast<std::size_t>(k)][static_cast<std::size_t>(s2)];
      for (int a2 = 0; a2 < m.actions; ++a2) a(k, s2 * m.actions + a2) -= p * pi.prob(s2, a2);
    }
  }
  return a.partialPivLu().solve(b);
}

/// Tabular SARSA(0) with exploring starts and per-pair n^-0.65 step sizes.
/// Returns the average of the weights over the second half of the episodes.
inline Vector tabular_sarsa(RandomMdp m, const TablePolicy& pi, double discount, std::size_t episodes, Rng& rng) {
  const int n = m.states * m.actions;
  CompatibleLinearCritic critic(n, 0, 1.0, 0.0, discount);
  std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
  const Vector none(0);
  std::uniform_int_distribution<int> pick_state(0, m.states - 1);
  std::uniform_int_distribution<int> pick_action(0, m.actions - 1);
  Vector average = Vector::Zero(n);
  std::size_t averaged = 0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    Vector s = m.reset_to(Vector::Constant(1, pick_state(rng)));
    int a = pick_action(rng);
    for (;;) {
      const StepResult st = m.step(a, rng);
      Transition<int> tr{s, a, st.reward, st.next_state, std::nullopt, st.terminal};
      Vector x_next = Vector::Zero(n);
      int a_next = 0;
      if (!st.terminal) {
        a_next = pi.sample(st.next_state, rng);
        tr.next_action = a_next;
        x_next = pi.state_action_features(st.next_state, a_next);
      }
      const int idx = static_cast<int>(s[0]) * m.actions + a;
      critic.step_size = std::pow(static_cast<double>(++counts[static_cast<std::size_t>(idx)]), -0.65);
      sarsa_update(critic, tr, pi.state_action_features(s, a), x_next, none, none);
      if (st.terminal) break;
      s = st.next_state;
      a = a_next;
    }
    if (2 * ep >= episodes) average += (critic.w - average) / static_cast<double>(++averaged);
  }
  return average;
}

}  // namespace lpmrl::test_support
