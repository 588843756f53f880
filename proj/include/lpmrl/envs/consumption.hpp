#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"

namespace lpmrl::envs {

/// Merton-style consumption with a defaultable risky asset.
struct ConsumptionParams {
  double r_liquid = 0.05;
  double risky_mean = 1.0;
  double risky_vol = 0.25;
  double initial_wealth = 1.0;
  double dt = 0.005;
  double p_default = 0.0015;
  int horizon = 200;
  // Wealth at or below this level counts as exhausted.
  double exhaustion = 1e-6;

  bool operator==(const ConsumptionParams&) const = default;

  double horizon_time() const { return dt * horizon; }

  void validate() const {
    require(dt > 0.0 && horizon >= 1, "ConsumptionParams: dt and horizon must be positive");
    require(p_default >= 0.0 && p_default <= 1.0, "ConsumptionParams: p_default must be in [0, 1]");
    require(initial_wealth > 0.0 && risky_vol >= 0.0, "ConsumptionParams: invalid wealth or volatility");
  }
};

/// Observation (t, W) with t in time units. Action (risky fraction, consumption fraction).
///
/// Each step consumes a2 * W first, then splits the rest a1 risky / (1 - a1) liquid.
/// The risky part grows by mu*dt + sigma*sqrt(dt)*Z; a default wipes it out and
/// the liquid part is consumed before the episode ends.
class Consumption {
 public:
  using action_type = Vector;

  explicit Consumption(ConsumptionParams params = {}) : params_(params) { params_.validate(); }

  const ConsumptionParams& params() const { return params_; }

  Vector reset(Rng&) {
    wealth_ = params_.initial_wealth;
    k_ = 0;
    done_ = false;
    return observation();
  }

  /// Starts from an arbitrary (t, W); t is snapped to the step grid.
  Vector reset_to(const Vector& s) {
    require(s.size() == 2 && s[1] >= 0.0, "Consumption: state is (t, W >= 0)");
    k_ = static_cast<int>(std::lround(s[0] / params_.dt));
    require(k_ >= 0 && k_ < params_.horizon, "Consumption: time outside the horizon");
    wealth_ = s[1];
    done_ = false;
    return observation();
  }

  StepResult step(const Vector& action, Rng& rng) {
    if (done_) throw std::logic_error("Consumption: step after terminal");
    require(action.size() == 2, "Consumption: action is (risky fraction, consumption fraction)");
    const double consume = action[1];
    require(consume >= 0.0 && consume <= 1.0, "Consumption: consumption fraction must be in [0, 1]");
    const double risky_frac = std::clamp(action[0], 0.0, 1.0);

    double reward = consume * wealth_;
    const double rest = wealth_ - reward;
    double risky = risky_frac * rest;
    double liquid = rest - risky;

    const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
    const bool defaulted = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < params_.p_default;
    ++k_;
    if (defaulted) {
      reward += liquid;
      wealth_ = 0.0;
      done_ = true;
      return {observation(), reward, true};
    }
    liquid *= 1.0 + params_.r_liquid * params_.dt;
    risky *= 1.0 + params_.risky_mean * params_.dt + params_.risky_vol * std::sqrt(params_.dt) * z;
    wealth_ = liquid + std::max(risky, 0.0);
    done_ = k_ >= params_.horizon || wealth_ <= params_.exhaustion;
    return {observation(), reward, done_};
  }

  double wealth() const { return wealth_; }
  int step_index() const { return k_; }

 private:
  Vector observation() const {
    Vector s(2);
    s << k_ * params_.dt, wealth_;
    return s;
  }

  ConsumptionParams params_;
  double wealth_ = 1.0;
  int k_ = 0;
  bool done_ = false;
};

/// tau_R(s, a) = W_t * dt * (T - t), with t and T in time units.
inline double consumption_target(const ConsumptionParams& p, const Vector& state) {
  return state[1] * p.dt * (p.horizon_time() - state[0]);
}

}  // namespace lpmrl::envs
