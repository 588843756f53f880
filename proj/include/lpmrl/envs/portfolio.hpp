#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"

namespace lpmrl::envs {

/// Liquid/illiquid allocation problem with a two-regime illiquid rate and defaults at maturity.
/// Rates are gross per-step factors.
struct PortfolioParams {
  double r_liquid = 1.005;
  double r_illiquid_high = 1.25;
  double r_illiquid_low = 1.05;
  double p_up = 0.1;    // low -> high
  double p_down = 0.6;  // high -> low
  double p_default = 0.1;
  int max_order = 10;
  double unit_cost = 0.02;
  int maturity = 4;
  int horizon = 50;
  double initial_liquid = 1.0;
  bool start_high = false;

  bool operator==(const PortfolioParams&) const = default;

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    require(prob(p_up) && prob(p_down) && prob(p_default), "PortfolioParams: probabilities must be in [0, 1]");
    require(max_order >= 0 && maturity >= 1 && horizon >= 1, "PortfolioParams: counts out of range");
    require(unit_cost > 0.0 && initial_liquid > 0.0, "PortfolioParams: cost and wealth must be positive");
    require(r_liquid > 0.0 && r_illiquid_high > 0.0 && r_illiquid_low > 0.0, "PortfolioParams: rates must be positive");
  }
};

/// Observation: [liquid, illiquid value by time to maturity (soonest first), r_N(t) - mean of earlier r_N].
class Portfolio {
 public:
  using action_type = int;

  explicit Portfolio(PortfolioParams params = {}) : params_(params) {
    params_.validate();
    buckets_.assign(static_cast<std::size_t>(params_.maturity), 0.0);
  }

  int action_count() const { return params_.max_order + 1; }
  int state_dim() const { return params_.maturity + 2; }
  const PortfolioParams& params() const { return params_; }

  Vector reset(Rng&) {
    liquid_ = params_.initial_liquid;
    std::fill(buckets_.begin(), buckets_.end(), 0.0);
    high_ = params_.start_high;
    rate_sum_ = 0.0;
    t_ = 0;
    done_ = false;
    clipped_orders_ = 0;
    return observation();
  }

  /// Largest order whose cost stays strictly below the liquid holdings.
  int affordable(int order) const {
    int k = std::clamp(order, 0, params_.max_order);
    while (k > 0 && params_.unit_cost * k >= liquid_) --k;
    return k;
  }

  StepResult step(int order, Rng& rng) {
    if (done_) throw std::logic_error("Portfolio: step after terminal");
    const int k = affordable(order);
    if (k != order) ++clipped_orders_;
    const double before = liquid_;
    const double rate = current_rate();

    liquid_ -= params_.unit_cost * k;
    buckets_.back() += params_.unit_cost * k;

    for (double& b : buckets_) b *= rate;
    liquid_ *= params_.r_liquid;

    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool defaulted = u(rng) < params_.p_default;
    if (!defaulted) liquid_ += buckets_.front();
    std::rotate(buckets_.begin(), buckets_.begin() + 1, buckets_.end());
    buckets_.back() = 0.0;

    rate_sum_ += rate;
    const double switch_draw = u(rng);
    high_ = high_ ? !(switch_draw < params_.p_down) : switch_draw < params_.p_up;

    ++t_;
    done_ = t_ >= params_.horizon;
    return {observation(), std::log(liquid_ / before), done_};
  }

  double liquid() const { return liquid_; }
  /// Illiquid holdings at their accrued value.
  double illiquid() const {
    double s = 0.0;
    for (double b : buckets_) s += b;
    return s;
  }
  int clipped_orders() const { return clipped_orders_; }
  double current_rate() const { return high_ ? params_.r_illiquid_high : params_.r_illiquid_low; }

 private:
  Vector observation() const {
    Vector s(state_dim());
    s[0] = liquid_;
    for (int i = 0; i < params_.maturity; ++i) s[i + 1] = buckets_[static_cast<std::size_t>(i)];
    const double mean = t_ == 0 ? current_rate() : rate_sum_ / static_cast<double>(t_);
    s[params_.maturity + 1] = current_rate() - mean;
    return s;
  }

  PortfolioParams params_;
  double liquid_ = 1.0;
  std::vector<double> buckets_;
  bool high_ = false;
  double rate_sum_ = 0.0;
  int t_ = 0;
  bool done_ = false;
  int clipped_orders_ = 0;
};

}  // namespace lpmrl::envs
