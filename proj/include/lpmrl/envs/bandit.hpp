#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "lpmrl/core.hpp"
#include "lpmrl/mdp.hpp"

namespace lpmrl::envs {

enum class Arm : int { A = 0, B = 1, C = 2 };

/// Arm A ~ Normal, arm B ~ Normal, arm C ~ Pareto(scale, shape).
///
/// The second argument of each normal is a standard deviation.
struct BanditParams {
  double a_mean = 1.0;
  double a_stddev = 1.0;
  double b_mean = 4.0;
  double b_stddev = 6.0;
  double c_scale = 1.0;
  double c_shape = 1.5;

  bool operator==(const BanditParams&) const = default;
};

inline double bandit_step(Arm arm, Rng& rng, const BanditParams& p = {}) {
  switch (arm) {
    case Arm::A: return std::normal_distribution<double>(p.a_mean, p.a_stddev)(rng);
    case Arm::B: return std::normal_distribution<double>(p.b_mean, p.b_stddev)(rng);
    case Arm::C: {
      // inverse CDF on (0, 1]
      const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      return p.c_scale * std::pow(u, -1.0 / p.c_shape);
    }
  }
  throw PreconditionError("bandit_step: invalid arm");
}

/// Stateless one-step environment over three arms.
class Bandit {
 public:
  using action_type = int;
  static constexpr int kArmCount = 3;

  explicit Bandit(BanditParams params = {}) : params_(params) {}

  Vector reset(Rng&) {
    done_ = false;
    return Vector();
  }
  Vector reset_to(const Vector&) {
    done_ = false;
    return Vector();
  }

  StepResult step(int arm, Rng& rng) {
    if (done_) throw std::logic_error("Bandit: step after terminal");
    require(arm >= 0 && arm < kArmCount, "Bandit: invalid arm");
    done_ = true;
    return {Vector(), bandit_step(static_cast<Arm>(arm), rng, params_), true};
  }

  const BanditParams& params() const { return params_; }

 private:
  BanditParams params_;
  bool done_ = false;
};

}  // namespace lpmrl::envs
