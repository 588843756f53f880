#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include <boost/math/special_functions/digamma.hpp>

#include "lpmrl/core.hpp"
#include "lpmrl/policies/features.hpp"

namespace lpmrl::policies {

/// Maps raw (t, W) into the unit square for the Fourier basis.
struct StateNormalizer {
  double time_scale = 1.0;
  double wealth_max = 4.0;

  Vector operator()(const Vector& s) const {
    Vector n(2);
    n << std::clamp(s[0] / time_scale, 0.0, 1.0), std::clamp(s[1] / wealth_max, 0.0, 1.0);
    return n;
  }
};

/// Product policy: a1 ~ Normal(mu(s), sigma(s)^2), a2 ~ Beta(alpha(s), beta(s)).
///
/// All four heads are linear in the same Fourier features; sigma = softplus(.)
/// floored at `sigma_floor`, alpha and beta = 1 + softplus(.). Parameters are laid
/// out as [mu | sigma | alpha | beta].
class GaussianBeta {
 public:
  using action_type = Vector;

  struct Heads {
    double mu, sigma, alpha, beta;
    double z_sigma, z_alpha, z_beta;
  };

  static constexpr double kBetaEdge = 1e-9;

  explicit GaussianBeta(StateNormalizer normalizer, int order = 3, double sigma_floor = 1e-3)
      : normalizer_(normalizer), order_(order), sigma_floor_(sigma_floor) {
    feature_dim_ = fourier_features(Vector::Zero(2), order_).size();
    theta_ = Vector::Zero(4 * feature_dim_);
  }

  Eigen::Index feature_dim() const { return feature_dim_; }

  Vector features(const Vector& s) const { return fourier_features(normalizer_(s), order_); }

  Heads heads(const Vector& phi) const {
    const Eigen::Index f = feature_dim_;
    Heads h{};
    h.mu = phi.dot(theta_.segment(0, f));
    h.z_sigma = phi.dot(theta_.segment(f, f));
    h.z_alpha = phi.dot(theta_.segment(2 * f, f));
    h.z_beta = phi.dot(theta_.segment(3 * f, f));
    h.sigma = std::max(softplus(h.z_sigma), sigma_floor_);
    h.alpha = 1.0 + softplus(h.z_alpha);
    h.beta = 1.0 + softplus(h.z_beta);
    return h;
  }

  Vector sample(const Vector& s, Rng& rng) const {
    const Heads h = heads(features(s));
    Vector a(2);
    a[0] = std::normal_distribution<double>(h.mu, h.sigma)(rng);
    const double x = std::gamma_distribution<double>(h.alpha, 1.0)(rng);
    const double y = std::gamma_distribution<double>(h.beta, 1.0)(rng);
    a[1] = std::clamp(x / (x + y), kBetaEdge, 1.0 - kBetaEdge);
    return a;
  }

  double log_prob(const Vector& s, const Vector& a) const {
    const Heads h = heads(features(s));
    const double z = (a[0] - h.mu) / h.sigma;
    const double log_normal = -0.5 * z * z - std::log(h.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    const double log_beta = (h.alpha - 1.0) * std::log(a[1]) + (h.beta - 1.0) * std::log1p(-a[1]) -
                            (std::lgamma(h.alpha) + std::lgamma(h.beta) - std::lgamma(h.alpha + h.beta));
    return log_normal + log_beta;
  }

  /// Gradient of log_prob with respect to all four parameter blocks.
  Vector score(const Vector& s, const Vector& a) const {
    const Vector phi = features(s);
    const Heads h = heads(phi);
    const Eigen::Index f = feature_dim_;
    const double diff = a[0] - h.mu;
    const double var = h.sigma * h.sigma;
    const bool floored = softplus(h.z_sigma) < sigma_floor_;
    const double d_sigma = floored ? 0.0 : (diff * diff / (var * h.sigma) - 1.0 / h.sigma) * sigmoid(h.z_sigma);
    const double psi_sum = boost::math::digamma(h.alpha + h.beta);
    const double d_alpha = (std::log(a[1]) - boost::math::digamma(h.alpha) + psi_sum) * sigmoid(h.z_alpha);
    const double d_beta = (std::log1p(-a[1]) - boost::math::digamma(h.beta) + psi_sum) * sigmoid(h.z_beta);
    Vector g(4 * f);
    g.segment(0, f) = (diff / var) * phi;
    g.segment(f, f) = d_sigma * phi;
    g.segment(2 * f, f) = d_alpha * phi;
    g.segment(3 * f, f) = d_beta * phi;
    return g;
  }

  Vector baseline_features(const Vector& s) const { return features(s); }

  /// [phi, a1 * phi, a2 * phi], a linear regression basis for r(s, a).
  Vector state_action_features(const Vector& s, const Vector& a) const {
    const Vector phi = features(s);
    Vector x(3 * feature_dim_);
    x << phi, a[0] * phi, a[1] * phi;
    return x;
  }

  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta) {
    require(theta.size() == theta_.size(), "GaussianBeta: dimension mismatch");
    theta_ = theta;
  }

  double sigma_floor() const { return sigma_floor_; }
  const StateNormalizer& normalizer() const { return normalizer_; }

 private:
  StateNormalizer normalizer_;
  int order_ = 3;
  double sigma_floor_ = 1e-3;
  Eigen::Index feature_dim_ = 0;
  Vector theta_;
};

/// Samples an action and returns it with its score.
inline std::pair<Vector, Vector> gaussian_beta(const Vector& theta, const GaussianBeta& shape,
                                               const Vector& state, Rng& rng) {
  GaussianBeta pi = shape;
  pi.set_params(theta);
  Vector a = pi.sample(state, rng);
  Vector g = pi.score(state, a);
  return {std::move(a), std::move(g)};
}

}  // namespace lpmrl::policies
