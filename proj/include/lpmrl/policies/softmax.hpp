#pragma once

#include <cmath>
#include <random>
#include <utility>

#include "lpmrl/core.hpp"
#include "lpmrl/policies/features.hpp"

namespace lpmrl::policies {

/// Softmax with max-subtraction.
inline Vector softmax(const Vector& logits) {
  require(logits.size() > 0, "softmax: empty logits");
  Vector p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

inline int sample_discrete(const Vector& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

/// Gibbs policy over arms with pi(a) proportional to exp(theta_a).
class GibbsStateless {
 public:
  using action_type = int;

  explicit GibbsStateless(int arms) : theta_(Vector::Zero(arms)) {
    require(arms >= 1, "GibbsStateless: need at least one arm");
  }
  explicit GibbsStateless(Vector theta) : theta_(std::move(theta)) {
    require(theta_.size() >= 1 && theta_.allFinite(), "GibbsStateless: invalid parameters");
  }

  Vector probabilities() const { return softmax(theta_); }

  int sample(const Vector&, Rng& rng) const { return sample_discrete(probabilities(), rng); }

  double log_prob(const Vector&, int a) const {
    const double m = theta_.maxCoeff();
    return theta_[a] - m - std::log((theta_.array() - m).exp().sum());
  }

  /// onehot(a) - pi
  Vector score(const Vector&, int a) const {
    Vector g = -probabilities();
    g[a] += 1.0;
    return g;
  }

  Vector baseline_features(const Vector&) const { return Vector::Ones(1); }

  Vector state_action_features(const Vector&, int a) const {
    Vector x = Vector::Zero(theta_.size());
    x[a] = 1.0;
    return x;
  }

  int action_count() const { return static_cast<int>(theta_.size()); }
  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta) {
    require(theta.size() == theta_.size(), "GibbsStateless: dimension mismatch");
    theta_ = theta;
  }

 private:
  Vector theta_;
};

/// Samples an arm and returns it with its score.
inline std::pair<int, Vector> gibbs_stateless(const Vector& theta, Rng& rng) {
  GibbsStateless pi(theta);
  const int a = pi.sample(Vector(), rng);
  return {a, pi.score(Vector(), a)};
}

/// Gibbs policy with logits phi(s, a)^T theta over a block-structured linear basis.
class GibbsLinear {
 public:
  using action_type = int;

  explicit GibbsLinear(LinearPerActionBasis basis)
      : basis_(basis), theta_(Vector::Zero(basis.dimension())) {}

  GibbsLinear(LinearPerActionBasis basis, Vector theta) : basis_(basis), theta_(std::move(theta)) {
    require(theta_.size() == basis_.dimension(), "GibbsLinear: parameter dimension mismatch");
  }

  Vector probabilities(const Vector& s) const {
    const Vector phi = basis_.state_features(s);
    const Eigen::Index b = basis_.block_size();
    Vector logits(basis_.action_count);
    for (int a = 0; a < basis_.action_count; ++a) logits[a] = phi.dot(theta_.segment(b * a, b));
    return softmax(logits);
  }

  int sample(const Vector& s, Rng& rng) const { return sample_discrete(probabilities(s), rng); }

  double log_prob(const Vector& s, int a) const { return std::log(probabilities(s)[a]); }

  /// phi(s, a) - sum_b pi(b | s) phi(s, b)
  Vector score(const Vector& s, int a) const {
    const Vector phi = basis_.state_features(s);
    const Vector p = probabilities(s);
    const Eigen::Index b = basis_.block_size();
    Vector g(basis_.dimension());
    for (int k = 0; k < basis_.action_count; ++k) {
      g.segment(b * k, b) = ((k == a ? 1.0 : 0.0) - p[k]) * phi;
    }
    return g;
  }

  Vector baseline_features(const Vector& s) const { return basis_.state_features(s); }
  Vector state_action_features(const Vector& s, int a) const { return basis_.features(s, a); }

  const LinearPerActionBasis& basis() const { return basis_; }
  const Vector& params() const { return theta_; }
  void set_params(const Vector& theta) {
    require(theta.size() == theta_.size(), "GibbsLinear: dimension mismatch");
    theta_ = theta;
  }

 private:
  LinearPerActionBasis basis_;
  Vector theta_;
};

/// Samples an action from the linear Gibbs policy and returns it with its score.
inline std::pair<int, Vector> gibbs_linear(const Vector& theta, const LinearPerActionBasis& basis,
                                           const Vector& state, Rng& rng) {
  GibbsLinear pi(basis, theta);
  const int a = pi.sample(state, rng);
  return {a, pi.score(state, a)};
}

}  // namespace lpmrl::policies
