#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lpmrl/core.hpp"

namespace lpmrl::policies {

/// Fully coupled Fourier basis cos(pi c^T s), c in {0..order}^d.
///
/// Coefficient vectors are enumerated with the first state component most
/// significant. Components outside [0, 1] are clipped; `clipped` reports it.
inline Vector fourier_features(const Vector& state, int order = 3, bool* clipped = nullptr) {
  require(order >= 0, "fourier_features: order must be non-negative");
  const Eigen::Index d = state.size();
  const int base = order + 1;
  Eigen::Index count = 1;
  for (Eigen::Index i = 0; i < d; ++i) count *= base;

  Vector s = state;
  bool any_clipped = false;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double c = std::clamp(s[i], 0.0, 1.0);
    any_clipped = any_clipped || c != s[i];
    s[i] = c;
  }
  if (clipped != nullptr) *clipped = any_clipped;

  Vector out(count);
  for (Eigen::Index j = 0; j < count; ++j) {
    Eigen::Index rem = j;
    double dot = 0.0;
    for (Eigen::Index i = d; i-- > 0;) {
      dot += static_cast<double>(rem % base) * s[i];
      rem /= base;
    }
    out[j] = std::cos(std::numbers::pi * dot);
  }
  return out;
}

/// phi(s) = [1, s_1, ..., s_d], replicated in one block per action.
struct LinearPerActionBasis {
  Eigen::Index state_dim = 0;
  int action_count = 0;

  Eigen::Index block_size() const { return state_dim + 1; }
  Eigen::Index dimension() const { return block_size() * action_count; }

  Vector state_features(const Vector& s) const {
    require(s.size() == state_dim, "LinearPerActionBasis: state dimension mismatch");
    Vector phi(block_size());
    phi[0] = 1.0;
    phi.tail(state_dim) = s;
    return phi;
  }

  Vector features(const Vector& s, int action) const {
    require(action >= 0 && action < action_count, "LinearPerActionBasis: action out of range");
    Vector x = Vector::Zero(dimension());
    x.segment(block_size() * action, block_size()) = state_features(s);
    return x;
  }
};

}  // namespace lpmrl::policies
