#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace cmap::soft {

// Numerically stable building blocks shared by the soft (backward) passes.
// Templated on the floating type so gradient checks can evaluate the same
// formulas in extended precision.

template <typename Real>
Real sigmoid(Real u) {
  if (u >= Real(0)) return Real(1) / (Real(1) + std::exp(-u));
  const Real e = std::exp(u);
  return e / (Real(1) + e);
}

/// Softmax of `logits` into `weights` with max subtraction.
template <typename Real>
void softmax(std::span<const Real> logits, std::span<Real> weights) {
  const Real top = *std::max_element(logits.begin(), logits.end());
  Real sum = 0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    weights[j] = std::exp(logits[j] - top);
    sum += weights[j];
  }
  for (auto& w : weights) w /= sum;
}

template <typename Real>
std::vector<Real> widen(std::span<const double> values) {
  return std::vector<Real>(values.begin(), values.end());
}

}  // namespace cmap::soft
