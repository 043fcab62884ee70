#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmap/core.hpp"
#include "cmap/grad.hpp"
#include "cmap/soft.hpp"

namespace cmap {

inline constexpr double kDefaultDelta = 20.0;

/// Learnable decision boundaries for one axis. boundaries.size() must be
/// M - 1 for the paired LevelSet. Order is not enforced.
struct BoundarySet {
  std::vector<double> boundaries;
  /// Sharpness of the soft approximation used in the backward pass.
  double delta = kDefaultDelta;

  friend bool operator==(const BoundarySet&, const BoundarySet&) = default;
};

/// Regular-constellation mapping: fixed uniform levels shared by both axes,
/// independent learnable boundaries per axis.
struct MrcParams {
  BoundarySet re;
  BoundarySet im;
  LevelSet levels;

  friend bool operator==(const MrcParams&, const MrcParams&) = default;
};

/// Boundaries halfway between adjacent levels. With these the mapping is
/// exactly uniform QAM.
BoundarySet midpoint_boundaries(const LevelSet& levels, double delta = kDefaultDelta);
MrcParams make_mrc_params(const LevelSet& levels, double delta = kDefaultDelta);

/// Soft checks: returns one message per violated ordering/interleaving
/// condition (levels[k] < d_k < levels[k+1], ascending). Never throws on
/// ordering, but throws InvalidArgument if the boundary count is not M - 1.
std::vector<std::string> validate_boundaries(const BoundarySet& d, const LevelSet& levels);

struct MrcForward {
  double level = 0.0;
  /// Index of `level` within the LevelSet.
  std::size_t level_index = 0;
};

/// Hard forward pass. k = argmin_j |x - d_j| (lowest j on ties); returns
/// levels[k + 1] when x > d_k, else levels[k]. `x` must already be clipped.
MrcForward mrc_forward(double x, const BoundarySet& d, const LevelSet& levels);

/// Soft surrogate: c_hat + sigmoid(delta (x - d_hat)) * gap, where d_hat and
/// c_hat are softmax(-delta |x - d_j|)-weighted sums of the boundaries and of
/// the lower levels levels[0..M-2].
template <typename Real>
Real mrc_soft_value(Real x, std::span<const Real> boundaries, std::span<const Real> levels, Real delta) {
  const std::size_t k = boundaries.size();
  const Real gap = (levels.back() - levels.front()) / static_cast<Real>(levels.size() - 1);
  std::vector<Real> logits(k);
  std::vector<Real> w(k);
  for (std::size_t j = 0; j < k; ++j) logits[j] = -delta * std::abs(x - boundaries[j]);
  soft::softmax<Real>(logits, w);
  Real d_hat = 0;
  Real c_hat = 0;
  for (std::size_t j = 0; j < k; ++j) {
    d_hat += w[j] * boundaries[j];
    c_hat += w[j] * levels[j];
  }
  return c_hat + soft::sigmoid(delta * (x - d_hat)) * gap;
}

double mrc_backward_value(double x, const BoundarySet& d, const LevelSet& levels);

/// Exact partials of mrc_backward_value. One output row; columns "x",
/// "d[0]" .. "d[M-2]". sign(0) = 0 inside the |x - d_j| derivative.
GradTable mrc_backward_grad(double x, const BoundarySet& d, const LevelSet& levels);

/// Clips both axes, then applies the per-axis forward and soft passes.
/// Gradient columns: "p.re", "p.im", "d_re[j]"..., "d_im[j]"...
DualResult<ComplexPoint> mrc_map_point(const ComplexPoint& p, const MrcParams& params);

}  // namespace cmap
