#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cmap/core.hpp"
#include "cmap/grad.hpp"
#include "cmap/mrc.hpp"
#include "cmap/soft.hpp"

namespace cmap {

/// Irregular-constellation mapping: N freely learnable points. The clip
/// range applies to inputs only; points may leave it during training.
struct MicParams {
  Constellation constellation;
  double delta = kDefaultDelta;
  double v_min = kDefaultVMin;
  double v_max = kDefaultVMax;

  friend bool operator==(const MicParams&, const MicParams&) = default;
};

/// Points initialised to the QAM grid of the two level sets.
MicParams make_mic_params(const LevelSet& levels_re, const LevelSet& levels_im, double delta = kDefaultDelta);

struct MicForward {
  ComplexPoint point;
  std::size_t index = 0;
};

/// Nearest constellation point by Euclidean distance (squared distances
/// compared), lowest index on ties. `p` must already be clipped.
MicForward mic_forward(const ComplexPoint& p, const MicParams& params);

/// Brute-force nearest index over an arbitrary point list, same tie rule.
std::size_t nearest_point_index(const ComplexPoint& p, std::span<const ComplexPoint> points);

/// sum_j softmax(-delta |p - c_j|)_j c_j, evaluated per component.
template <typename Real>
std::pair<Real, Real> mic_soft_value(Real p_re, Real p_im, std::span<const Real> c_re, std::span<const Real> c_im,
                                     Real delta) {
  const std::size_t n = c_re.size();
  std::vector<Real> logits(n);
  std::vector<Real> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    logits[j] = -delta * std::hypot(p_re - c_re[j], p_im - c_im[j]);
  }
  soft::softmax<Real>(logits, w);
  Real re = 0;
  Real im = 0;
  for (std::size_t j = 0; j < n; ++j) {
    re += w[j] * c_re[j];
    im += w[j] * c_im[j];
  }
  return {re, im};
}

/// Softmax weights of the soft assignment (exposed for diagnostics/tests).
std::vector<double> mic_soft_weights(const ComplexPoint& p, const MicParams& params);

ComplexPoint mic_backward_value(const ComplexPoint& p, const MicParams& params);

/// Jacobian of mic_backward_value. Rows: out.re, out.im. Columns: "p.re",
/// "p.im", then "c[j].re", "c[j].im" for each point. A distance term whose
/// point coincides with p contributes no derivative.
GradTable mic_backward_grad(const ComplexPoint& p, const MicParams& params);

/// Clip, hard nearest-point forward value, soft gradients.
DualResult<ComplexPoint> mic_map_point(const ComplexPoint& p, const MicParams& params);

}  // namespace cmap
