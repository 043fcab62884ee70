#pragma once

// Independent quad-precision transcription of the MRC soft value, used as a
// reference for partial derivatives where long double differences are
// limited by rounding noise.

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cmap/mrc.hpp"

namespace quad {

using q = __float128;

inline q mrc_soft(q x, const std::vector<q>& d, const std::vector<q>& levels, q delta) {
  const std::size_t k = d.size();
  std::vector<q> logit(k);
  q top = -1e300;
  for (std::size_t j = 0; j < k; ++j) {
    logit[j] = -delta * fabsq(x - d[j]);
    if (logit[j] > top) top = logit[j];
  }
  q total = 0;
  for (std::size_t j = 0; j < k; ++j) total += expq(logit[j] - top);
  q d_hat = 0;
  q c_hat = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const q w = expq(logit[j] - top) / total;
    d_hat += w * d[j];
    c_hat += w * levels[j];
  }
  const q gap = (levels.back() - levels.front()) / static_cast<q>(levels.size() - 1);
  return c_hat + gap / (1 + expq(-delta * (x - d_hat)));
}

/// Max relative error of mrc_backward_grad against quad central differences
/// with a tiny step; denominator max(|a|, |n|, 1e-8).
inline double mrc_max_rel_error(double x, const cmap::BoundarySet& d, const cmap::LevelSet& levels) {
  const auto analytic = cmap::mrc_backward_grad(x, d, levels);
  std::vector<q> lv(levels.values().begin(), levels.values().end());
  std::vector<q> theta{static_cast<q>(x)};
  theta.insert(theta.end(), d.boundaries.begin(), d.boundaries.end());
  const q h = 1e-8;
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto plus = theta;
    auto minus = theta;
    plus[i] += h;
    minus[i] -= h;
    auto eval = [&](const std::vector<q>& t) {
      return mrc_soft(t[0], std::vector<q>(t.begin() + 1, t.end()), lv, static_cast<q>(d.delta));
    };
    const double numeric = static_cast<double>((eval(plus) - eval(minus)) / (2 * h));
    const double a = analytic.row(0)[i];
    worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8}));
  }
  return worst;
}

}  // namespace quad
