#include "cmap/mrc.hpp"

#include <cmath>

#include "cmap/error.hpp"

namespace cmap {

namespace {

void check_sizes(const BoundarySet& d, const LevelSet& levels) {
  if (d.boundaries.size() + 1 != levels.size()) {
    throw InvalidArgument("mrc: expected " + std::to_string(levels.size() - 1) + " boundaries for " +
                          std::to_string(levels.size()) + " levels, got " + std::to_string(d.boundaries.size()));
  }
  if (!(d.delta > 0.0)) throw InvalidArgument("mrc: delta must be > 0");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct SoftTerms {
  std::vector<double> w;
  double d_hat = 0.0;
  double c_hat = 0.0;
};

SoftTerms soft_terms(double x, const BoundarySet& d, const LevelSet& levels) {
  const std::size_t k = d.boundaries.size();
  std::vector<double> logits(k);
  SoftTerms t;
  t.w.resize(k);
  for (std::size_t j = 0; j < k; ++j) logits[j] = -d.delta * std::abs(x - d.boundaries[j]);
  soft::softmax<double>(logits, t.w);
  for (std::size_t j = 0; j < k; ++j) {
    t.d_hat += t.w[j] * d.boundaries[j];
    t.c_hat += t.w[j] * levels[j];
  }
  return t;
}

// Fills out[0] = d out / dx and out[1 + m] = d out / d d_m.
void soft_gradient(double x, const BoundarySet& d, const LevelSet& levels, std::span<double> out) {
  const std::size_t k = d.boundaries.size();
  const double delta = d.delta;
  const SoftTerms t = soft_terms(x, d, levels);

  // L_m - c_hat and d_m - d_hat expanded as weighted differences so the
  // dominant term cancels exactly instead of through rounding.
  std::vector<double> level_dev(k, 0.0);
  std::vector<double> boundary_dev(k, 0.0);
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t j = 0; j < k; ++j) {
      level_dev[m] += t.w[j] * (levels[m] - levels[j]);
      boundary_dev[m] += t.w[j] * (d.boundaries[m] - d.boundaries[j]);
    }
  }

  double dc_dx = 0.0;
  double dd_dx = 0.0;
  std::vector<double> s(k);
  for (std::size_t m = 0; m < k; ++m) {
    s[m] = sign(x - d.boundaries[m]);
    dc_dx -= delta * t.w[m] * level_dev[m] * s[m];
    dd_dx -= delta * t.w[m] * boundary_dev[m] * s[m];
  }

  const double u = delta * (x - t.d_hat);
  const double sig_prime = soft::sigmoid(u) * soft::sigmoid(-u);
  const double gap = levels.gap();

  out[0] = dc_dx + gap * sig_prime * delta * (1.0 - dd_dx);
  for (std::size_t m = 0; m < k; ++m) {
    const double dc_dd = delta * t.w[m] * level_dev[m] * s[m];
    const double dd_dd = t.w[m] + delta * t.w[m] * boundary_dev[m] * s[m];
    out[1 + m] = dc_dd - gap * sig_prime * delta * dd_dd;
  }
}

}  // namespace

BoundarySet midpoint_boundaries(const LevelSet& levels, double delta) {
  BoundarySet d;
  d.delta = delta;
  d.boundaries.reserve(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) d.boundaries.push_back(0.5 * (levels[i] + levels[i + 1]));
  return d;
}

MrcParams make_mrc_params(const LevelSet& levels, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("mrc: delta must be > 0");
  return MrcParams{midpoint_boundaries(levels, delta), midpoint_boundaries(levels, delta), levels};
}

std::vector<std::string> validate_boundaries(const BoundarySet& d, const LevelSet& levels) {
  check_sizes(d, levels);
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < d.boundaries.size(); ++k) {
    const double b = d.boundaries[k];
    if (!(levels[k] < b && b < levels[k + 1])) {
      warnings.push_back("boundary d[" + std::to_string(k) + "]=" + std::to_string(b) +
                         " is not between levels " + std::to_string(levels[k]) + " and " +
                         std::to_string(levels[k + 1]));
    }
    if (k > 0 && !(d.boundaries[k - 1] < b)) {
      warnings.push_back("boundaries d[" + std::to_string(k - 1) + "], d[" + std::to_string(k) +
                         "] are not ascending");
    }
  }
  return warnings;
}

MrcForward mrc_forward(double x, const BoundarySet& d, const LevelSet& levels) {
  check_sizes(d, levels);
  std::size_t k = 0;
  double best = std::abs(x - d.boundaries[0]);
  for (std::size_t j = 1; j < d.boundaries.size(); ++j) {
    const double dist = std::abs(x - d.boundaries[j]);
    if (dist < best) {
      best = dist;
      k = j;
    }
  }
  // Heaviside(0) = 0: a point exactly on the boundary takes the lower level.
  const std::size_t idx = x > d.boundaries[k] ? k + 1 : k;
  return {levels[idx], idx};
}

double mrc_backward_value(double x, const BoundarySet& d, const LevelSet& levels) {
  check_sizes(d, levels);
  const SoftTerms t = soft_terms(x, d, levels);
  return t.c_hat + soft::sigmoid(d.delta * (x - t.d_hat)) * levels.gap();
}

GradTable mrc_backward_grad(double x, const BoundarySet& d, const LevelSet& levels) {
  check_sizes(d, levels);
  std::vector<std::string> names;
  names.reserve(d.boundaries.size() + 1);
  names.emplace_back("x");
  for (std::size_t j = 0; j < d.boundaries.size(); ++j) names.push_back("d[" + std::to_string(j) + "]");
  GradTable g(1, std::move(names));
  soft_gradient(x, d, levels, g.row(0));
  return g;
}

DualResult<ComplexPoint> mrc_map_point(const ComplexPoint& p, const MrcParams& params) {
  check_sizes(params.re, params.levels);
  check_sizes(params.im, params.levels);
  const ComplexPoint c = clip(p, params.levels.v_min(), params.levels.v_max());

  const std::size_t k_re = params.re.boundaries.size();
  const std::size_t k_im = params.im.boundaries.size();
  std::vector<std::string> names;
  names.reserve(2 + k_re + k_im);
  names.emplace_back("p.re");
  names.emplace_back("p.im");
  for (std::size_t j = 0; j < k_re; ++j) names.push_back("d_re[" + std::to_string(j) + "]");
  for (std::size_t j = 0; j < k_im; ++j) names.push_back("d_im[" + std::to_string(j) + "]");
  GradTable g(2, std::move(names));

  std::vector<double> axis(1 + std::max(k_re, k_im));
  soft_gradient(c.re, params.re, params.levels, axis);
  g.at(0, 0) = axis[0];
  for (std::size_t j = 0; j < k_re; ++j) g.at(0, 2 + j) = axis[1 + j];
  soft_gradient(c.im, params.im, params.levels, axis);
  g.at(1, 1) = axis[0];
  for (std::size_t j = 0; j < k_im; ++j) g.at(1, 2 + k_re + j) = axis[1 + j];

  const ComplexPoint forward{mrc_forward(c.re, params.re, params.levels).level,
                             mrc_forward(c.im, params.im, params.levels).level};
  const ComplexPoint backward{mrc_backward_value(c.re, params.re, params.levels),
                              mrc_backward_value(c.im, params.im, params.levels)};
  return straight_through(forward, backward, std::move(g));
}

}  // namespace cmap
