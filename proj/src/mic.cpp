#include "cmap/mic.hpp"

#include <limits>
#include <string>

#include "cmap/error.hpp"

namespace cmap {

namespace {

void check_delta(const MicParams& params) {
  if (!(params.delta > 0.0)) throw InvalidArgument("mic: delta must be > 0");
}

}  // namespace

MicParams make_mic_params(const LevelSet& levels_re, const LevelSet& levels_im, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("mic: delta must be > 0");
  return MicParams{make_qam_grid(levels_re, levels_im), delta, std::min(levels_re.v_min(), levels_im.v_min()),
                   std::max(levels_re.v_max(), levels_im.v_max())};
}

std::size_t nearest_point_index(const ComplexPoint& p, std::span<const ComplexPoint> points) {
  if (points.empty()) throw EmptyInput("nearest point search over an empty constellation");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double dr = p.re - points[j].re;
    const double di = p.im - points[j].im;
    const double d = dr * dr + di * di;
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

MicForward mic_forward(const ComplexPoint& p, const MicParams& params) {
  const std::size_t idx = nearest_point_index(p, params.constellation.points());
  return {params.constellation[idx], idx};
}

std::vector<double> mic_soft_weights(const ComplexPoint& p, const MicParams& params) {
  check_delta(params);
  const auto pts = params.constellation.points();
  std::vector<double> logits(pts.size());
  std::vector<double> w(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    logits[j] = -params.delta * std::hypot(p.re - pts[j].re, p.im - pts[j].im);
  }
  soft::softmax<double>(logits, w);
  return w;
}

ComplexPoint mic_backward_value(const ComplexPoint& p, const MicParams& params) {
  const auto w = mic_soft_weights(p, params);
  ComplexPoint out;
  for (std::size_t j = 0; j < w.size(); ++j) {
    out.re += w[j] * params.constellation[j].re;
    out.im += w[j] * params.constellation[j].im;
  }
  return out;
}

GradTable mic_backward_grad(const ComplexPoint& p, const MicParams& params) {
  const auto pts = params.constellation.points();
  const std::size_t n = pts.size();
  const double delta = params.delta;
  const auto w = mic_soft_weights(p, params);

  std::vector<std::string> names;
  names.reserve(2 + 2 * n);
  names.emplace_back("p.re");
  names.emplace_back("p.im");
  for (std::size_t j = 0; j < n; ++j) {
    names.push_back("c[" + std::to_string(j) + "].re");
    names.push_back("c[" + std::to_string(j) + "].im");
  }
  GradTable g(2, std::move(names));

  for (std::size_t m = 0; m < n; ++m) {
    // c_m - out, expanded as sum_j w_j (c_m - c_j) to avoid cancellation.
    double dev_re = 0.0;
    double dev_im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      dev_re += w[j] * (pts[m].re - pts[j].re);
      dev_im += w[j] * (pts[m].im - pts[j].im);
    }
    const double dr = p.re - pts[m].re;
    const double di = p.im - pts[m].im;
    const double r = std::hypot(dr, di);
    const double u_re = r > 0.0 ? dr / r : 0.0;
    const double u_im = r > 0.0 ? di / r : 0.0;
    const double dev[2] = {dev_re, dev_im};
    const double unit[2] = {u_re, u_im};

    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        const double coupling = w[m] * dev[a] * delta * unit[b];
        g.at(a, b) -= coupling;
        g.at(a, 2 + 2 * m + b) = (a == b ? w[m] : 0.0) + coupling;
      }
    }
  }
  return g;
}

DualResult<ComplexPoint> mic_map_point(const ComplexPoint& p, const MicParams& params) {
  check_delta(params);
  const ComplexPoint c = clip(p, params.v_min, params.v_max);
  return straight_through(mic_forward(c, params).point, mic_backward_value(c, params), mic_backward_grad(c, params));
}

}  // namespace cmap
