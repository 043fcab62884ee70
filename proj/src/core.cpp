#include "cmap/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmap/error.hpp"

namespace cmap {

LevelSet::LevelSet(std::vector<double> levels, double v_min, double v_max)
    : levels_(std::move(levels)), v_min_(v_min), v_max_(v_max) {
  if (!(v_min_ < v_max_)) {
    throw InvalidArgument("level set requires v_min < v_max");
  }
  if (levels_.size() < 2) {
    throw InvalidArgument("level set requires at least 2 levels, got " + std::to_string(levels_.size()));
  }
  if (levels_.front() != v_min_ || levels_.back() != v_max_) {
    throw InvalidArgument("level set endpoints must equal v_min and v_max");
  }
  const double step = gap();
  const double tol = 1e-9 * (v_max_ - v_min_);
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    const double d = levels_[i] - levels_[i - 1];
    if (!(d > 0.0)) throw InvalidArgument("levels must be strictly increasing");
    if (std::abs(d - step) > tol) throw InvalidArgument("levels must be uniformly spaced");
  }
}

double LevelSet::gap() const noexcept {
  return (v_max_ - v_min_) / static_cast<double>(levels_.size() - 1);
}

Constellation::Constellation(std::vector<ComplexPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw EmptyInput("constellation must contain at least one point");
}

double clip(double x, double v_min, double v_max) noexcept {
  return std::min(std::max(x, v_min), v_max);
}

ComplexPoint clip(const ComplexPoint& p, double v_min, double v_max) noexcept {
  return {clip(p.re, v_min, v_max), clip(p.im, v_min, v_max)};
}

LevelSet make_uniform_levels(int m, double v_min, double v_max) {
  if (m < 2) throw InvalidArgument("make_uniform_levels: M must be >= 2, got " + std::to_string(m));
  if (!(v_min < v_max)) throw InvalidArgument("make_uniform_levels: v_min must be < v_max");
  std::vector<double> levels(static_cast<std::size_t>(m));
  // v_min + i (v_max - v_min) / (M - 1), written as a weighted mean so that
  // symmetric ranges give exactly symmetric levels.
  for (int i = 0; i < m; ++i) {
    levels[static_cast<std::size_t>(i)] = (v_min * (m - 1 - i) + v_max * i) / (m - 1);
  }
  levels.front() = v_min;
  levels.back() = v_max;
  return LevelSet(std::move(levels), v_min, v_max);
}

Constellation make_qam_grid(const LevelSet& levels_re, const LevelSet& levels_im) {
  std::vector<ComplexPoint> points;
  points.reserve(levels_re.size() * levels_im.size());
  for (double im : levels_im.values()) {
    for (double re : levels_re.values()) points.push_back({re, im});
  }
  return Constellation(std::move(points));
}

std::vector<ComplexPoint> pair_to_complex(std::span<const double> block) {
  if (block.size() % 2 != 0) {
    throw InvalidArgument("pair_to_complex: block length must be even, got " + std::to_string(block.size()));
  }
  std::vector<ComplexPoint> out(block.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {block[2 * k], block[2 * k + 1]};
  return out;
}

std::vector<double> complex_to_pair(std::span<const ComplexPoint> points) {
  std::vector<double> out;
  out.reserve(points.size() * 2);
  for (const auto& p : points) {
    out.push_back(p.re);
    out.push_back(p.im);
  }
  return out;
}

NormalizedBlock power_normalize(std::span<const double> block, double power) {
  if (!(power > 0.0)) throw InvalidArgument("power_normalize: power must be > 0");
  if (block.empty()) throw InvalidArgument("power_normalize: empty block");
  double energy = 0.0;
  for (double x : block) energy += x * x;
  if (energy == 0.0) throw DegenerateInput("power_normalize: block has zero power");

  NormalizedBlock out;
  out.scale = std::sqrt(power * static_cast<double>(block.size()) / energy);
  out.block.resize(block.size());
  std::transform(block.begin(), block.end(), out.block.begin(), [&](double x) { return x * out.scale; });
  return out;
}

std::size_t nearest_level_index(double x, const LevelSet& levels) noexcept {
  x = clip(x, levels.v_min(), levels.v_max());
  std::size_t best = 0;
  double best_d = std::abs(x - levels[0]);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double d = std::abs(x - levels[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ComplexPoint qam_map(const ComplexPoint& p, const LevelSet& levels_re, const LevelSet& levels_im) noexcept {
  return {levels_re[nearest_level_index(p.re, levels_re)], levels_im[nearest_level_index(p.im, levels_im)]};
}

std::size_t qam_index(const ComplexPoint& p, const LevelSet& levels_re, const LevelSet& levels_im) noexcept {
  return nearest_level_index(p.im, levels_im) * levels_re.size() + nearest_level_index(p.re, levels_re);
}

}  // namespace cmap
