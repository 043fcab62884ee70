#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmap {

inline constexpr double kDefaultVMin = -2.0;
inline constexpr double kDefaultVMax = 2.0;

/// One constellation symbol: the real and imaginary amplitude of a point.
struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;

  friend bool operator==(const ComplexPoint&, const ComplexPoint&) = default;
};

/// M uniformly spaced quantization levels covering [v_min, v_max] on one axis.
///
/// Invariants: M >= 2, levels strictly increasing, first level equals v_min,
/// last equals v_max, spacing uniform.
class LevelSet {
 public:
  /// Validates the invariants above; throws InvalidArgument otherwise.
  /// Spacing must be uniform to within 1e-9 of the range so values read back
  /// from disk are accepted.
  LevelSet(std::vector<double> levels, double v_min, double v_max);

  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  std::span<const double> values() const noexcept { return levels_; }
  double v_min() const noexcept { return v_min_; }
  double v_max() const noexcept { return v_max_; }
  /// Constant distance between adjacent levels, (v_max - v_min) / (M - 1).
  double gap() const noexcept;

  friend bool operator==(const LevelSet&, const LevelSet&) = default;

 private:
  std::vector<double> levels_;
  double v_min_;
  double v_max_;
};

/// Ordered, non-empty set of constellation points.
class Constellation {
 public:
  explicit Constellation(std::vector<ComplexPoint> points);

  std::size_t size() const noexcept { return points_.size(); }
  const ComplexPoint& operator[](std::size_t i) const { return points_[i]; }
  ComplexPoint& operator[](std::size_t i) { return points_[i]; }
  std::span<const ComplexPoint> points() const noexcept { return points_; }

  friend bool operator==(const Constellation&, const Constellation&) = default;

 private:
  std::vector<ComplexPoint> points_;
};

double clip(double x, double v_min, double v_max) noexcept;
ComplexPoint clip(const ComplexPoint& p, double v_min, double v_max) noexcept;

/// Levels c_i = v_min + (i-1)(v_max - v_min)/(M-1), i = 1..M.
LevelSet make_uniform_levels(int m, double v_min = kDefaultVMin, double v_max = kDefaultVMax);

/// Cartesian product of the two level sets in canonical order: imaginary
/// index outer, real index inner, so point (i_re, i_im) sits at
/// i_im * M_re + i_re.
Constellation make_qam_grid(const LevelSet& levels_re, const LevelSet& levels_im);

/// (x0, x1, x2, x3, ...) -> ((x0, x1), (x2, x3), ...). Throws InvalidArgument
/// on odd length.
std::vector<ComplexPoint> pair_to_complex(std::span<const double> block);
std::vector<double> complex_to_pair(std::span<const ComplexPoint> points);

struct NormalizedBlock {
  std::vector<double> block;
  /// Multiplier applied to the input, sqrt(P * B / sum x^2).
  double scale = 1.0;
};

/// Rescales `block` so that its mean square equals `power`. Throws
/// DegenerateInput for an all-zero block, InvalidArgument for power <= 0 or
/// an empty block.
NormalizedBlock power_normalize(std::span<const double> block, double power);

/// Index of the level nearest to x (after clipping); ties go to the lower index.
std::size_t nearest_level_index(double x, const LevelSet& levels) noexcept;

/// Uniform per-axis quantization onto the QAM grid.
ComplexPoint qam_map(const ComplexPoint& p, const LevelSet& levels_re, const LevelSet& levels_im) noexcept;

/// Canonical grid index of qam_map(p).
std::size_t qam_index(const ComplexPoint& p, const LevelSet& levels_re, const LevelSet& levels_im) noexcept;

}  // namespace cmap
