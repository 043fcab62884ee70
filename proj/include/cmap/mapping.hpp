#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cmap/core.hpp"
#include "cmap/grad.hpp"
#include "cmap/mic.hpp"
#include "cmap/mrc.hpp"

namespace cmap {

/// Uniform QAM baseline; nothing is learnable.
struct QamParams {
  LevelSet levels;

  friend bool operator==(const QamParams&, const QamParams&) = default;
};

/// Mapping disabled: symbols pass through unquantized (after clipping).
struct IdentityParams {
  double v_min = kDefaultVMin;
  double v_max = kDefaultVMax;

  friend bool operator==(const IdentityParams&, const IdentityParams&) = default;
};

using MappingParams = std::variant<QamParams, MrcParams, MicParams, IdentityParams>;

enum class MappingKind { qam, mrc, mic, identity };

MappingKind kind_of(const MappingParams& params) noexcept;
std::string to_string(MappingKind kind);
/// Throws InvalidArgument on unknown names.
MappingKind parse_mapping_kind(const std::string& name);

/// Default initialisation: M levels per axis over [v_min, v_max]. MRC starts
/// at midpoint boundaries and MIC at the M x M QAM grid, so both begin as
/// plain QAM.
MappingParams make_mapping(MappingKind kind, int m, double delta = kDefaultDelta, double v_min = kDefaultVMin,
                           double v_max = kDefaultVMax);

/// Hard value plus soft gradients for any mapping. Columns are "p.re",
/// "p.im" followed by learnable_names(params).
DualResult<ComplexPoint> map_point(const ComplexPoint& p, const MappingParams& params);

/// Hard forward value only (clips first); cheaper than map_point.
ComplexPoint map_value(const ComplexPoint& p, const MappingParams& params);

/// Soft (backward) value of the mapping, evaluated in any floating type.
/// Used by gradient checks. `learnable` overrides the stored parameters and
/// follows learnable_names() order.
template <typename Real>
std::pair<Real, Real> soft_map_value(Real p_re, Real p_im, const MappingParams& params,
                                     std::span<const Real> learnable);

/// Index of the finite output point a sample is assigned to: canonical grid
/// index for QAM/MRC, nearest-point index for MIC. Identity has no clusters
/// and throws InvalidArgument.
std::size_t cluster_index(const ComplexPoint& p, const MappingParams& params);

/// The finite set of transmittable points (grid or learned constellation).
std::vector<ComplexPoint> finite_points(const MappingParams& params);

std::size_t learnable_count(const MappingParams& params) noexcept;
/// MRC: d_re[...], d_im[...]. MIC: c[j].re, c[j].im interleaved. QAM and
/// identity: empty.
std::vector<std::string> learnable_names(const MappingParams& params);
std::vector<double> get_learnable(const MappingParams& params);
/// Throws ShapeMismatch if values.size() != learnable_count(params).
void set_learnable(MappingParams& params, std::span<const double> values);

/// Warnings for MRC boundaries that lost ordering/interleaving; empty for
/// other mappings.
std::vector<std::string> validate_mapping(const MappingParams& params);

}  // namespace cmap
