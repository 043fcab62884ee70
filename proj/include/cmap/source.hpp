#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cmap/core.hpp"

namespace cmap {

enum class SourceKind { uniform, gaussian, gaussian_mixture, file };

std::string to_string(SourceKind kind);
SourceKind parse_source_kind(const std::string& name);

/// Synthetic stand-in for an encoder's output distribution. Every sample is
/// clipped to [v_min, v_max].
struct SourceSpec {
  SourceKind kind = SourceKind::gaussian;
  /// uniform: sample range.
  double low = kDefaultVMin;
  double high = kDefaultVMax;
  /// gaussian uses the first entry; the mixture uses all of them.
  std::vector<double> means{0.0};
  std::vector<double> stds{1.0};
  std::vector<double> weights{1.0};
  /// file: text file of whitespace/comma separated reals, resampled with
  /// replacement.
  std::string path;
  std::vector<double> file_values;
  double v_min = kDefaultVMin;
  double v_max = kDefaultVMax;

  /// Throws InvalidArgument naming the offending parameter.
  void validate() const;
};

/// Two-component Gaussian mixture, means +-0.35, std 0.45, equal weights,
/// clipped to [-2, 2]. Roughly the bimodal, centre-heavy shape of a trained
/// encoder's outputs.
SourceSpec mixture_preset();

/// Loads `file_values` for file sources (no-op otherwise). Throws IoError.
SourceSpec resolve_source(SourceSpec spec);

/// n deterministic samples for (spec, seed). Throws InvalidArgument for an
/// invalid spec or n == 0.
std::vector<double> gen_source(const SourceSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace cmap
