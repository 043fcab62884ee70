#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace cmap {

/// Sentinel SNR for a noiseless channel.
inline constexpr double kNoiselessSnrDb = std::numeric_limits<double>::infinity();

struct ChannelConfig {
  double snr_db = 10.0;
  /// Average transmit power P.
  double power = 1.0;
  std::uint64_t seed = 0;

  bool noiseless() const noexcept { return snr_db == kNoiselessSnrDb; }
};

/// sigma^2 = P * 10^(-snr_db / 10), per real dimension. Returns 0 for the
/// noiseless sentinel; throws InvalidArgument for power <= 0.
double snr_to_noise_variance(double snr_db, double power);

/// z' = z + n with n ~ N(0, sigma^2) drawn i.i.d. per real symbol from the
/// counter stream keyed by config.seed. Deterministic in (block, config).
/// Throws EmptyInput for an empty block.
std::vector<double> awgn_transmit(std::span<const double> block, const ChannelConfig& config);

}  // namespace cmap
