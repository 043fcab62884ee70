#include "cmap/channel.hpp"

#include <cmath>

#include "cmap/error.hpp"
#include "cmap/random.hpp"

namespace cmap {

double snr_to_noise_variance(double snr_db, double power) {
  if (!(power > 0.0)) throw InvalidArgument("snr_to_noise_variance: power must be > 0");
  if (snr_db == kNoiselessSnrDb) return 0.0;
  if (std::isnan(snr_db) || snr_db == -kNoiselessSnrDb) {
    throw InvalidArgument("snr_to_noise_variance: snr_db must be finite or +inf");
  }
  return power * std::pow(10.0, -snr_db / 10.0);
}

std::vector<double> awgn_transmit(std::span<const double> block, const ChannelConfig& config) {
  if (block.empty()) throw EmptyInput("awgn_transmit: empty block");
  const double variance = snr_to_noise_variance(config.snr_db, config.power);
  std::vector<double> out(block.begin(), block.end());
  if (variance == 0.0) return out;

  const double sigma = std::sqrt(variance);
  CounterStream noise(config.seed);
  for (double& z : out) z += sigma * noise.normal();
  return out;
}

}  // namespace cmap
