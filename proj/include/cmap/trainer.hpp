#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmap/channel.hpp"
#include "cmap/grad.hpp"
#include "cmap/mapping.hpp"
#include "cmap/source.hpp"

namespace cmap {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  explicit AdamState(std::size_t n, double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);
};

/// One bias-corrected Adam update in place. Throws ShapeMismatch if params,
/// grads and state sizes differ.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Piecewise-constant rate: `initial`, multiplied by `factor` at each
/// milestone (iteration index within the stage).
struct LrSchedule {
  double initial = 1e-3;
  std::vector<int> milestones;
  double factor = 0.1;

  double rate_at(int iteration) const noexcept;
};

/// Receiver-side stand-in: x_hat = gain * r + bias per real dimension.
struct AffineDecoder {
  double gain = 1.0;
  double bias = 0.0;

  double apply(double r) const noexcept { return gain * r + bias; }
  friend bool operator==(const AffineDecoder&, const AffineDecoder&) = default;
};

enum class ScaleMode {
  /// Each block is normalized to power P; the receiver knows the scale.
  per_block,
  /// One scale calibrated from the mapping's output on source samples, so
  /// the transmitted alphabet is exactly finite.
  fixed,
};

struct TrainConfig {
  int stage1_iters = 2000;
  LrSchedule stage1_lr{1e-3, {500, 1500}, 0.1};
  int stage2_iters = 1000;
  LrSchedule stage2_lr{1e-3, {700}, 0.1};
  /// Complex symbols per batch (2 * batch_size reals).
  int batch_size = 32;
  double snr_train_db = 10.0;
  double power = 1.0;
  std::uint64_t seed = 0;
  /// Used when building default mappings; train() keeps the mapping's own delta.
  double delta = kDefaultDelta;

  /// Throws InvalidArgument.
  void validate() const;
};

struct LossOptions {
  /// Evaluate the pipeline on the soft (backward) mapping values instead of
  /// the hard ones. Used to check gradients against the surrogate loss.
  bool soft_values = false;
  /// Use this scale instead of normalizing the block.
  std::optional<double> fixed_scale;
};

struct LossResult {
  double loss = 0.0;
  /// One row. Columns: learnable_names(mapping), "decoder.gain", "decoder.bias".
  GradTable grads;
  /// Normalization scale applied to the mapped block.
  double scale = 1.0;
};

/// Mean over the batch of (decode(unscale(channel(scale * map(clip(x))))) - x)^2.
/// Gradients use the mappings' soft backward expressions and hold the
/// normalization scale constant. `batch` holds reals, paired into symbols.
LossResult end_to_end_loss(std::span<const double> batch, const MappingParams& mapping,
                           const ChannelConfig& channel, const AffineDecoder& decoder,
                           const LossOptions& options = {});

/// Forward-only loss (no gradients). Same conventions as end_to_end_loss.
double evaluate_mse(std::span<const double> samples, const MappingParams& mapping, const ChannelConfig& channel,
                    const AffineDecoder& decoder, const LossOptions& options = {});

/// sqrt(P / mean(y^2)) over the hard mapped samples.
double calibrate_fixed_scale(std::span<const double> samples, const MappingParams& mapping, double power);

struct HistoryEntry {
  int iteration = 0;
  int stage = 1;
  double loss = 0.0;
};

struct TrainResult {
  MappingParams mapping;
  AffineDecoder decoder;
  std::vector<HistoryEntry> history;
  /// Boundary ordering warnings raised after stage 1.
  std::vector<std::string> warnings;
};

/// Two-stage fine-tuning. Stage 1 trains the mapping with the decoder held
/// at (1, 0); stage 2 freezes the mapping and trains the decoder. Each
/// iteration draws a fresh batch and fresh channel noise from streams keyed
/// by (seed, iteration). Deterministic.
TrainResult train(const TrainConfig& config, MappingParams mapping, const SourceSpec& source);

/// CSV with header "iteration,stage,loss".
void write_history_csv(std::ostream& out, std::span<const HistoryEntry> history);

/// Stream keys used by train(); exposed so evaluation code can stay clear of them.
std::uint64_t batch_seed(std::uint64_t seed, int iteration) noexcept;
std::uint64_t noise_seed(std::uint64_t seed, int iteration) noexcept;

}  // namespace cmap
