#include "cmap/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cmap/error.hpp"
#include "cmap/random.hpp"

namespace cmap {

namespace {

constexpr std::uint64_t kBatchStream = 0x6261746368ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;

void check_batch(std::span<const double> batch) {
  if (batch.empty()) throw EmptyInput("loss: empty batch");
  if (batch.size() % 2 != 0) throw InvalidArgument("loss: batch length must be even");
}

// Hard or soft mapped block, flattened to reals.
std::vector<double> mapped_block(std::span<const double> batch, const MappingParams& mapping, bool soft,
                                 std::vector<GradTable>* jacobians) {
  std::vector<double> y(batch.size());
  for (std::size_t k = 0; k < batch.size() / 2; ++k) {
    const ComplexPoint p{batch[2 * k], batch[2 * k + 1]};
    if (jacobians != nullptr || soft) {
      auto r = map_point(p, mapping);
      const ComplexPoint& v = soft ? r.backward_value : r.value;
      y[2 * k] = v.re;
      y[2 * k + 1] = v.im;
      if (jacobians != nullptr) jacobians->push_back(std::move(r.grads));
    } else {
      const ComplexPoint v = map_value(p, mapping);
      y[2 * k] = v.re;
      y[2 * k + 1] = v.im;
    }
  }
  return y;
}

// Received symbols after scale inversion: y + n / scale. A noiseless channel
// passes y through untouched.
std::vector<double> receive(const std::vector<double>& y, const ChannelConfig& channel, const LossOptions& options,
                            double& scale) {
  scale = options.fixed_scale ? *options.fixed_scale : power_normalize(y, channel.power).scale;
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("loss: normalization scale must be positive");
  if (channel.noiseless()) return y;
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] * scale;
  std::vector<double> r = awgn_transmit(z, channel);
  for (double& v : r) v /= scale;
  return r;
}

}  // namespace

AdamState::AdamState(std::size_t n, double lr_, double beta1_, double beta2_, double epsilon_)
    : m(n, 0.0), v(n, 0.0), lr(lr_), beta1(beta1_), beta2(beta2_), epsilon(epsilon_) {
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("adam: beta1 and beta2 must lie in [0, 1)");
  }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() || state.m.size() != state.v.size()) {
    throw ShapeMismatch("adam_step: params, grads and state must have equal length");
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double m_corr = 1.0 - std::pow(state.beta1, t);
  const double v_corr = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / m_corr;
    const double v_hat = state.v[i] / v_corr;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

double LrSchedule::rate_at(int iteration) const noexcept {
  double rate = initial;
  for (int milestone : milestones) {
    if (iteration >= milestone) rate *= factor;
  }
  return rate;
}

void TrainConfig::validate() const {
  if (stage1_iters < 0 || stage2_iters < 0) throw InvalidArgument("train: iteration counts must be >= 0");
  if (batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (!(power > 0.0)) throw InvalidArgument("train: power must be > 0");
  if (!(stage1_lr.initial > 0.0) || !(stage2_lr.initial > 0.0)) {
    throw InvalidArgument("train: learning rates must be > 0");
  }
  if (!(delta > 0.0)) throw InvalidArgument("train: delta must be > 0");
}

std::uint64_t batch_seed(std::uint64_t seed, int iteration) noexcept {
  return derive_key(seed, static_cast<std::uint64_t>(iteration), kBatchStream);
}

std::uint64_t noise_seed(std::uint64_t seed, int iteration) noexcept {
  return derive_key(seed, static_cast<std::uint64_t>(iteration), kNoiseStream);
}

LossResult end_to_end_loss(std::span<const double> batch, const MappingParams& mapping,
                           const ChannelConfig& channel, const AffineDecoder& decoder,
                           const LossOptions& options) {
  check_batch(batch);
  std::vector<GradTable> jacobians;
  jacobians.reserve(batch.size() / 2);
  const std::vector<double> y = mapped_block(batch, mapping, options.soft_values, &jacobians);

  LossResult out;
  const std::vector<double> r = receive(y, channel, options, out.scale);

  auto names = learnable_names(mapping);
  const std::size_t n_map = names.size();
  names.emplace_back("decoder.gain");
  names.emplace_back("decoder.bias");
  out.grads = GradTable(1, std::move(names));
  auto grad = out.grads.row(0);

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = decoder.apply(r[i]) - batch[i];
    loss += err * err;
    const double d_xhat = 2.0 * err * inv_b;
    grad[n_map] += d_xhat * r[i];
    grad[n_map + 1] += d_xhat;
    // Scale held constant: r = y + n / scale, so d r / d y = 1.
    const double d_y = decoder.gain * d_xhat;
    if (d_y == 0.0) continue;
    const GradTable& jac = jacobians[i / 2];
    const auto row = jac.row(i % 2);
    for (std::size_t l = 0; l < n_map; ++l) grad[l] += d_y * row[2 + l];
  }
  out.loss = loss * inv_b;
  return out;
}

double evaluate_mse(std::span<const double> samples, const MappingParams& mapping, const ChannelConfig& channel,
                    const AffineDecoder& decoder, const LossOptions& options) {
  check_batch(samples);
  const std::vector<double> y = mapped_block(samples, mapping, options.soft_values, nullptr);
  double scale = 1.0;
  const std::vector<double> r = receive(y, channel, options, scale);
  double loss = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double err = decoder.apply(r[i]) - samples[i];
    loss += err * err;
  }
  return loss / static_cast<double>(samples.size());
}

double calibrate_fixed_scale(std::span<const double> samples, const MappingParams& mapping, double power) {
  check_batch(samples);
  return power_normalize(mapped_block(samples, mapping, false, nullptr), power).scale;
}

TrainResult train(const TrainConfig& config, MappingParams mapping, const SourceSpec& source_spec) {
  config.validate();
  const SourceSpec source = resolve_source(source_spec);
  source.validate();

  TrainResult result{std::move(mapping), AffineDecoder{}, {}, {}};
  result.history.reserve(static_cast<std::size_t>(config.stage1_iters + config.stage2_iters));
  const std::size_t batch_reals = 2 * static_cast<std::size_t>(config.batch_size);

  auto step_loss = [&](int iteration) {
    const auto batch = gen_source(source, batch_reals, batch_seed(config.seed, iteration));
    const ChannelConfig channel{config.snr_train_db, config.power, noise_seed(config.seed, iteration)};
    return end_to_end_loss(batch, result.mapping, channel, result.decoder);
  };

  std::vector<double> theta = get_learnable(result.mapping);
  AdamState mapping_state(theta.size());
  for (int it = 0; it < config.stage1_iters; ++it) {
    const LossResult lr = step_loss(it);
    result.history.push_back({it, 1, lr.loss});
    if (theta.empty()) continue;
    mapping_state.lr = config.stage1_lr.rate_at(it);
    adam_step(theta, lr.grads.row(0).subspan(0, theta.size()), mapping_state);
    set_learnable(result.mapping, theta);
  }
  result.warnings = validate_mapping(result.mapping);

  std::vector<double> dec{result.decoder.gain, result.decoder.bias};
  AdamState decoder_state(2);
  for (int it = 0; it < config.stage2_iters; ++it) {
    const int global = config.stage1_iters + it;
    const LossResult lr = step_loss(global);
    result.history.push_back({global, 2, lr.loss});
    decoder_state.lr = config.stage2_lr.rate_at(it);
    adam_step(dec, lr.grads.row(0).subspan(lr.grads.params() - 2), decoder_state);
    result.decoder = {dec[0], dec[1]};
  }
  return result;
}

void write_history_csv(std::ostream& out, std::span<const HistoryEntry> history) {
  out << "iteration,stage,loss\n";
  char buf[64];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof buf, "%.17g", h.loss);
    out << h.iteration << ',' << h.stage << ',' << buf << '\n';
  }
}

}  // namespace cmap
