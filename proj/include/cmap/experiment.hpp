#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmap/io.hpp"
#include "cmap/mapping.hpp"
#include "cmap/source.hpp"
#include "cmap/trainer.hpp"

namespace cmap {

struct MappingSpec {
  MappingKind kind = MappingKind::qam;
  /// Levels per axis; MIC uses an M x M initial grid.
  int m = 4;
};

/// "qam16", "mrc16", "mic64", ... (kind plus number of finite points).
std::string mapping_label(const MappingSpec& spec);

struct ExperimentConfig {
  std::vector<MappingSpec> mappings{{MappingKind::qam, 4}, {MappingKind::mrc, 4}, {MappingKind::mic, 4}};
  SourceSpec source = mixture_preset();
  /// Training SNRs; +inf trains on a noiseless channel.
  std::vector<double> snr_train_db{5.0, 10.0};
  std::vector<double> snr_test_db{0.0, 5.0, 10.0, 15.0, 20.0, kNoiselessSnrDb};
  double power = 1.0;
  std::size_t eval_symbols = 100000;
  ScaleMode scale_mode = ScaleMode::per_block;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::string metrics_path;
  /// When non-empty, trained parameters are written here as JSON.
  std::string params_dir;

  /// Throws InvalidArgument.
  void validate() const;
};

/// Fields absent from `j` keep their defaults. SNR lists accept numbers or
/// the string "inf". Throws SchemaError naming the field.
ExperimentConfig experiment_config_from_json(const Json& j);

struct MetricRow {
  std::string mapping;
  double snr_train_db = 0.0;
  double snr_test_db = 0.0;
  double mse = 0.0;
  std::size_t n = 0;
};

struct TrainedCell {
  MappingSpec spec;
  double snr_train_db = 0.0;
  TrainResult result;
};

struct SweepResult {
  std::vector<MetricRow> rows;
  std::vector<TrainedCell> trained;
};

/// Trains every (mapping, training SNR) cell, then measures end-to-end MSE
/// on one held-out block of eval_symbols complex symbols at every test SNR.
/// Rows are ordered by mapping (config order), training SNR, test SNR.
SweepResult run_sweep(const ExperimentConfig& config);

/// Metric CSV. The first line is a '#' comment naming the metric; then the
/// header "mapping,snr_train_db,snr_test_db,mse,n".
void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);
std::string format_snr(double snr_db);

struct ClusterAssignment {
  ComplexPoint sample;
  std::size_t cluster = 0;
  ComplexPoint mapped;
};

/// Pairs the samples into symbols and assigns each to its finite point.
std::vector<ClusterAssignment> assign_clusters(const MappingParams& mapping, std::span<const double> samples);

struct ExportPaths {
  std::string csv;
  std::string svg;
};

/// Writes `<base>.csv` (re,im,cluster_index,mapped_re,mapped_im) and
/// `<base>.svg` (samples coloured by cluster, finite points as red
/// triangles). Throws EmptyInput for no samples, IoError naming the path.
ExportPaths export_constellation(const MappingParams& mapping, std::span<const double> samples,
                                 const std::string& base);

void write_clusters_csv(std::ostream& out, std::span<const ClusterAssignment> rows);
void write_clusters_svg(std::ostream& out, const MappingParams& mapping, std::span<const ClusterAssignment> rows);

}  // namespace cmap
