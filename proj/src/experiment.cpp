#include "cmap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "cmap/error.hpp"
#include "cmap/random.hpp"

namespace cmap {

namespace {

constexpr std::uint64_t kHeldoutStream = 0x68656c64ULL;
constexpr std::uint64_t kTestNoiseStream = 0x74657374ULL;
constexpr std::uint64_t kCalibrationStream = 0x63616c62ULL;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double snr_from_json(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "noiseless")) {
    return kNoiselessSnrDb;
  }
  throw SchemaError(where + ": expected a number or \"inf\"");
}

std::vector<double> snr_list(const Json& j, const std::string& key) {
  const Json& arr = schema::field(j, key, "config");
  if (!arr.is_array() || arr.empty()) throw SchemaError("config." + key + ": expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(snr_from_json(arr[i], "config." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

int int_field(const Json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

LrSchedule schedule_from_json(const Json& j, LrSchedule fallback, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  fallback.initial = schema::number_or(j, "initial", fallback.initial, where);
  fallback.factor = schema::number_or(j, "factor", fallback.factor, where);
  if (j.contains("milestones")) {
    fallback.milestones.clear();
    for (double m : schema::numbers(j, "milestones", where)) fallback.milestones.push_back(static_cast<int>(m));
  }
  return fallback;
}

TrainConfig train_from_json(const Json& j, TrainConfig t) {
  const std::string where = "config.train";
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  t.stage1_iters = int_field(j, "stage1_iters", t.stage1_iters, where);
  t.stage2_iters = int_field(j, "stage2_iters", t.stage2_iters, where);
  t.batch_size = int_field(j, "batch_size", t.batch_size, where);
  t.delta = schema::number_or(j, "delta", t.delta, where);
  if (j.contains("stage1_lr")) t.stage1_lr = schedule_from_json(j.at("stage1_lr"), t.stage1_lr, where + ".stage1_lr");
  if (j.contains("stage2_lr")) t.stage2_lr = schedule_from_json(j.at("stage2_lr"), t.stage2_lr, where + ".stage2_lr");
  return t;
}

std::string hsl_colour(std::size_t cluster) {
  const double hue = std::fmod(static_cast<double>(cluster) * 137.508, 360.0);
  return "hsl(" + fmt("%.1f", hue) + ",70%,50%)";
}

}  // namespace

std::string mapping_label(const MappingSpec& spec) {
  if (spec.kind == MappingKind::identity) return "identity";
  return to_string(spec.kind) + std::to_string(spec.m * spec.m);
}

void ExperimentConfig::validate() const {
  if (mappings.empty()) throw InvalidArgument("config: at least one mapping is required");
  for (const auto& m : mappings) {
    if (m.kind != MappingKind::identity && m.m < 2) throw InvalidArgument("config: mapping size m must be >= 2");
  }
  if (snr_train_db.empty()) throw InvalidArgument("config: snr_train_db must be non-empty");
  if (snr_test_db.empty()) throw InvalidArgument("config: snr_test_db must be non-empty");
  for (double s : snr_train_db) {
    if (std::isnan(s) || s == -kNoiselessSnrDb) throw InvalidArgument("config: invalid training SNR");
  }
  for (double s : snr_test_db) {
    if (std::isnan(s) || s == -kNoiselessSnrDb) throw InvalidArgument("config: invalid test SNR");
  }
  if (!(power > 0.0)) throw InvalidArgument("config: power must be > 0");
  if (eval_symbols < 1) throw InvalidArgument("config: eval_symbols must be >= 1");
  source.validate();
  train.validate();
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  ExperimentConfig c;
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw SchemaError("config.seed: expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("mappings")) {
    const Json& arr = j.at("mappings");
    if (!arr.is_array() || arr.empty()) throw SchemaError("config.mappings: expected a non-empty array");
    c.mappings.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "config.mappings[" + std::to_string(i) + "]";
      MappingSpec spec;
      const std::string kind = schema::string(arr[i], "kind", where);
      try {
        spec.kind = parse_mapping_kind(kind);
      } catch (const InvalidArgument& e) {
        throw SchemaError(where + ".kind: " + e.what());
      }
      spec.m = int_field(arr[i], "m", spec.m, where);
      if (spec.m < 2) throw SchemaError(where + ".m: must be >= 2");
      c.mappings.push_back(spec);
    }
  }
  if (j.contains("source")) c.source = source_from_json(j.at("source"), "config.source");
  if (j.contains("snr_train_db")) c.snr_train_db = snr_list(j, "snr_train_db");
  if (j.contains("snr_test_db")) c.snr_test_db = snr_list(j, "snr_test_db");
  c.power = schema::number_or(j, "power", c.power, "config");
  if (!(c.power > 0.0)) throw SchemaError("config.power: must be > 0");
  if (j.contains("eval_symbols")) {
    const int n = int_field(j, "eval_symbols", 0, "config");
    if (n < 1) throw SchemaError("config.eval_symbols: must be >= 1");
    c.eval_symbols = static_cast<std::size_t>(n);
  }
  if (j.contains("scale_mode")) {
    const std::string mode = schema::string(j, "scale_mode", "config");
    if (mode == "per-block") {
      c.scale_mode = ScaleMode::per_block;
    } else if (mode == "fixed") {
      c.scale_mode = ScaleMode::fixed;
    } else {
      throw SchemaError("config.scale_mode: expected \"per-block\" or \"fixed\"");
    }
  }
  if (j.contains("train")) c.train = train_from_json(j.at("train"), c.train);
  try {
    c.train.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("config.train: ") + e.what());
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    if (!o.is_object()) throw SchemaError("config.output: expected an object");
    if (o.contains("metrics")) c.metrics_path = schema::string(o, "metrics", "config.output");
    if (o.contains("params_dir")) c.params_dir = schema::string(o, "params_dir", "config.output");
  }
  return c;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const SourceSpec source = resolve_source(config.source);
  const std::size_t n_reals = 2 * config.eval_symbols;
  const auto heldout = gen_source(source, n_reals, derive_key(config.seed, kHeldoutStream));
  const std::uint64_t test_noise = derive_key(config.seed, kTestNoiseStream);

  auto train_snrs = config.snr_train_db;
  auto test_snrs = config.snr_test_db;
  std::sort(train_snrs.begin(), train_snrs.end());
  std::sort(test_snrs.begin(), test_snrs.end());

  SweepResult out;
  for (const auto& spec : config.mappings) {
    for (double snr_train : train_snrs) {
      TrainConfig tc = config.train;
      tc.snr_train_db = snr_train;
      tc.power = config.power;
      tc.seed = config.seed;
      TrainResult trained =
          train(tc, make_mapping(spec.kind, spec.m, tc.delta, source.v_min, source.v_max), source);

      LossOptions options;
      if (config.scale_mode == ScaleMode::fixed) {
        const auto calibration = gen_source(source, n_reals, derive_key(config.seed, kCalibrationStream));
        options.fixed_scale = calibrate_fixed_scale(calibration, trained.mapping, config.power);
      }
      for (double snr_test : test_snrs) {
        const ChannelConfig channel{snr_test, config.power, test_noise};
        out.rows.push_back({mapping_label(spec), snr_train, snr_test,
                            evaluate_mse(heldout, trained.mapping, channel, trained.decoder, options),
                            config.eval_symbols});
      }

      if (!config.params_dir.empty()) {
        std::filesystem::create_directories(config.params_dir);
        const std::string stem =
            (std::filesystem::path(config.params_dir) / (mapping_label(spec) + "_snr" + format_snr(snr_train)))
                .string();
        save_params(stem + ".json", trained.mapping);
        write_json_file(stem + "_decoder.json", to_json(trained.decoder));
      }
      out.trained.push_back({spec, snr_train, std::move(trained)});
    }
  }
  return out;
}

std::string format_snr(double snr_db) {
  if (snr_db == kNoiselessSnrDb) return "inf";
  return fmt("%g", snr_db);
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "# metric: end-to-end symbol MSE (reconstruction surrogate, not task accuracy)\n";
  out << "mapping,snr_train_db,snr_test_db,mse,n\n";
  for (const auto& r : rows) {
    out << r.mapping << ',' << format_snr(r.snr_train_db) << ',' << format_snr(r.snr_test_db) << ','
        << fmt("%.10g", r.mse) << ',' << r.n << '\n';
  }
}

std::vector<ClusterAssignment> assign_clusters(const MappingParams& mapping, std::span<const double> samples) {
  const auto points = pair_to_complex(samples);
  std::vector<ClusterAssignment> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back({p, cluster_index(p, mapping), map_value(p, mapping)});
  return rows;
}

void write_clusters_csv(std::ostream& out, std::span<const ClusterAssignment> rows) {
  out << "re,im,cluster_index,mapped_re,mapped_im\n";
  for (const auto& r : rows) {
    out << fmt("%.17g", r.sample.re) << ',' << fmt("%.17g", r.sample.im) << ',' << r.cluster << ','
        << fmt("%.17g", r.mapped.re) << ',' << fmt("%.17g", r.mapped.im) << '\n';
  }
}

void write_clusters_svg(std::ostream& out, const MappingParams& mapping, std::span<const ClusterAssignment> rows) {
  constexpr double kSize = 640.0;
  constexpr double kMargin = 40.0;
  const auto finite = finite_points(mapping);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto extend = [&](const ComplexPoint& p) {
    lo = std::min({lo, p.re, p.im});
    hi = std::max({hi, p.re, p.im});
  };
  for (const auto& r : rows) extend(r.sample);
  for (const auto& p : finite) extend(p);
  const double pad = 0.05 * std::max(hi - lo, 1e-9);
  lo -= pad;
  hi += pad;
  const double span = (kSize - 2 * kMargin) / (hi - lo);
  auto sx = [&](double v) { return kMargin + (v - lo) * span; };
  auto sy = [&](double v) { return kSize - kMargin - (v - lo) * span; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">"
      << to_string(kind_of(mapping)) << " mapping: " << finite.size() << " points, " << rows.size()
      << " samples</text>\n";
  if (lo < 0.0 && hi > 0.0) {
    out << "<line x1=\"" << fmt("%.2f", sx(lo)) << "\" y1=\"" << fmt("%.2f", sy(0)) << "\" x2=\""
        << fmt("%.2f", sx(hi)) << "\" y2=\"" << fmt("%.2f", sy(0)) << "\" stroke=\"#999\"/>\n";
    out << "<line x1=\"" << fmt("%.2f", sx(0)) << "\" y1=\"" << fmt("%.2f", sy(lo)) << "\" x2=\""
        << fmt("%.2f", sx(0)) << "\" y2=\"" << fmt("%.2f", sy(hi)) << "\" stroke=\"#999\"/>\n";
  }
  if (const auto* m = std::get_if<MrcParams>(&mapping)) {
    for (double d : m->re.boundaries) {
      out << "<line x1=\"" << fmt("%.2f", sx(d)) << "\" y1=\"" << fmt("%.2f", sy(lo)) << "\" x2=\""
          << fmt("%.2f", sx(d)) << "\" y2=\"" << fmt("%.2f", sy(hi))
          << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (double d : m->im.boundaries) {
      out << "<line x1=\"" << fmt("%.2f", sx(lo)) << "\" y1=\"" << fmt("%.2f", sy(d)) << "\" x2=\""
          << fmt("%.2f", sx(hi)) << "\" y2=\"" << fmt("%.2f", sy(d))
          << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }
  }
  out << "<g fill-opacity=\"0.6\">\n";
  for (const auto& r : rows) {
    out << "<circle cx=\"" << fmt("%.2f", sx(r.sample.re)) << "\" cy=\"" << fmt("%.2f", sy(r.sample.im))
        << "\" r=\"1.6\" fill=\"" << hsl_colour(r.cluster) << "\"/>\n";
  }
  out << "</g>\n";
  for (const auto& p : finite) {
    const double x = sx(p.re);
    const double y = sy(p.im);
    out << "<polygon points=\"" << fmt("%.2f", x) << ',' << fmt("%.2f", y - 6) << ' ' << fmt("%.2f", x - 5.5)
        << ',' << fmt("%.2f", y + 4) << ' ' << fmt("%.2f", x + 5.5) << ',' << fmt("%.2f", y + 4)
        << "\" fill=\"red\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
}

ExportPaths export_constellation(const MappingParams& mapping, std::span<const double> samples,
                                 const std::string& base) {
  if (samples.empty()) throw EmptyInput("export_constellation: no samples");
  const auto rows = assign_clusters(mapping, samples);
  ExportPaths paths{base + ".csv", base + ".svg"};

  std::ofstream csv(paths.csv);
  if (!csv) throw IoError("cannot open '" + paths.csv + "' for writing");
  write_clusters_csv(csv, rows);
  if (!csv) throw IoError("write to '" + paths.csv + "' failed");

  std::ofstream svg(paths.svg);
  if (!svg) throw IoError("cannot open '" + paths.svg + "' for writing");
  write_clusters_svg(svg, mapping, rows);
  if (!svg) throw IoError("write to '" + paths.svg + "' failed");
  return paths;
}

}  // namespace cmap
