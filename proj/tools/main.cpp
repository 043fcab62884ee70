#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmap/error.hpp"
#include "cmap/experiment.hpp"
#include "cmap/io.hpp"

using namespace cmap;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_snr(const std::string& text) {
  if (text == "inf" || text == "noiseless") return kNoiselessSnrDb;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("bad SNR value '" + text + "' (number, 'inf' or 'noiseless')");
}

// Source options shared by several commands. Unset fields leave the base
// spec alone.
struct SourceFlags {
  std::optional<std::string> kind;
  std::optional<double> mean;
  std::optional<double> std;
  std::optional<std::string> path;

  void add(CLI::App* app) {
    app->add_option("--source", kind, "uniform, gaussian, gaussian-mixture or file");
    app->add_option("--mean", mean, "gaussian mean");
    app->add_option("--std", std, "gaussian standard deviation");
    app->add_option("--source-path", path, "values file for --source file");
  }

  SourceSpec apply(SourceSpec s) const {
    if (kind) {
      const SourceKind k = parse_source_kind(*kind);
      if (k == SourceKind::gaussian_mixture) {
        s = mixture_preset();
      } else if (k != s.kind) {
        s = SourceSpec{};
        s.kind = k;
      }
    }
    if (mean || std) {
      if (s.kind != SourceKind::gaussian) throw InvalidArgument("--mean/--std need --source gaussian");
      if (mean) s.means = {*mean};
      if (std) s.stds = {*std};
    }
    if (path) s.path = *path;
    s.validate();
    return s;
  }
};

// Training options that override the "train" object of a config file.
struct TrainFlags {
  std::optional<int> stage1_iters;
  std::optional<int> stage2_iters;
  std::optional<int> batch_size;
  std::optional<double> stage1_lr;
  std::optional<double> stage2_lr;

  void add(CLI::App* app) {
    app->add_option("--stage1-iters", stage1_iters);
    app->add_option("--stage2-iters", stage2_iters);
    app->add_option("--batch-size", batch_size, "complex symbols per batch");
    app->add_option("--stage1-lr", stage1_lr, "initial stage-1 learning rate");
    app->add_option("--stage2-lr", stage2_lr, "initial stage-2 learning rate");
  }

  void apply(TrainConfig& t) const {
    if (stage1_iters) t.stage1_iters = *stage1_iters;
    if (stage2_iters) t.stage2_iters = *stage2_iters;
    if (batch_size) t.batch_size = *batch_size;
    if (stage1_lr) t.stage1_lr.initial = *stage1_lr;
    if (stage2_lr) t.stage2_lr.initial = *stage2_lr;
  }
};

ExperimentConfig load_config(const std::optional<std::string>& path) {
  if (!path) return ExperimentConfig{};
  return experiment_config_from_json(read_json_file(*path));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += fmt17(v[i]);
  }
  return s;
}

void show(const MappingParams& p, std::ostream& out) {
  out << "type " << to_string(kind_of(p)) << '\n';
  if (const auto* q = std::get_if<QamParams>(&p)) {
    out << "levels " << join(q->levels.values()) << '\n';
  } else if (const auto* m = std::get_if<MrcParams>(&p)) {
    out << "levels " << join(m->levels.values()) << '\n';
    out << "d_re " << join(m->re.boundaries) << '\n';
    out << "d_im " << join(m->im.boundaries) << '\n';
    out << "delta " << fmt17(m->re.delta) << '\n';
  } else if (const auto* c = std::get_if<MicParams>(&p)) {
    out << "delta " << fmt17(c->delta) << '\n';
  }
  if (kind_of(p) != MappingKind::identity) {
    const auto pts = finite_points(p);
    out << "points " << pts.size() << '\n';
    for (const auto& q : pts) out << "  " << fmt17(q.re) << ' ' << fmt17(q.im) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learnable constellation mappings: training, SNR sweeps and cluster export", "cmap"};
  app.require_subcommand(1);

  // gen-source
  auto* gen = app.add_subcommand("gen-source", "write n source reals, one per line");
  SourceFlags gen_source_flags;
  gen_source_flags.add(gen);
  std::optional<std::string> gen_config;
  std::size_t gen_n = 10000;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--config", gen_config, "experiment config; its source object is used");
  gen->add_option("-n,--count", gen_n, "number of reals");
  gen->add_option("--seed", gen_seed);
  gen->add_option("-o,--out", gen_out, "output file (default: stdout)");

  // train
  auto* tr = app.add_subcommand("train", "two-stage training of one mapping");
  SourceFlags tr_source_flags;
  tr_source_flags.add(tr);
  TrainFlags tr_flags;
  tr_flags.add(tr);
  std::optional<std::string> tr_config;
  std::optional<std::string> tr_mapping;
  std::optional<int> tr_m;
  std::optional<std::string> tr_snr;
  std::optional<std::string> tr_init;
  std::uint64_t tr_seed = 0;
  std::string tr_out;
  std::string tr_decoder_out;
  std::string tr_history;
  tr->add_option("--config", tr_config, "experiment config; first mapping and training SNR are used");
  tr->add_option("--mapping", tr_mapping, "qam, mrc or mic");
  tr->add_option("--m", tr_m, "levels per axis");
  tr->add_option("--init", tr_init, "start from these params instead of the QAM initialization");
  tr->add_option("--snr-train", tr_snr, "training SNR in dB, or inf");
  tr->add_option("--seed", tr_seed)->required();
  tr->add_option("-o,--out", tr_out, "trained params JSON")->required();
  tr->add_option("--decoder-out", tr_decoder_out, "trained decoder JSON");
  tr->add_option("--history", tr_history, "loss history CSV");

  // sweep
  auto* sw = app.add_subcommand("sweep", "train every mapping and measure MSE over the SNR grid");
  SourceFlags sw_source_flags;
  sw_source_flags.add(sw);
  TrainFlags sw_flags;
  sw_flags.add(sw);
  std::optional<std::string> sw_config;
  std::uint64_t sw_seed = 0;
  std::optional<std::string> sw_metrics;
  std::optional<std::string> sw_params_dir;
  std::optional<std::size_t> sw_eval;
  std::optional<std::string> sw_scale;
  sw->add_option("--config", sw_config, "experiment config JSON");
  sw->add_option("--seed", sw_seed)->required();
  sw->add_option("--metrics", sw_metrics, "metrics CSV (default: stdout)");
  sw->add_option("--params-dir", sw_params_dir, "directory for trained params");
  sw->add_option("--eval-symbols", sw_eval, "held-out complex symbols");
  sw->add_option("--scale-mode", sw_scale, "per-block or fixed");

  // export-constellation
  auto* ex = app.add_subcommand("export-constellation", "write cluster CSV and SVG for a mapping");
  SourceFlags ex_source_flags;
  ex_source_flags.add(ex);
  std::optional<std::string> ex_params;
  std::string ex_mapping = "qam";
  int ex_m = 4;
  std::size_t ex_n = 10000;
  std::uint64_t ex_seed = 0;
  std::string ex_out;
  ex->add_option("--params", ex_params, "params JSON (default: an untrained --mapping)");
  ex->add_option("--mapping", ex_mapping, "qam, mrc or mic");
  ex->add_option("--m", ex_m, "levels per axis");
  ex->add_option("-n,--count", ex_n, "complex symbols to plot");
  ex->add_option("--seed", ex_seed);
  ex->add_option("-o,--out", ex_out, "output base path; writes <out>.csv and <out>.svg")->required();

  // show-params
  auto* sp = app.add_subcommand("show-params", "print a params file and its validation warnings");
  std::string sp_path;
  sp->add_option("params", sp_path, "params JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*gen) {
      SourceSpec spec = gen_config ? load_config(gen_config).source : SourceSpec{};
      spec = gen_source_flags.apply(spec);
      const auto values = gen_source(spec, gen_n, gen_seed);
      std::string text;
      for (double v : values) text += fmt17(v) + '\n';
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        auto out = open_out(gen_out);
        out << text;
        finish(out, gen_out);
      }
    } else if (*tr) {
      const ExperimentConfig c = load_config(tr_config);
      TrainConfig t = c.train;
      tr_flags.apply(t);
      t.seed = tr_seed;
      t.power = c.power;
      t.snr_train_db = tr_snr ? parse_snr(*tr_snr) : c.snr_train_db.front();
      MappingSpec ms = c.mappings.front();
      if (tr_mapping) ms.kind = parse_mapping_kind(*tr_mapping);
      if (tr_m) ms.m = *tr_m;
      const SourceSpec source = tr_source_flags.apply(c.source);
      t.validate();
      MappingParams init = tr_init ? load_params(*tr_init) : make_mapping(ms.kind, ms.m, t.delta);

      const TrainResult r = train(t, std::move(init), source);
      print_warnings(r.warnings);
      save_params(tr_out, r.mapping);
      if (!tr_decoder_out.empty()) write_json_file(tr_decoder_out, to_json(r.decoder));
      if (!tr_history.empty()) {
        auto out = open_out(tr_history);
        write_history_csv(out, r.history);
        finish(out, tr_history);
      }
    } else if (*sw) {
      ExperimentConfig c = load_config(sw_config);
      c.seed = sw_seed;
      sw_flags.apply(c.train);
      c.source = sw_source_flags.apply(c.source);
      if (sw_metrics) c.metrics_path = *sw_metrics;
      if (sw_params_dir) c.params_dir = *sw_params_dir;
      if (sw_eval) c.eval_symbols = *sw_eval;
      if (sw_scale) {
        if (*sw_scale == "per-block") {
          c.scale_mode = ScaleMode::per_block;
        } else if (*sw_scale == "fixed") {
          c.scale_mode = ScaleMode::fixed;
        } else {
          throw InvalidArgument("--scale-mode must be per-block or fixed");
        }
      }
      c.validate();

      const SweepResult r = run_sweep(c);
      for (const auto& cell : r.trained) print_warnings(cell.result.warnings);
      if (c.metrics_path.empty()) {
        write_metrics_csv(std::cout, r.rows);
      } else {
        auto out = open_out(c.metrics_path);
        write_metrics_csv(out, r.rows);
        finish(out, c.metrics_path);
      }
    } else if (*ex) {
      const MappingParams mapping =
          ex_params ? load_params(*ex_params) : make_mapping(parse_mapping_kind(ex_mapping), ex_m);
      const SourceSpec source = ex_source_flags.apply(mixture_preset());
      const auto samples = gen_source(source, 2 * ex_n, ex_seed);
      const auto paths = export_constellation(mapping, samples, ex_out);
      std::cout << paths.csv << '\n' << paths.svg << '\n';
    } else if (*sp) {
      const MappingParams p = load_params(sp_path);
      show(p, std::cout);
      print_warnings(validate_mapping(p));
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
