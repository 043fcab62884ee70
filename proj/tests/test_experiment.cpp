#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "cmap/error.hpp"
#include "cmap/experiment.hpp"
#include "cmap/io.hpp"
#include "cmap/random.hpp"
#include "oracles.hpp"

using namespace cmap;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cmap_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string schema_message(const Json& j) {
  try {
    mapping_from_json(j);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("gen_source") {
  SourceSpec uniform;
  uniform.kind = SourceKind::uniform;
  CHECK(gen_source(uniform, 4, 99) == gen_source(uniform, 4, 99));
  CHECK(gen_source(uniform, 4, 99) != gen_source(uniform, 4, 100));

  SourceSpec gaussian;
  const auto g = gen_source(gaussian, 1000000, 5);
  double mean = 0.0;
  for (double x : g) {
    CHECK(x >= -2.0);
    CHECK(x <= 2.0);
    mean += x;
  }
  mean /= static_cast<double>(g.size());
  CHECK(std::abs(mean) < 0.005);

  const auto mix = gen_source(mixture_preset(), 200000, 6);
  double m2 = 0.0;
  for (double x : mix) m2 += x * x;
  // Second moment of the preset mixture: 0.35^2 + 0.45^2 (clipping is negligible).
  CHECK(m2 / static_cast<double>(mix.size()) == doctest::Approx(0.325).epsilon(0.01));

  CHECK_THROWS_AS(gen_source(gaussian, 0, 1), InvalidArgument);
  SourceSpec bad = mixture_preset();
  bad.weights = {0.7, 0.7};
  CHECK_THROWS_AS(gen_source(bad, 4, 1), InvalidArgument);
  bad = mixture_preset();
  bad.stds = {0.4, -1.0};
  CHECK_THROWS_AS(gen_source(bad, 4, 1), InvalidArgument);
}

TEST_CASE("file source resamples values from disk") {
  const auto dir = temp_dir("file_source");
  {
    std::ofstream f(dir / "values.txt");
    f << "0.5, -0.25\n3.0\n";
  }
  SourceSpec s;
  s.kind = SourceKind::file;
  s.path = (dir / "values.txt").string();
  const auto x = gen_source(s, 1000, 1);
  std::set<double> seen(x.begin(), x.end());
  CHECK(seen == std::set<double>{0.5, -0.25, 2.0});

  s.path = (dir / "missing.txt").string();
  CHECK_THROWS_AS(gen_source(s, 10, 1), IoError);
}

TEST_CASE("params JSON round-trips bit-exactly") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-3, 3);
  const auto dir = temp_dir("roundtrip");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MappingParams> all;
    auto mrc = make_mapping(MappingKind::mrc, 2 + static_cast<int>(rng() % 7), u(rng) + 10.0);
    auto mic = make_mapping(MappingKind::mic, 2 + static_cast<int>(rng() % 4));
    for (auto* m : {&mrc, &mic}) {
      auto t = get_learnable(*m);
      for (double& v : t) v += u(rng) * 1e-3 + std::ldexp(u(rng), -40);
      set_learnable(*m, t);
    }
    all = {mrc, mic, make_mapping(MappingKind::qam, 8, 20.0, -1.5, 2.5), IdentityParams{}};
    for (const auto& p : all) {
      const auto path = (dir / "p.json").string();
      save_params(path, p);
      CHECK(load_params(path) == p);
    }
  }
  const auto levels = make_uniform_levels(5, -1.25, 3.0);
  CHECK(levels_from_json(to_json(levels)) == levels);
  const auto grid = make_qam_grid(levels, levels);
  CHECK(constellation_from_json(to_json(grid)) == grid);
  CHECK(to_json(levels)["type"] == "levels");
  CHECK(to_json(grid)["type"] == "constellation");
}

TEST_CASE("malformed params name the offending field") {
  Json mrc = to_json(make_mapping(MappingKind::mrc, 4));
  mrc["d_re"][1] = "oops";
  CHECK(schema_message(mrc).find("d_re[1]") != std::string::npos);

  mrc = to_json(make_mapping(MappingKind::mrc, 4));
  mrc.erase("delta");
  CHECK(schema_message(mrc).find("delta") != std::string::npos);

  mrc = to_json(make_mapping(MappingKind::mrc, 4));
  mrc["d_im"] = Json::array({0.0});
  CHECK(schema_message(mrc).find("d_im") != std::string::npos);

  Json mic = to_json(make_mapping(MappingKind::mic, 2));
  mic["points"][2] = Json::array({1.0});
  CHECK(schema_message(mic).find("points[2]") != std::string::npos);

  Json qam = to_json(make_mapping(MappingKind::qam, 4));
  qam["levels"]["values"][1] = 0.1;
  CHECK(schema_message(qam).find("levels.values") != std::string::npos);

  CHECK(schema_message(Json{{"type", "nope"}}).find("type") != std::string::npos);
  CHECK(schema_message(Json::array()).find("params") != std::string::npos);

  const auto dir = temp_dir("malformed");
  {
    std::ofstream f(dir / "bad.json");
    f << "{ not json";
  }
  CHECK_THROWS_AS(load_params((dir / "bad.json").string()), SchemaError);
  CHECK_THROWS_AS(load_params((dir / "absent.json").string()), IoError);
}

TEST_CASE("experiment config parsing") {
  const Json j = Json::parse(R"({
    "seed": 5,
    "mappings": [{"kind": "mic", "m": 4}, {"kind": "qam", "m": 8}],
    "source": {"kind": "gaussian", "mean": 0.1, "std": 0.8},
    "snr_train_db": [10],
    "snr_test_db": [0, "inf"],
    "scale_mode": "fixed",
    "train": {"stage1_iters": 10, "stage1_lr": {"initial": 0.01, "milestones": [5]}, "batch_size": 8},
    "output": {"metrics": "m.csv"}
  })");
  const auto c = experiment_config_from_json(j);
  CHECK(c.seed == 5);
  REQUIRE(c.mappings.size() == 2);
  CHECK(c.mappings[1].kind == MappingKind::qam);
  CHECK(c.mappings[1].m == 8);
  CHECK(c.source.means[0] == 0.1);
  CHECK(c.snr_test_db[1] == kNoiselessSnrDb);
  CHECK(c.scale_mode == ScaleMode::fixed);
  CHECK(c.train.stage1_iters == 10);
  CHECK(c.train.stage1_lr.initial == 0.01);
  CHECK(c.train.stage1_lr.milestones == std::vector<int>{5});
  CHECK(c.train.stage2_iters == 1000);
  CHECK(c.metrics_path == "m.csv");

  auto expect_field = [](const char* text, const char* field) {
    try {
      experiment_config_from_json(Json::parse(text));
      FAIL("expected a schema error");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect_field(R"({"mappings": [{"kind": "zzz"}]})", "mappings[0].kind");
  expect_field(R"({"snr_test_db": []})", "snr_test_db");
  expect_field(R"({"snr_train_db": [5, "loud"]})", "snr_train_db[1]");
  expect_field(R"({"train": {"batch_size": 0}})", "train");
  expect_field(R"({"source": {"kind": "gaussian-mixture", "means": [0], "stds": [1], "weights": [0.5]}})",
               "source");
}

TEST_CASE("cluster assignment and export") {
  SourceSpec uniform;
  uniform.kind = SourceKind::uniform;
  const auto samples = gen_source(uniform, 20000, 3);
  const auto levels = make_uniform_levels(4);

  SUBCASE("16QAM covers all 16 clusters") {
    const auto rows = assign_clusters(QamParams{levels}, samples);
    std::set<std::size_t> clusters;
    const auto grid = finite_points(QamParams{levels});
    for (const auto& r : rows) {
      clusters.insert(r.cluster);
      CHECK(r.mapped == grid[r.cluster]);
      const std::size_t oracle_index = oracle::nearest_level_scan(r.sample.im, levels.values()) * 4 +
                                       oracle::nearest_level_scan(r.sample.re, levels.values());
      CHECK(r.cluster == oracle_index);
    }
    CHECK(clusters.size() == 16);
  }
  SUBCASE("MRC and MIC assignments agree with brute-force re-assignment") {
    std::mt19937_64 rng(10);
    MrcParams mrc = make_mrc_params(levels);
    mrc.re.boundaries = oracle::random_interleaved_boundaries(levels.values(), rng);
    mrc.im.boundaries = oracle::random_interleaved_boundaries(levels.values(), rng);
    for (const auto& r : assign_clusters(mrc, samples)) {
      const std::size_t expected = oracle::interval_scan(r.sample.im, mrc.im.boundaries) * 4 +
                                   oracle::interval_scan(r.sample.re, mrc.re.boundaries);
      CHECK(r.cluster == expected);
    }

    auto mic = make_mapping(MappingKind::mic, 4);
    auto t = get_learnable(mic);
    std::normal_distribution<double> jitter(0.0, 0.2);
    for (double& v : t) v += jitter(rng);
    set_learnable(mic, t);
    const auto pts = finite_points(mic);
    for (const auto& r : assign_clusters(mic, samples)) {
      CHECK(r.cluster == oracle::brute_force_nearest(r.sample, pts));
      CHECK(r.mapped == pts[r.cluster]);
    }
  }
  SUBCASE("files are written and errors carry the path") {
    const auto dir = temp_dir("export");
    const auto paths = export_constellation(make_mapping(MappingKind::mrc, 4), samples, (dir / "mrc").string());
    const auto csv = slurp(paths.csv);
    CHECK(csv.rfind("re,im,cluster_index,mapped_re,mapped_im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 10000);
    const auto svg = slurp(paths.svg);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polygon") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);

    CHECK_THROWS_AS(export_constellation(QamParams{levels}, std::vector<double>{}, (dir / "x").string()),
                    EmptyInput);
    try {
      export_constellation(QamParams{levels}, samples, (dir / "no_such_dir" / "x").string());
      FAIL("expected an IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("no_such_dir") != std::string::npos);
    }
  }
}

TEST_CASE("run_sweep on a small configuration") {
  ExperimentConfig c;
  c.seed = 3;
  c.eval_symbols = 20000;
  c.snr_train_db = {10.0};
  c.snr_test_db = {20.0, 0.0, kNoiselessSnrDb, 10.0};
  c.train.stage1_iters = 300;
  c.train.stage2_iters = 100;

  const auto a = run_sweep(c);
  REQUIRE(a.rows.size() == 3 * 4);
  CHECK(a.rows[0].mapping == "qam16");
  CHECK(a.rows[4].mapping == "mrc16");
  CHECK(a.rows[8].mapping == "mic16");
  // Test SNRs come out sorted, noiseless last, MSE decreasing with SNR.
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(a.rows[4 * m].snr_test_db == 0.0);
    CHECK(a.rows[4 * m + 3].snr_test_db == kNoiselessSnrDb);
    for (std::size_t k = 1; k < 4; ++k) CHECK(a.rows[4 * m + k].mse <= a.rows[4 * m + k - 1].mse);
  }

  // Trained MIC against QAM at the training SNR (index 1 after sorting).
  CHECK(a.rows[8 + 1].snr_test_db == 10.0);
  CHECK(a.rows[8 + 1].mse <= 1.01 * a.rows[1].mse);

  std::ostringstream first;
  std::ostringstream second;
  write_metrics_csv(first, a.rows);
  write_metrics_csv(second, run_sweep(c).rows);
  CHECK(first.str() == second.str());
  CHECK(first.str().find("mapping,snr_train_db,snr_test_db,mse,n\n") != std::string::npos);
  CHECK(first.str().find("qam16,10,inf,") != std::string::npos);

  c.scale_mode = ScaleMode::fixed;
  c.params_dir = temp_dir("sweep_params").string();
  const auto fixed = run_sweep(c);
  CHECK(fixed.rows.size() == 12);
  CHECK(fs::exists(fs::path(c.params_dir) / "mic16_snr10.json"));
  CHECK(fs::exists(fs::path(c.params_dir) / "mic16_snr10_decoder.json"));
  CHECK(load_params((fs::path(c.params_dir) / "mic16_snr10.json").string()) == fixed.trained[2].result.mapping);
}

TEST_CASE("noiseless QAM column is the quantization distortion") {
  ExperimentConfig c;
  c.seed = 21;
  c.mappings = {{MappingKind::qam, 4}};
  c.eval_symbols = 50000;
  c.snr_train_db = {10.0};
  c.snr_test_db = {kNoiselessSnrDb};
  c.train.stage1_iters = 0;
  c.train.stage2_iters = 0;
  const auto rows = run_sweep(c).rows;
  REQUIRE(rows.size() == 1);

  // Rebuild the held-out block the way the sweep documents it and quantize
  // it directly.
  const auto held_out = gen_source(c.source, 2 * c.eval_symbols, derive_key(c.seed, 0x68656c64));
  const auto levels = make_uniform_levels(4);
  double sum = 0.0;
  for (double x : held_out) {
    const double q = levels[oracle::nearest_level_scan(clip(x, -2.0, 2.0), levels.values())];
    sum += (q - x) * (q - x);
  }
  CHECK(rows[0].mse == doctest::Approx(sum / static_cast<double>(held_out.size())).epsilon(1e-12));
  CHECK(rows[0].n == c.eval_symbols);
}
