#include <doctest.h>

#include "sslab/sweep.hpp"
#include "sslab/theory.hpp"

#include <filesystem>
#include <fstream>

using namespace sslab;
using namespace sslab::sweep;
using nlohmann::json;

namespace {

json synthetic_config() {
  return json{
      {"schema_version", 1},
      {"dataset",
       {{"type", "synthetic"},
        {"id", "unit"},
        {"spec",
         {{"n", 100},
          {"d", 6},
          {"k", 2},
          {"c", {4.0, 2.0}},
          {"lambda_theta", {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}},
          {"lambda_gamma", {0.0, 0.0, 1.0, 0.8, 0.6, 0.4}},
          {"seed", 3}}}}},
      {"methods", {"supervised", "je", "rc"}},
      {"n_grid", {50, 100}},
      {"alpha_grid", {0.0, 1.0}},
      {"lambda_gamma_max_grid", {1.0, 50.0}},
      {"seeds", {1, 2}},
      {"k", 2}};
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("spec json round trip") {
  const auto cfg = config_from_json(synthetic_config());
  REQUIRE(cfg.synthetic.has_value());
  const auto j = spec_to_json(*cfg.synthetic);
  const auto back = spec_from_json(j);
  CHECK(back.n == cfg.synthetic->n);
  CHECK(back.c == cfg.synthetic->c);
  CHECK(back.lambda_gamma == cfg.synthetic->lambda_gamma);
  CHECK(back.seed == cfg.synthetic->seed);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(json{{"schema_version", 2}}), SchemaMismatch);

  auto bad = synthetic_config();
  bad["methods"] = {"mystery"};
  CHECK_THROWS_AS(config_from_json(bad), SchemaMismatch);

  bad = synthetic_config();
  bad["seeds"] = {1, 1};
  CHECK_THROWS_AS(config_from_json(bad), SpecInvalid);

  bad = synthetic_config();
  bad["alpha_grid"] = {-1.0};
  CHECK_THROWS_AS(config_from_json(bad), SpecInvalid);

  bad = synthetic_config();
  bad["dataset"]["type"] = "wat";
  CHECK_THROWS_AS(config_from_json(bad), SchemaMismatch);
}

TEST_CASE("sweep produces the full grid deterministically") {
  const auto cfg = config_from_json(synthetic_config());
  const auto rows = run_sweep(cfg, 1);
  CHECK(rows.size() == 3 * 2 * 2 * 2 * 2);

  const auto rows4 = run_sweep(cfg, 4);
  REQUIRE(rows4.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].method == rows4[i].method);
    CHECK(rows[i].probe_gap == rows4[i].probe_gap);
    CHECK(rows[i].subspace_dist == rows4[i].subspace_dist);
  }

  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    CHECK(r.probe_gap ==
          doctest::Approx(std::abs(r.probe_loss_clean - r.probe_loss_corrupted))
              .epsilon(1e-12));
    CHECK(r.d == 6);
    CHECK(r.k == 2);
  }
}

TEST_CASE("failed grid points become error rows, not aborts") {
  auto j = synthetic_config();
  j["n_grid"] = {4, 100};  // n = 4 < d = 6 is invalid for the generator
  const auto rows = run_sweep(config_from_json(j), 1);
  bool any_error = false, any_ok = false;
  for (const auto& r : rows) {
    if (r.n == 4) {
      CHECK(!r.error.empty());
      CHECK(std::isnan(r.probe_gap));
      any_error = true;
    } else if (r.error.empty()) {
      any_ok = true;
    }
  }
  CHECK(any_error);
  CHECK(any_ok);
}

TEST_CASE("csv round trip and schema") {
  CHECK(csv_header() ==
        "method,dataset_id,n,alpha,lambda_gamma_max,lambda_theta_max,seed,k,d,"
        "probe_loss_clean,probe_loss_corrupted,probe_gap,subspace_dist,"
        "alpha_je,alpha_rc,regime,error");

  auto cfg = config_from_json(synthetic_config());
  cfg.n_grid = {4, 50};  // include an error row so NaN cells round-trip
  const auto rows = run_sweep(cfg, 1);
  const auto path = temp_file("sslab_sweep_roundtrip.csv");
  write_csv(path.string(), rows);
  const auto back = read_csv(path.string());
  REQUIRE(back.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].regime == rows[i].regime);
    CHECK(back[i].error == rows[i].error);
    if (std::isnan(rows[i].probe_gap))
      CHECK(std::isnan(back[i].probe_gap));
    else
      CHECK(back[i].probe_gap == rows[i].probe_gap);  // %.17g is lossless
  }

  // byte-level determinism of the file itself
  const auto path2 = temp_file("sslab_sweep_roundtrip2.csv");
  write_csv(path2.string(), run_sweep(cfg, 3));
  std::ifstream a(path.string(), std::ios::binary), b(path2.string(), std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("read_csv rejects foreign files") {
  const auto path = temp_file("sslab_bad.csv");
  std::ofstream(path.string()) << "one,two\n1,2\n";
  CHECK_THROWS_AS(read_csv(path.string()), SchemaMismatch);
  std::ofstream(path.string()).close();
  CHECK_THROWS_AS(read_csv(path.string()), SchemaMismatch);  // empty file
  CHECK_THROWS_AS(read_csv("/nonexistent/nope.csv"), IoError);
}

TEST_CASE("svg rendering") {
  const auto cfg = config_from_json(synthetic_config());
  const auto rows = run_sweep(cfg, 1);
  const std::string svg = render_svg(rows);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("alpha=") != std::string::npos);

  // single plottable row still renders
  CHECK(render_svg({rows[0]}).find("circle") != std::string::npos);

  CHECK_THROWS_AS(render_svg({}), SchemaMismatch);
  SweepRow broken = rows[0];
  broken.error = "boom";
  CHECK_THROWS_AS(render_svg({broken}), SchemaMismatch);
}

TEST_CASE("regime fields recomputable from the row spec") {
  const auto cfg = config_from_json(synthetic_config());
  const auto rows = run_sweep(cfg, 1);
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    // rescaled noise spectrum as the sweep constructs it
    datamodel::SpectralSpec spec = *cfg.synthetic;
    double cur = 0.0;
    for (Eigen::Index i = spec.k; i < spec.d; ++i)
      cur = std::max(cur, spec.lambda_gamma[static_cast<size_t>(i)]);
    for (auto& v : spec.lambda_gamma) v *= r.lambda_gamma_max / cur;
    const auto rep = theory::threshold_report(spec);
    CHECK(r.regime == theory::regime_name(rep.regime));
    CHECK(r.alpha_je == doctest::Approx(rep.alpha_je).epsilon(1e-12));
    CHECK(r.alpha_rc == doctest::Approx(rep.alpha_rc).epsilon(1e-12));
  }
}
