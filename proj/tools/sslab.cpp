// Command-line front end: dataset generation/ingestion, threshold reports,
// experiment sweeps, self-verification, and SVG plotting.
//
// Exit codes: 0 success, 1 verification/computation failure, 2 usage error,
// 3 I/O or file-format error.

#include "sslab/datamodel.hpp"
#include "sslab/evalx.hpp"
#include "sslab/oracle.hpp"
#include "sslab/solvers.hpp"
#include "sslab/spectral.hpp"
#include "sslab/sweep.hpp"
#include "sslab/theory.hpp"
#include "sslab/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace {

using nlohmann::json;

std::string data_dir() {
  if (const char* env = std::getenv("SSLAB_DATA_DIR")) return env;
  return "data";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sslab::IoError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sslab::IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw sslab::IoError("short write to " + path);
}

int run_generate(const std::string& config_path, const std::string& out,
                 std::uint64_t seed, bool seed_set) {
  sslab::datamodel::SpectralSpec spec =
      sslab::sweep::spec_from_json(load_json(config_path));
  if (seed_set) spec.seed = seed;
  spec.validate();
  const sslab::datamodel::DataModel model = sslab::datamodel::synth_dataset(spec);
  sslab::datamodel::save_datamodel(out, model, spec);
  std::cout << "wrote " << spec.n << " x " << spec.d << " dataset to " << out
            << "\n";
  return 0;
}

int run_thresholds(const std::string& config_path, const std::string& out) {
  sslab::datamodel::SpectralSpec spec =
      sslab::sweep::spec_from_json(load_json(config_path));
  spec.validate();
  const sslab::theory::ThresholdReport r = sslab::theory::threshold_report(spec);
  json j;
  j["delta"] = r.delta;
  j["eta"] = r.eta;
  j["alpha_je_sq_raw"] = r.alpha_je_sq_raw;
  j["alpha_rc_sq_raw"] = r.alpha_rc_sq_raw;
  j["alpha_je"] = r.alpha_je;
  j["alpha_rc"] = r.alpha_rc;
  j["regime"] = sslab::theory::regime_name(r.regime);
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out, int threads) {
  sslab::sweep::SweepConfig config = sslab::sweep::load_config(config_path);
  if (!out.empty()) config.output_path = out;
  if (config.output_path.empty())
    throw CLI::ValidationError("sweep", "no output path in config or --out");
  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<sslab::sweep::SweepRow> rows =
      sslab::sweep::run_sweep(config, threads);
  sslab::sweep::write_csv(config.output_path, rows);
  std::size_t failed = 0;
  for (const auto& row : rows)
    if (!row.error.empty()) ++failed;
  std::cout << rows.size() << " rows -> " << config.output_path;
  if (failed > 0) std::cout << " (" << failed << " with errors)";
  std::cout << "\n";
  return 0;
}

int run_verify(const std::string& suite, int instances, int specs, int draws,
               std::uint64_t seed) {
  bool ok = true;
  const auto report = [&](const char* name, const std::vector<sslab::verify::Check>& checks) {
    for (const auto& c : checks) {
      std::cout << (c.pass ? "PASS" : "FAIL") << "  " << name << "/" << c.name;
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
    }
    ok = ok && sslab::verify::all_pass(checks);
  };
  const bool all = suite == "all";
  if (all || suite == "oracles")
    report("oracles", sslab::verify::suite_oracles(instances, seed));
  if (all || suite == "invariants")
    report("invariants", sslab::verify::suite_invariants(seed));
  if (all || suite == "thresholds")
    report("thresholds", sslab::verify::suite_thresholds(specs, seed));
  if (all || suite == "lemma")
    report("lemma", sslab::verify::suite_lemma(10, draws, seed));
  std::cout << (ok ? "all checks passed" : "CHECKS FAILED") << "\n";
  return ok ? 0 : 1;
}

int run_plot(const std::string& input, const std::string& out) {
  const std::vector<sslab::sweep::SweepRow> rows = sslab::sweep::read_csv(input);
  write_text(out, sslab::sweep::render_svg(rows));
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_ingest(const std::string& images, const std::string& labels,
               const std::string& csv, const std::string& label_column,
               const std::string& out, Eigen::Index pca_dim,
               Eigen::Index noise_dims, double lambda_theta_max,
               double lambda_gamma_max, std::uint64_t seed) {
  sslab::datamodel::RawDataset raw;
  if (!csv.empty()) {
    raw = sslab::datamodel::ingest_csv(csv, label_column);
  } else if (!images.empty() && !labels.empty()) {
    raw = sslab::datamodel::ingest_idx(images, labels);
  } else {
    throw CLI::ValidationError(
        "ingest", "need either --csv with --label-column, or --images and --labels");
  }
  const sslab::datamodel::Benchmark bench = sslab::datamodel::build_corrupted_benchmark(
      raw.features, raw.labels, pca_dim, noise_dims, lambda_theta_max,
      lambda_gamma_max, seed);
  std::string dest = out.empty()
                         ? (std::filesystem::path(data_dir()) / "ingested").string()
                         : out;
  sslab::datamodel::save_datamodel(dest, bench.data, bench.spec);
  std::cout << "ingested " << raw.features.rows() << " samples -> " << dest << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form linear self-supervised learning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, input_path;
  std::uint64_t seed = 0;
  bool strict = false;
  int threads = 0;

  auto* generate = app.add_subcommand("generate", "Sample a synthetic dataset from a spectral spec");
  generate->add_option("--config", config_path, "Spectral spec JSON")->required();
  generate->add_option("--out", out_path, "Output dataset directory")->required();
  auto* gen_seed = generate->add_option("--seed", seed, "Override the spec seed");

  auto* thresholds = app.add_subcommand("thresholds", "Alignment thresholds and regime for a spectral spec");
  thresholds->add_option("--config", config_path, "Spectral spec JSON")->required();
  thresholds->add_option("--out", out_path, "Write report JSON here instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "Run an experiment grid and write the CSV");
  sweep->add_option("--config", config_path, "Sweep config JSON")->required();
  sweep->add_option("--out", out_path, "CSV path (overrides config)");
  sweep->add_option("--threads", threads, "Worker threads (0 = hardware)");

  int v_instances = 30, v_specs = 200, v_draws = 20000;
  std::string v_suite = "all";
  auto* verify = app.add_subcommand("verify", "Run the self-check suites");
  verify->add_option("--suite", v_suite, "oracles | invariants | thresholds | lemma | all")
      ->check(CLI::IsMember({"oracles", "invariants", "thresholds", "lemma", "all"}));
  verify->add_option("--instances", v_instances, "Random instances per oracle check");
  verify->add_option("--specs", v_specs, "Random specs for the threshold checks");
  verify->add_option("--draws", v_draws, "Monte-Carlo draws for the loss identity");
  verify->add_option("--seed", seed, "Base seed");
  verify->add_flag("--strict", strict, "Heavier settings (more instances and draws)");

  auto* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG charts");
  plot->add_option("--config,--in", input_path, "Sweep CSV")->required();
  plot->add_option("--out", out_path, "Output SVG path")->required();

  std::string idx_images, idx_labels, csv_file, label_column;
  Eigen::Index pca_dim = 50, noise_dims = 50;
  double lt_max = 1e4, lg_max = 1e3;
  auto* ingest = app.add_subcommand("ingest", "Import real data and build the corrupted benchmark");
  ingest->add_option("--images", idx_images, "IDX image file");
  ingest->add_option("--labels", idx_labels, "IDX label file");
  ingest->add_option("--csv", csv_file, "Numeric CSV with a header row");
  ingest->add_option("--label-column", label_column, "Label column name (CSV)");
  ingest->add_option("--out", out_path, "Output dataset directory (default $SSLAB_DATA_DIR/ingested)");
  ingest->add_option("--pca-dim", pca_dim, "Principal components to keep");
  ingest->add_option("--noise-dims", noise_dims, "Appended noise coordinates");
  ingest->add_option("--lambda-theta-max", lt_max, "Upper bound of the uniform theta spectrum");
  ingest->add_option("--lambda-gamma-max", lg_max, "Upper bound of the uniform gamma spectrum");
  ingest->add_option("--seed", seed, "Benchmark construction seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed())
      return run_generate(config_path, out_path, seed, gen_seed->count() > 0);
    if (thresholds->parsed()) return run_thresholds(config_path, out_path);
    if (sweep->parsed()) return run_sweep(config_path, out_path, threads);
    if (verify->parsed()) {
      if (strict) {
        v_instances = std::max(v_instances, 50);
        v_specs = std::max(v_specs, 500);
        v_draws = std::max(v_draws, 100000);
      }
      return run_verify(v_suite, v_instances, v_specs, v_draws,
                        seed == 0 ? 7 : seed);
    }
    if (plot->parsed()) return run_plot(input_path, out_path);
    if (ingest->parsed())
      return run_ingest(idx_images, idx_labels, csv_file, label_column, out_path,
                        pca_dim, noise_dims, lt_max, lg_max, seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const sslab::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const sslab::BadMagic& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const sslab::TruncatedFile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const sslab::SchemaMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const sslab::SpecInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
