// Experiment sweep harness: grid configs over (method, n, alpha,
// lambda_gamma_max, seed), deterministic parallel execution, and the CSV
// schema shared with the plotter.

#ifndef SSLAB_SWEEP_HPP
#define SSLAB_SWEEP_HPP

#include "sslab/datamodel.hpp"
#include "sslab/theory.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sslab::sweep {

nlohmann::json spec_to_json(const datamodel::SpectralSpec& spec);
datamodel::SpectralSpec spec_from_json(const nlohmann::json& j);

struct BenchmarkSource {
  std::string format;        // "idx", "csv" or "dir"
  std::string images_path;   // idx images / csv file / ingested directory
  std::string labels_path;   // idx labels (unused otherwise)
  std::string label_column;  // csv only
  Eigen::Index pca_dim = 50;
  Eigen::Index noise_dims = 50;
  double lambda_theta_max = 1e4;
};

struct SweepConfig {
  // Exactly one of these is set.
  std::optional<datamodel::SpectralSpec> synthetic;
  std::optional<BenchmarkSource> benchmark;

  std::vector<theory::Method> methods;
  std::vector<Eigen::Index> n_grid;
  std::vector<double> alpha_grid;
  std::vector<double> lambda_gamma_max_grid;
  std::vector<std::uint64_t> seeds;
  Eigen::Index k = 1;
  std::string dataset_id = "synthetic";
  std::string output_path;

  void validate() const;
};

SweepConfig config_from_json(const nlohmann::json& j);
SweepConfig load_config(const std::string& path);

struct SweepRow {
  std::string method;
  std::string dataset_id;
  Eigen::Index n = 0;
  double alpha = 0.0;
  double lambda_gamma_max = 0.0;
  double lambda_theta_max = 0.0;
  std::uint64_t seed = 0;
  Eigen::Index k = 0;
  Eigen::Index d = 0;
  double probe_loss_clean = 0.0;
  double probe_loss_corrupted = 0.0;
  double probe_gap = 0.0;
  double subspace_dist = 0.0;
  double alpha_je = 0.0;
  double alpha_rc = 0.0;
  std::string regime;
  std::string error;  // empty on success
};

// Exact CSV header, comma separated, matching write_csv output.
std::string csv_header();

// Runs every grid point; rows come back in lexicographic grid order
// (method, n, alpha, lambda_gamma_max, seed) regardless of thread count.
std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads);

void write_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(const std::string& path);

// Static SVG line charts: probe_gap vs n (log x), one line per alpha, one
// panel per (method, lambda_gamma_max).
std::string render_svg(const std::vector<SweepRow>& rows);

}  // namespace sslab::sweep

#endif  // SSLAB_SWEEP_HPP
