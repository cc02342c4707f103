#include "sslab/sweep.hpp"

#include "sslab/evalx.hpp"
#include "sslab/solvers.hpp"
#include "sslab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace sslab::sweep {

using nlohmann::json;

nlohmann::json spec_to_json(const datamodel::SpectralSpec& spec) {
  json j;
  j["n"] = spec.n;
  j["d"] = spec.d;
  j["k"] = spec.k;
  j["c"] = spec.c;
  j["lambda_theta"] = spec.lambda_theta;
  j["lambda_gamma"] = spec.lambda_gamma;
  j["seed"] = spec.seed;
  j["label_dim"] = spec.label_dim;
  return j;
}

datamodel::SpectralSpec spec_from_json(const nlohmann::json& j) {
  datamodel::SpectralSpec spec;
  spec.n = j.at("n").get<Eigen::Index>();
  spec.d = j.at("d").get<Eigen::Index>();
  spec.k = j.at("k").get<Eigen::Index>();
  spec.c = j.at("c").get<std::vector<double>>();
  spec.lambda_theta = j.at("lambda_theta").get<std::vector<double>>();
  spec.lambda_gamma = j.at("lambda_gamma").get<std::vector<double>>();
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.label_dim = j.value("label_dim", Eigen::Index{1});
  spec.validate();
  return spec;
}

void SweepConfig::validate() const {
  if (synthetic.has_value() == benchmark.has_value())
    throw SpecInvalid("config needs exactly one of synthetic / benchmark dataset");
  if (methods.empty() || n_grid.empty() || alpha_grid.empty() ||
      lambda_gamma_max_grid.empty() || seeds.empty())
    throw SpecInvalid("all grids must be non-empty");
  for (double a : alpha_grid)
    if (!(a >= 0.0)) throw SpecInvalid("alpha grid entries must be >= 0");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw SpecInvalid("seeds must be distinct");
  if (k < 1) throw SpecInvalid("k must be >= 1");
}

SweepConfig config_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1)
    throw SchemaMismatch("unsupported config schema_version");
  SweepConfig cfg;
  const json& ds = j.at("dataset");
  const std::string type = ds.at("type").get<std::string>();
  if (type == "synthetic") {
    cfg.synthetic = spec_from_json(ds.at("spec"));
    cfg.dataset_id = ds.value("id", std::string("synthetic"));
  } else if (type == "benchmark") {
    BenchmarkSource src;
    src.format = ds.at("format").get<std::string>();
    src.images_path = ds.at("images").get<std::string>();
    src.labels_path = ds.value("labels", std::string());
    src.label_column = ds.value("label_column", std::string());
    src.pca_dim = ds.value("pca_dim", Eigen::Index{50});
    src.noise_dims = ds.value("noise_dims", Eigen::Index{50});
    src.lambda_theta_max = ds.value("lambda_theta_max", 1e4);
    cfg.benchmark = src;
    cfg.dataset_id = ds.value("id", std::string("benchmark"));
  } else {
    throw SchemaMismatch("unknown dataset type '" + type + "'");
  }

  for (const auto& m : j.at("methods")) {
    const std::string name = m.get<std::string>();
    if (name == "supervised")
      cfg.methods.push_back(theory::Method::Supervised);
    else if (name == "je")
      cfg.methods.push_back(theory::Method::JointEmbedding);
    else if (name == "rc")
      cfg.methods.push_back(theory::Method::Reconstruction);
    else
      throw SchemaMismatch("unknown method '" + name + "'");
  }
  cfg.n_grid = j.at("n_grid").get<std::vector<Eigen::Index>>();
  cfg.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  cfg.lambda_gamma_max_grid = j.at("lambda_gamma_max_grid").get<std::vector<double>>();
  cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  cfg.k = j.at("k").get<Eigen::Index>();
  cfg.output_path = j.value("output_path", std::string());
  cfg.validate();
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return config_from_json(json::parse(in));
}

namespace {

struct GridPoint {
  theory::Method method;
  Eigen::Index n;
  double alpha;
  double lambda_gamma_max;
  std::uint64_t seed;
};

datamodel::RawDataset load_benchmark_raw(const BenchmarkSource& src) {
  if (src.format == "idx")
    return datamodel::ingest_idx(src.images_path, src.labels_path);
  if (src.format == "csv")
    return datamodel::ingest_csv(src.images_path, src.label_column);
  if (src.format == "dir") {
    datamodel::RawDataset raw;
    raw.features = datamodel::load_matrix(src.images_path + "/features.bin");
    const Matrix lab = datamodel::load_matrix(src.images_path + "/labels.bin");
    raw.labels.resize(static_cast<size_t>(lab.rows()));
    for (Eigen::Index i = 0; i < lab.rows(); ++i)
      raw.labels[static_cast<size_t>(i)] = static_cast<int>(lab(i, 0));
    return raw;
  }
  throw SchemaMismatch("unknown benchmark format '" + src.format + "'");
}

std::uint64_t dataset_seed(std::uint64_t seed, Eigen::Index n, double lgmax) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(lgmax));
  std::memcpy(&bits, &lgmax, sizeof(bits));
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(n)), bits);
}

// Subsample without replacement via a seeded partial Fisher-Yates shuffle.
std::vector<Eigen::Index> subsample_indices(Eigen::Index total, Eigen::Index n,
                                            std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) idx[static_cast<size_t>(i)] = i;
  Rng rng(mix_seed(seed, 0xf15));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j =
        i + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(total - i));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(n));
  return idx;
}

struct PointData {
  datamodel::DataModel data;
  datamodel::SpectralSpec spec;
  double lambda_theta_max = 0.0;
};

PointData build_point_dataset(const SweepConfig& cfg,
                              const datamodel::RawDataset* raw, const GridPoint& gp) {
  PointData pd;
  if (cfg.synthetic) {
    datamodel::SpectralSpec spec = *cfg.synthetic;
    spec.n = gp.n;
    spec.seed = dataset_seed(gp.seed, gp.n, gp.lambda_gamma_max);
    // Rescale the noise spectrum so its largest entry matches the grid value.
    double cur_max = 0.0;
    for (Eigen::Index i = spec.k; i < spec.d; ++i)
      cur_max = std::max(cur_max, spec.lambda_gamma[static_cast<size_t>(i)]);
    const double factor = gp.lambda_gamma_max / cur_max;
    for (auto& v : spec.lambda_gamma) v *= factor;
    pd.spec = spec;
    pd.data = datamodel::synth_dataset(spec);
    pd.lambda_theta_max =
        *std::max_element(spec.lambda_theta.begin(), spec.lambda_theta.end());
  } else {
    const BenchmarkSource& src = *cfg.benchmark;
    if (gp.n > raw->features.rows())
      throw InsufficientSamples("n exceeds dataset size");
    const std::uint64_t ds = dataset_seed(gp.seed, gp.n, gp.lambda_gamma_max);
    const std::vector<Eigen::Index> idx =
        subsample_indices(raw->features.rows(), gp.n, ds);
    Matrix sub(gp.n, raw->features.cols());
    std::vector<int> sub_labels(static_cast<size_t>(gp.n));
    for (Eigen::Index i = 0; i < gp.n; ++i) {
      sub.row(i) = raw->features.row(idx[static_cast<size_t>(i)]);
      sub_labels[static_cast<size_t>(i)] =
          raw->labels[static_cast<size_t>(idx[static_cast<size_t>(i)])];
    }
    datamodel::Benchmark bm = datamodel::build_corrupted_benchmark(
        sub, sub_labels, src.pca_dim, src.noise_dims, src.lambda_theta_max,
        gp.lambda_gamma_max, ds);
    pd.data = std::move(bm.data);
    pd.spec = std::move(bm.spec);
    pd.lambda_theta_max = src.lambda_theta_max;
  }
  return pd;
}

SweepRow evaluate_point(const SweepConfig& cfg, const datamodel::RawDataset* raw,
                        const GridPoint& gp) {
  SweepRow row;
  row.method = theory::method_name(gp.method);
  row.dataset_id = cfg.dataset_id;
  row.n = gp.n;
  row.alpha = gp.alpha;
  row.lambda_gamma_max = gp.lambda_gamma_max;
  row.seed = gp.seed;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.probe_loss_clean = row.probe_loss_corrupted = row.probe_gap = nan;
  row.subspace_dist = row.alpha_je = row.alpha_rc = nan;

  try {
    const PointData pd = build_point_dataset(cfg, raw, gp);
    row.lambda_theta_max = pd.lambda_theta_max;
    row.d = pd.spec.d;
    const Eigen::Index k = std::min<Eigen::Index>(cfg.k, pd.spec.k);
    row.k = k;

    const theory::ThresholdReport rep = theory::threshold_report(pd.spec);
    row.alpha_je = rep.alpha_je;
    row.alpha_rc = rep.alpha_rc;
    row.regime = theory::regime_name(rep.regime);

    const augmentation::AugmentationModel aug = pd.data.make_augmentation(gp.alpha);
    const Matrix sigma = augmentation::aug_covariance(aug);
    const Matrix& y = pd.data.labels.value();

    solvers::SolveOptions opts;
    opts.strict = false;
    opts.jitter = true;

    Matrix enc_clean, enc_corrupt;
    switch (gp.method) {
      case theory::Method::Supervised:
        enc_clean = solvers::solve_supervised(pd.data.x_clean, y, sigma, opts).v;
        enc_corrupt = solvers::solve_supervised(pd.data.x_corrupt, y, sigma, opts).v;
        break;
      case theory::Method::JointEmbedding:
        enc_clean = solvers::solve_joint_embedding(
                        augmentation::analytic_moments(aug, pd.data.x_clean), k, opts)
                        .w;
        enc_corrupt = solvers::solve_joint_embedding(
                          augmentation::analytic_moments(aug, pd.data.x_corrupt), k, opts)
                          .w;
        break;
      case theory::Method::Reconstruction:
        enc_clean = solvers::solve_reconstruction(pd.data.x_clean, sigma, k, opts).encoder;
        enc_corrupt =
            solvers::solve_reconstruction(pd.data.x_corrupt, sigma, k, opts).encoder;
        break;
    }

    const Matrix repr_clean = evalx::represent(enc_clean, pd.data.x_clean);
    const Matrix repr_corrupt = evalx::represent(enc_corrupt, pd.data.x_corrupt);
    row.probe_loss_clean = evalx::fit_probe(repr_clean, y).loss;
    row.probe_loss_corrupted = evalx::fit_probe(repr_corrupt, y).loss;
    row.probe_gap = std::abs(row.probe_loss_clean - row.probe_loss_corrupted);

    const Matrix b1 = spectral::row_space_basis(enc_clean);
    const Matrix b2 = spectral::row_space_basis(enc_corrupt);
    row.subspace_dist =
        b1.cols() == b2.cols() ? spectral::subspace_distance(b1, b2) : nan;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    row.error = msg;
  }
  return row;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "method,dataset_id,n,alpha,lambda_gamma_max,lambda_theta_max,seed,k,d,"
         "probe_loss_clean,probe_loss_corrupted,probe_gap,subspace_dist,"
         "alpha_je,alpha_rc,regime,error";
}

std::vector<SweepRow> run_sweep(const SweepConfig& config, int threads) {
  config.validate();

  datamodel::RawDataset raw;
  const datamodel::RawDataset* raw_ptr = nullptr;
  if (config.benchmark) {
    raw = load_benchmark_raw(*config.benchmark);
    raw_ptr = &raw;
  }

  std::vector<GridPoint> grid;
  for (theory::Method m : config.methods)
    for (Eigen::Index n : config.n_grid)
      for (double a : config.alpha_grid)
        for (double lg : config.lambda_gamma_max_grid)
          for (std::uint64_t s : config.seeds) grid.push_back({m, n, a, lg, s});

  std::vector<SweepRow> rows(grid.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      rows[i] = evaluate_point(config, raw_ptr, grid[i]);
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!out) throw IoError("cannot write " + path);
  out << csv_header() << "\n";
  for (const SweepRow& r : rows) {
    out << r.method << ',' << r.dataset_id << ',' << r.n << ','
        << format_double(r.alpha) << ',' << format_double(r.lambda_gamma_max) << ','
        << format_double(r.lambda_theta_max) << ',' << r.seed << ',' << r.k << ','
        << r.d << ',' << format_double(r.probe_loss_clean) << ','
        << format_double(r.probe_loss_corrupted) << ',' << format_double(r.probe_gap)
        << ',' << format_double(r.subspace_dist) << ',' << format_double(r.alpha_je)
        << ',' << format_double(r.alpha_rc) << ',' << r.regime << ',' << r.error
        << "\n";
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatch("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw SchemaMismatch("unexpected CSV header");

  auto parse_double = [](const std::string& s) {
    if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
  };

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    cells.resize(17);
    SweepRow r;
    r.method = cells[0];
    r.dataset_id = cells[1];
    r.n = std::stoll(cells[2]);
    r.alpha = parse_double(cells[3]);
    r.lambda_gamma_max = parse_double(cells[4]);
    r.lambda_theta_max = parse_double(cells[5]);
    r.seed = std::stoull(cells[6]);
    r.k = std::stoll(cells[7]);
    r.d = std::stoll(cells[8]);
    r.probe_loss_clean = parse_double(cells[9]);
    r.probe_loss_corrupted = parse_double(cells[10]);
    r.probe_gap = parse_double(cells[11]);
    r.subspace_dist = parse_double(cells[12]);
    r.alpha_je = parse_double(cells[13]);
    r.alpha_rc = parse_double(cells[14]);
    r.regime = cells[15];
    r.error = cells[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<SweepRow>& rows) {
  // panel key -> alpha -> n -> mean gap over seeds
  std::map<std::pair<std::string, double>, std::map<double, std::map<Eigen::Index, std::pair<double, int>>>>
      panels;
  for (const SweepRow& r : rows) {
    if (!r.error.empty() || std::isnan(r.probe_gap)) continue;
    auto& acc = panels[{r.method, r.lambda_gamma_max}][r.alpha][r.n];
    acc.first += r.probe_gap;
    acc.second += 1;
  }
  if (panels.empty()) throw SchemaMismatch("no plottable rows");

  const int pw = 360, ph = 300, margin = 55;
  const int cols = static_cast<int>(panels.size());
  const int width = cols * pw + 20;
  const int height = ph + 60;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  int panel_idx = 0;
  for (const auto& [key, lines] : panels) {
    const int x0 = panel_idx * pw + margin;
    const int y0 = 20;
    const int plot_w = pw - margin - 20;
    const int plot_h = ph - 40;

    double n_min = std::numeric_limits<double>::infinity(), n_max = 0;
    double g_min = std::numeric_limits<double>::infinity(), g_max = 0;
    for (const auto& [alpha, pts] : lines)
      for (const auto& [n, acc] : pts) {
        const double g = std::max(acc.first / acc.second, 1e-12);
        n_min = std::min(n_min, double(n));
        n_max = std::max(n_max, double(n));
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
      }
    if (n_max <= n_min) n_max = n_min * 10;
    if (g_max <= g_min) g_max = g_min * 10;

    auto xpos = [&](double n) {
      return x0 + plot_w * (std::log10(n) - std::log10(n_min)) /
                      (std::log10(n_max) - std::log10(n_min));
    };
    auto ypos = [&](double g) {
      g = std::max(g, 1e-12);
      return y0 + plot_h -
             plot_h * (std::log10(g) - std::log10(g_min)) /
                 (std::log10(g_max) - std::log10(g_min));
    };

    svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 - 5
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(key.first)
        << "  (lambda_gamma_max=" << key.second << ")</text>\n";
    svg << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"" << y0 + plot_h + 30
        << "\" text-anchor=\"middle\" font-size=\"11\">n (log scale)</text>\n";
    svg << "<text x=\"" << x0 - 40 << "\" y=\"" << y0 + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
        << x0 - 40 << " " << y0 + plot_h / 2 << ")\">probe gap (log)</text>\n";

    int li = 0;
    for (const auto& [alpha, pts] : lines) {
      const char* color = palette[li % 8];
      std::ostringstream poly;
      for (const auto& [n, acc] : pts)
        poly << xpos(double(n)) << "," << ypos(acc.first / acc.second) << " ";
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"" << poly.str() << "\"/>\n";
      for (const auto& [n, acc] : pts)
        svg << "<circle cx=\"" << xpos(double(n)) << "\" cy=\""
            << ypos(acc.first / acc.second) << "\" r=\"2.5\" fill=\"" << color
            << "\"/>\n";
      svg << "<text x=\"" << x0 + plot_w - 70 << "\" y=\"" << y0 + 15 + 13 * li
          << "\" font-size=\"11\" fill=\"" << color << "\">alpha=" << alpha
          << "</text>\n";
      ++li;
    }
    ++panel_idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace sslab::sweep
