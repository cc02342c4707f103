#include "sslab/datamodel.hpp"

#include "sslab/spectral.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sslab::datamodel {

namespace fs = std::filesystem;
using nlohmann::json;

void SpectralSpec::validate() const {
  if (n < 1 || d < 1) throw SpecInvalid("n and d must be positive");
  if (k < 1 || k >= d) throw SpecInvalid("requires 1 <= k < d");
  if (static_cast<Eigen::Index>(c.size()) != k) throw SpecInvalid("c must have length k");
  if (static_cast<Eigen::Index>(lambda_theta.size()) != d)
    throw SpecInvalid("lambda_theta must have length d");
  if (static_cast<Eigen::Index>(lambda_gamma.size()) != d)
    throw SpecInvalid("lambda_gamma must have length d");
  for (size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] > 0.0)) throw SpecInvalid("c entries must be > 0");
    if (i > 0 && c[i] > c[i - 1]) throw SpecInvalid("c must be sorted descending");
  }
  for (double v : lambda_theta)
    if (!(v >= 0.0)) throw SpecInvalid("lambda_theta entries must be >= 0");
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = lambda_gamma[static_cast<size_t>(i)];
    if (i < k && v != 0.0)
      throw SpecInvalid("lambda_gamma must be zero on important components");
    if (i >= k && !(v > 0.0))
      throw SpecInvalid("lambda_gamma must be > 0 on noise components");
  }
  if (label_dim < 1) throw SpecInvalid("label_dim must be >= 1");
}

augmentation::AugmentationModel DataModel::make_augmentation(double alpha) const {
  augmentation::AugmentationModel m;
  m.theta = q * lambda_theta.asDiagonal() * q.transpose();
  m.gamma = gamma;
  m.alpha = alpha;
  return m;
}

namespace {

// Haar-random orthogonal matrix: QR of a Gaussian with the R-diagonal sign fix.
Matrix haar_orthogonal(Eigen::Index d, Rng& rng) {
  const Matrix z = rng.normal_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

// n x d matrix with Haar-distributed orthonormal columns (n >= d).
Matrix haar_frame(Eigen::Index n, Eigen::Index d, Rng& rng) {
  const Matrix z = rng.normal_matrix(n, d);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = Matrix::Identity(n, d);
  q = qr.householderQ() * q;
  const Matrix rfac = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (rfac(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

std::uint32_t read_be_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw TruncatedFile("unexpected end of file in header");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Matrix corrupt(const Matrix& x, const Matrix& gamma, Rng& rng) {
  if (gamma.rows() != x.cols() || gamma.cols() != x.cols())
    throw DimensionMismatch("corrupt: gamma must be d x d");
  const Matrix gamma_sqrt = augmentation::psd_sqrt(gamma);
  const Matrix z = rng.normal_matrix(x.rows(), x.cols());
  return x + z * gamma_sqrt.transpose();
}

DataModel synth_dataset(const SpectralSpec& spec) {
  spec.validate();
  if (spec.n < spec.d) throw SpecInvalid("synth_dataset requires n >= d");

  DataModel dm;
  dm.k = spec.k;
  dm.lambda_theta = Eigen::Map<const Vector>(spec.lambda_theta.data(), spec.d);
  dm.lambda_gamma = Eigen::Map<const Vector>(spec.lambda_gamma.data(), spec.d);

  Rng rng_q(mix_seed(spec.seed, 1));
  Rng rng_l(mix_seed(spec.seed, 2));
  Rng rng_noise(mix_seed(spec.seed, 3));
  Rng rng_labels(mix_seed(spec.seed, 4));

  dm.q = haar_orthogonal(spec.d, rng_q);
  dm.gamma = dm.q * dm.lambda_gamma.asDiagonal() * dm.q.transpose();

  dm.kappa = Vector::Zero(spec.d);
  for (Eigen::Index i = 0; i < spec.k; ++i)
    dm.kappa(i) = std::sqrt(static_cast<double>(spec.n) * spec.c[static_cast<size_t>(i)]);

  const Matrix l = haar_frame(spec.n, spec.d, rng_l);
  dm.x_clean = l * dm.kappa.asDiagonal() * dm.q.transpose();
  dm.x_corrupt = corrupt(dm.x_clean, dm.gamma, rng_noise);

  // Labels: fixed linear readout of the important coordinates. Prop-style
  // consistency statements hold for any target, so a deterministic map per
  // seed keeps golden files stable.
  const Matrix readout = rng_labels.normal_matrix(spec.label_dim, spec.k);
  dm.labels = (dm.x_clean * dm.q.leftCols(spec.k)) * readout.transpose();
  return dm;
}

RawDataset ingest_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw IoError("cannot open " + images_path);
  const std::uint32_t magic = read_be_u32(img);
  if (magic != 0x00000803u)
    throw BadMagic("images magic " + std::to_string(magic));
  const std::uint32_t n = read_be_u32(img);
  const std::uint32_t rows = read_be_u32(img);
  const std::uint32_t cols = read_be_u32(img);
  const std::size_t p = std::size_t(rows) * cols;

  std::vector<unsigned char> buf(p);
  Matrix features(n, static_cast<Eigen::Index>(p));
  for (std::uint32_t i = 0; i < n; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(p));
    if (!img) throw TruncatedFile("image data ends at sample " + std::to_string(i));
    for (std::size_t j = 0; j < p; ++j)
      features(i, static_cast<Eigen::Index>(j)) = buf[j] / 255.0;
  }

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw IoError("cannot open " + labels_path);
  const std::uint32_t lmagic = read_be_u32(lab);
  if (lmagic != 0x00000801u)
    throw BadMagic("labels magic " + std::to_string(lmagic));
  const std::uint32_t ln = read_be_u32(lab);
  if (ln != n)
    throw CountMismatch("images " + std::to_string(n) + " vs labels " + std::to_string(ln));
  std::vector<unsigned char> lbuf(ln);
  lab.read(reinterpret_cast<char*>(lbuf.data()), static_cast<std::streamsize>(ln));
  if (!lab) throw TruncatedFile("label data truncated");

  RawDataset out;
  out.features = std::move(features);
  out.labels.assign(lbuf.begin(), lbuf.end());
  return out;
}

RawDataset ingest_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw TruncatedFile("empty CSV");

  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(s);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };

  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  Eigen::Index label_idx = -1;
  for (size_t j = 0; j < header.size(); ++j)
    if (header[j] == label_column) label_idx = static_cast<Eigen::Index>(j);
  if (label_idx < 0) throw SchemaMismatch("label column '" + label_column + "' not found");

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw RaggedRows("row " + std::to_string(rows.size() + 2) + " has " +
                       std::to_string(cells.size()) + " cells");
    std::vector<double> row;
    for (size_t j = 0; j < cells.size(); ++j) {
      double v;
      try {
        size_t pos = 0;
        v = std::stod(cells[j], &pos);
        if (pos != cells[j].size()) throw std::invalid_argument(cells[j]);
      } catch (const std::exception&) {
        throw NonNumericCell("cell '" + cells[j] + "' in row " +
                             std::to_string(rows.size() + 2));
      }
      if (static_cast<Eigen::Index>(j) == label_idx)
        raw_labels.push_back(v);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyData("CSV has no data rows");

  RawDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

  // Integer-encode labels by first appearance.
  std::vector<double> seen;
  for (double v : raw_labels) {
    auto it = std::find(seen.begin(), seen.end(), v);
    if (it == seen.end()) {
      seen.push_back(v);
      out.labels.push_back(static_cast<int>(seen.size()) - 1);
    } else {
      out.labels.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  return out;
}

Benchmark build_corrupted_benchmark(const Matrix& raw, const std::vector<int>& labels,
                                    Eigen::Index pca_dim, Eigen::Index noise_dims,
                                    double lambda_theta_max, double lambda_gamma_max,
                                    std::uint64_t seed) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index p = raw.cols();
  if (pca_dim > p) throw SpecInvalid("pca_dim exceeds feature count");
  if (n <= pca_dim) throw InsufficientSamples("need n > pca_dim");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw CountMismatch("label count does not match sample count");

  const Eigen::Index k = pca_dim;
  const Eigen::Index d = pca_dim + noise_dims;

  // Center, then project onto the top principal components of the covariance.
  const Vector mean = raw.colwise().mean();
  const Matrix centered = raw.rowwise() - mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  spectral::EigenPair ep = spectral::sym_eig(cov);
  const Matrix scores = centered * ep.basis.leftCols(k);  // n x k

  DataModel dm;
  dm.k = k;
  dm.q = Matrix::Identity(d, d);
  dm.x_clean = Matrix::Zero(n, d);
  dm.x_clean.leftCols(k) = scores;

  SpectralSpec spec;
  spec.n = n;
  spec.d = d;
  spec.k = k;
  spec.seed = seed;
  spec.c.resize(static_cast<size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    double e = (scores.col(i).squaredNorm()) / static_cast<double>(n);
    if (!(e > 0.0)) throw InsufficientSamples("degenerate principal component");
    spec.c[static_cast<size_t>(i)] = e;
  }

  // Spectra for Theta and Gamma. Gamma noise eigenvalues are sampled away
  // from zero so the strict-positivity assumption on noise components holds.
  Rng rng_spec(mix_seed(seed, 11));
  spec.lambda_theta.resize(static_cast<size_t>(d));
  spec.lambda_gamma.assign(static_cast<size_t>(d), 0.0);
  for (Eigen::Index i = 0; i < d; ++i)
    spec.lambda_theta[static_cast<size_t>(i)] = rng_spec.uniform(0.0, lambda_theta_max);
  const double lo = 1e-6 * lambda_gamma_max;
  for (Eigen::Index i = k; i < d; ++i)
    spec.lambda_gamma[static_cast<size_t>(i)] = rng_spec.uniform(lo, lambda_gamma_max);

  dm.lambda_theta = Eigen::Map<const Vector>(spec.lambda_theta.data(), d);
  dm.lambda_gamma = Eigen::Map<const Vector>(spec.lambda_gamma.data(), d);
  dm.gamma = dm.lambda_gamma.asDiagonal();
  dm.kappa = Vector::Zero(d);
  for (Eigen::Index i = 0; i < k; ++i)
    dm.kappa(i) = std::sqrt(static_cast<double>(n) * spec.c[static_cast<size_t>(i)]);

  Rng rng_noise(mix_seed(seed, 12));
  if (noise_dims == 0) {
    dm.x_corrupt = dm.x_clean;
  } else {
    dm.x_corrupt = corrupt(dm.x_clean, dm.gamma, rng_noise);
  }

  // One-hot label matrix.
  int num_classes = 0;
  for (int c : labels) num_classes = std::max(num_classes, c + 1);
  Matrix y = Matrix::Zero(n, num_classes);
  for (Eigen::Index i = 0; i < n; ++i) y(i, labels[static_cast<size_t>(i)]) = 1.0;
  dm.labels = std::move(y);
  spec.label_dim = num_classes;

  return Benchmark{std::move(dm), std::move(spec)};
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!out) throw IoError("write failed for " + path);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (!in) throw TruncatedFile("matrix header in " + path);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      if (!in) throw TruncatedFile("matrix data in " + path);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  return m;
}

void save_datamodel(const std::string& dir, const DataModel& model,
                    const SpectralSpec& spec) {
  fs::create_directories(dir);
  save_matrix(dir + "/x_clean.bin", model.x_clean);
  save_matrix(dir + "/x_corrupt.bin", model.x_corrupt);
  save_matrix(dir + "/q.bin", model.q);
  save_matrix(dir + "/gamma.bin", model.gamma);
  save_matrix(dir + "/kappa.bin", model.kappa);
  save_matrix(dir + "/lambda_theta.bin", model.lambda_theta);
  save_matrix(dir + "/lambda_gamma.bin", model.lambda_gamma);
  if (model.labels) save_matrix(dir + "/labels.bin", *model.labels);

  json manifest;
  manifest["schema_version"] = 1;
  manifest["n"] = spec.n;
  manifest["d"] = spec.d;
  manifest["k"] = spec.k;
  manifest["c"] = spec.c;
  manifest["lambda_theta"] = spec.lambda_theta;
  manifest["lambda_gamma"] = spec.lambda_gamma;
  manifest["seed"] = spec.seed;
  manifest["label_dim"] = spec.label_dim;
  manifest["has_labels"] = model.labels.has_value();
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir);
  out << manifest.dump(2) << "\n";
}

DataModel load_datamodel(const std::string& dir, SpectralSpec* spec_out) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw IoError("cannot open manifest in " + dir);
  json manifest = json::parse(in);

  SpectralSpec spec;
  spec.n = manifest.at("n").get<Eigen::Index>();
  spec.d = manifest.at("d").get<Eigen::Index>();
  spec.k = manifest.at("k").get<Eigen::Index>();
  spec.c = manifest.at("c").get<std::vector<double>>();
  spec.lambda_theta = manifest.at("lambda_theta").get<std::vector<double>>();
  spec.lambda_gamma = manifest.at("lambda_gamma").get<std::vector<double>>();
  spec.seed = manifest.at("seed").get<std::uint64_t>();
  spec.label_dim = manifest.at("label_dim").get<Eigen::Index>();
  if (spec_out) *spec_out = spec;

  DataModel dm;
  dm.k = spec.k;
  dm.x_clean = load_matrix(dir + "/x_clean.bin");
  dm.x_corrupt = load_matrix(dir + "/x_corrupt.bin");
  dm.q = load_matrix(dir + "/q.bin");
  dm.gamma = load_matrix(dir + "/gamma.bin");
  dm.kappa = load_matrix(dir + "/kappa.bin");
  dm.lambda_theta = load_matrix(dir + "/lambda_theta.bin");
  dm.lambda_gamma = load_matrix(dir + "/lambda_gamma.bin");
  if (manifest.at("has_labels").get<bool>())
    dm.labels = load_matrix(dir + "/labels.bin");
  return dm;
}

}  // namespace sslab::datamodel
