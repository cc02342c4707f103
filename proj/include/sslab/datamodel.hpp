// Synthetic important/noise-component data generation, dataset ingestion
// (IDX, CSV), the PCA + appended-noise corrupted benchmark, and on-disk
// dataset serialization.

#ifndef SSLAB_DATAMODEL_HPP
#define SSLAB_DATAMODEL_HPP

#include "sslab/augmentation.hpp"
#include "sslab/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sslab::datamodel {

// Spectral description of the data/noise/augmentation family in the shared
// eigenbasis: k important components with per-sample energies c_i, noise
// eigenvalues zero on important components and strictly positive beyond.
struct SpectralSpec {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  std::vector<double> c;             // length k, sorted descending, > 0
  std::vector<double> lambda_theta;  // length d, >= 0
  std::vector<double> lambda_gamma;  // length d, zero for i < k, > 0 after
  std::uint64_t seed = 0;
  Eigen::Index label_dim = 1;

  void validate() const;
};

struct DataModel {
  Matrix x_clean;    // n x d, supported on the first k columns of q
  Matrix x_corrupt;  // x_clean + N, N rows ~ N(0, gamma)
  Matrix q;          // d x d orthogonal shared eigenbasis
  Vector kappa;      // length d singular values, zero beyond k
  Matrix gamma;      // d x d noise covariance
  std::optional<Matrix> labels;  // n x l

  Eigen::Index k = 0;
  Vector lambda_theta;  // length d, diagonal of Theta in the q basis
  Vector lambda_gamma;  // length d

  // The T(alpha) family sharing this model's eigenbasis.
  augmentation::AugmentationModel make_augmentation(double alpha) const;
};

// Exact construction X = sqrt(n) L diag(sqrt(c)) Q^T with Haar-random Q and
// L, then additive Gaussian corruption. Deterministic per spec.seed.
DataModel synth_dataset(const SpectralSpec& spec);

// Adds independent N(0, gamma) rows to x.
Matrix corrupt(const Matrix& x, const Matrix& gamma, Rng& rng);

struct RawDataset {
  Matrix features;          // n x p
  std::vector<int> labels;  // n class ids
};

// IDX (MNIST-family) readers: big-endian, magic 0x803 / 0x801, pixels
// scaled to [0, 1].
RawDataset ingest_idx(const std::string& images_path, const std::string& labels_path);

// Rectangular numeric CSV with a header row; labels integer-encoded by first
// appearance in the named column.
RawDataset ingest_csv(const std::string& path, const std::string& label_column);

struct Benchmark {
  DataModel data;
  SpectralSpec spec;  // spectral description of the built dataset
};

// PCA embedding of real data into the first pca_dim coordinates of a
// (pca_dim + noise_dims)-dimensional space, appended noise coordinates with
// uniformly sampled spectra, one-hot labels. Q is the identity basis.
Benchmark build_corrupted_benchmark(const Matrix& raw, const std::vector<int>& labels,
                                    Eigen::Index pca_dim, Eigen::Index noise_dims,
                                    double lambda_theta_max, double lambda_gamma_max,
                                    std::uint64_t seed);

// Directory layout: one .bin per matrix (two little-endian uint64 for the
// shape, then row-major doubles) plus manifest.json.
void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);
void save_datamodel(const std::string& dir, const DataModel& model,
                    const SpectralSpec& spec);
DataModel load_datamodel(const std::string& dir, SpectralSpec* spec_out = nullptr);

}  // namespace sslab::datamodel

#endif  // SSLAB_DATAMODEL_HPP
