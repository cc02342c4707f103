#include "sslab/augmentation.hpp"

#include "sslab/spectral.hpp"

#include <vector>

namespace sslab::augmentation {

namespace {

void check_psd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) throw DimensionMismatch(std::string(name) + " not square");
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.transpose()).norm() > 1e-10 * scale)
    throw NonSymmetric(std::string(name) + " not symmetric");
  spectral::EigenPair ep = spectral::sym_eig(m);
  if (ep.values.size() && ep.values(ep.values.size() - 1) < -1e-10 * scale)
    throw SpecInvalid(std::string(name) + " has a negative eigenvalue");
}

}  // namespace

void AugmentationModel::validate() const {
  check_psd(theta, "theta");
  check_psd(gamma, "gamma");
  if (theta.rows() != gamma.rows())
    throw DimensionMismatch("theta/gamma dimension mismatch");
  if (!(alpha >= 0.0)) throw SpecInvalid("alpha must be >= 0");
}

Matrix psd_sqrt(const Matrix& m) {
  spectral::EigenPair ep = spectral::sym_eig(m);
  Vector s(ep.values.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s(i) = ep.values(i) > 0.0 ? std::sqrt(ep.values(i)) : 0.0;
  return ep.basis * s.asDiagonal() * ep.basis.transpose();
}

Matrix aug_covariance(const AugmentationModel& model) {
  model.validate();
  return model.theta + model.alpha * model.alpha * model.gamma;
}

Vector sample_view(const AugmentationModel& model, const Vector& x, Rng& rng) {
  model.validate();
  if (x.size() != model.dim()) throw DimensionMismatch("sample_view vector size");
  const Matrix theta_sqrt = psd_sqrt(model.theta);
  const Matrix gamma_sqrt = psd_sqrt(model.gamma);
  const Vector z1 = rng.normal_vector(x.size());
  const Vector z2 = rng.normal_vector(x.size());
  return x + theta_sqrt * z1 + model.alpha * (gamma_sqrt * z2);
}

MomentPair analytic_moments(const AugmentationModel& model, const Matrix& x) {
  model.validate();
  if (x.rows() < 1) throw EmptyData("analytic_moments needs n >= 1");
  if (x.cols() != model.dim()) throw DimensionMismatch("analytic_moments data dim");
  const double n = static_cast<double>(x.rows());
  MomentPair mp;
  mp.g = (x.transpose() * x) / n;
  mp.s = mp.g + aug_covariance(model);
  return mp;
}

MomentPair empirical_moments(const AugmentationModel& model, const Matrix& x,
                             int draws, std::uint64_t seed) {
  model.validate();
  if (x.rows() < 1) throw EmptyData("empirical_moments needs n >= 1");
  if (x.cols() != model.dim()) throw DimensionMismatch("empirical_moments data dim");
  if (draws < 2) throw SpecInvalid("empirical_moments requires draws >= 2");

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const int m = draws;
  const Matrix theta_sqrt = psd_sqrt(model.theta);
  const Matrix gamma_sqrt = psd_sqrt(model.gamma);

  // Batch-means accumulators for standard errors. Each batch holds its own
  // full (S, G) estimate over its share of the draws.
  const int batches = (m >= 4) ? std::min(8, m / 2) : 1;
  std::vector<Matrix> s_batch(static_cast<size_t>(batches), Matrix::Zero(d, d));
  std::vector<Matrix> g_batch(static_cast<size_t>(batches), Matrix::Zero(d, d));
  std::vector<long> batch_draws(static_cast<size_t>(batches), 0);

  Matrix s_acc = Matrix::Zero(d, d);
  Matrix g_acc = Matrix::Zero(d, d);

  std::vector<Vector> views(static_cast<size_t>(m), Vector(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint64_t sample_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    Matrix sum_outer = Matrix::Zero(d, d);
    Vector sum = Vector::Zero(d);
    for (int a = 0; a < m; ++a) {
      Rng rng(mix_seed(sample_seed, static_cast<std::uint64_t>(a)));
      const Vector z1 = rng.normal_vector(d);
      const Vector z2 = rng.normal_vector(d);
      views[static_cast<size_t>(a)] =
          x.row(i).transpose() + theta_sqrt * z1 + model.alpha * (gamma_sqrt * z2);
      const Vector& t = views[static_cast<size_t>(a)];
      sum_outer.noalias() += t * t.transpose();
      sum += t;
    }
    s_acc += sum_outer;
    // Cross-pair estimator: unbiased for E[tau] E[tau]^T.
    g_acc += (sum * sum.transpose() - sum_outer) / (static_cast<double>(m) * (m - 1));

    if (batches > 1) {
      for (int b = 0; b < batches; ++b) {
        const int lo = b * m / batches;
        const int hi = (b + 1) * m / batches;
        const int mb = hi - lo;
        Matrix so = Matrix::Zero(d, d);
        Vector su = Vector::Zero(d);
        for (int a = lo; a < hi; ++a) {
          const Vector& t = views[static_cast<size_t>(a)];
          so.noalias() += t * t.transpose();
          su += t;
        }
        s_batch[static_cast<size_t>(b)] += so / mb;
        g_batch[static_cast<size_t>(b)] +=
            (su * su.transpose() - so) / (static_cast<double>(mb) * (mb - 1));
        batch_draws[static_cast<size_t>(b)] = mb;
      }
    }
  }

  MomentPair mp;
  mp.s = s_acc / (static_cast<double>(n) * m);
  mp.g = g_acc / static_cast<double>(n);

  if (batches > 1) {
    Matrix s_mean = Matrix::Zero(d, d), g_mean = Matrix::Zero(d, d);
    for (int b = 0; b < batches; ++b) {
      s_batch[static_cast<size_t>(b)] /= static_cast<double>(n);
      g_batch[static_cast<size_t>(b)] /= static_cast<double>(n);
      s_mean += s_batch[static_cast<size_t>(b)];
      g_mean += g_batch[static_cast<size_t>(b)];
    }
    s_mean /= batches;
    g_mean /= batches;
    Matrix s_var = Matrix::Zero(d, d), g_var = Matrix::Zero(d, d);
    for (int b = 0; b < batches; ++b) {
      s_var += (s_batch[static_cast<size_t>(b)] - s_mean).cwiseAbs2();
      g_var += (g_batch[static_cast<size_t>(b)] - g_mean).cwiseAbs2();
    }
    mp.s_se = (s_var / (batches * (batches - 1.0))).cwiseSqrt();
    mp.g_se = (g_var / (batches * (batches - 1.0))).cwiseSqrt();
  }
  return mp;
}

}  // namespace sslab::augmentation
