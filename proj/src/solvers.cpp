#include "sslab/solvers.hpp"

#include "sslab/spectral.hpp"

#include <vector>

namespace sslab::solvers {

namespace {

Matrix apply_jitter(const Matrix& m, const SolveOptions& opts) {
  if (!opts.jitter) return m;
  const double eps = 1e-10 * m.trace() / static_cast<double>(m.rows());
  return m + eps * Matrix::Identity(m.rows(), m.cols());
}

void check_condition(const spectral::EigenPair& ep, const SolveOptions& opts,
                     const char* what) {
  const double top = ep.values(0);
  const double bottom = ep.values(ep.values.size() - 1);
  if (bottom <= 0.0 || (opts.strict && top / bottom > 1e12))
    throw SingularSystem(std::string(what) + " is singular or too ill-conditioned");
}

}  // namespace

SupervisedSolution solve_supervised(const Matrix& x, const Matrix& y,
                                    const Matrix& sigma, const SolveOptions& opts) {
  if (x.rows() != y.rows()) throw DimensionMismatch("X and Y sample counts differ");
  if (sigma.rows() != x.cols() || sigma.cols() != x.cols())
    throw DimensionMismatch("sigma must be d x d");
  const double n = static_cast<double>(x.rows());
  const Matrix a = apply_jitter((x.transpose() * x) / n + sigma, opts);
  Eigen::LDLT<Matrix> ldlt(0.5 * (a + a.transpose()));
  const Vector diag = ldlt.vectorD();
  const double dmax = diag.maxCoeff();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(dmax > 0.0) ||
      diag.minCoeff() <= 1e-14 * dmax)
    throw SingularSystem("(1/n) X^T X + sigma is not positive definite");
  SupervisedSolution sol;
  sol.v = ldlt.solve(x.transpose() * y / n).transpose();
  return sol;
}

double supervised_objective(const Matrix& x, const Matrix& y, const Matrix& v,
                            const Matrix& sigma) {
  const double n = static_cast<double>(x.rows());
  return (y - x * v.transpose()).squaredNorm() / n +
         (v * sigma * v.transpose()).trace();
}

RidgeCheck ridge_equivalence_check(const Matrix& x, const Matrix& y, const Matrix& v,
                                   const augmentation::AugmentationModel& model,
                                   int draws, std::uint64_t seed) {
  model.validate();
  if (draws < 100) throw SpecInvalid("ridge_equivalence_check requires draws >= 100");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Matrix theta_sqrt = augmentation::psd_sqrt(model.theta);
  const Matrix gamma_sqrt = augmentation::psd_sqrt(model.gamma);

  // Monte-Carlo estimate of the augmented loss with per-(sample, draw) RNG
  // streams; SE by batch means over the draw index.
  const int batches = std::min(10, draws / 10);
  std::vector<double> batch_sum(static_cast<size_t>(batches), 0.0);
  std::vector<long> batch_count(static_cast<size_t>(batches), 0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint64_t sample_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    for (int a = 0; a < draws; ++a) {
      Rng rng(mix_seed(sample_seed, static_cast<std::uint64_t>(a)));
      const Vector z1 = rng.normal_vector(d);
      const Vector z2 = rng.normal_vector(d);
      const Vector view =
          x.row(i).transpose() + theta_sqrt * z1 + model.alpha * (gamma_sqrt * z2);
      const double loss = (y.row(i).transpose() - v * view).squaredNorm();
      total += loss;
      const int b = a * batches / draws;
      batch_sum[static_cast<size_t>(b)] += loss;
      batch_count[static_cast<size_t>(b)] += 1;
    }
  }

  RidgeCheck out;
  out.mc_loss = total / (static_cast<double>(n) * draws);

  double mean = 0.0;
  for (int b = 0; b < batches; ++b)
    batch_sum[static_cast<size_t>(b)] /=
        static_cast<double>(batch_count[static_cast<size_t>(b)]);
  for (int b = 0; b < batches; ++b) mean += batch_sum[static_cast<size_t>(b)];
  mean /= batches;
  double var = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double dlt = batch_sum[static_cast<size_t>(b)] - mean;
    var += dlt * dlt;
  }
  out.se = batches > 1 ? std::sqrt(var / (batches * (batches - 1.0))) : 0.0;

  // Closed-form right-hand side: ||V||^2_Sigma + (1/n) sum ||y_i - V x_i||^2
  // (E[tau(x)] = x for this family).
  const Matrix sigma = augmentation::aug_covariance(model);
  out.ridge_loss = (v * sigma * v.transpose()).trace() +
                   (y - x * v.transpose()).squaredNorm() / static_cast<double>(n);
  return out;
}

RCSolution solve_reconstruction(const Matrix& x, const Matrix& sigma, Eigen::Index k,
                                const SolveOptions& opts) {
  const Eigen::Index d = x.cols();
  if (k < 1 || k > d) throw RankOutOfRange("k=" + std::to_string(k));
  const double n = static_cast<double>(x.rows());
  const Matrix cov = (x.transpose() * x) / n;
  const Matrix b = apply_jitter(cov + sigma, opts);

  spectral::EigenPair bp = spectral::sym_eig(b);
  check_condition(bp, opts, "(1/n) X^T X + sigma");
  Vector inv_sqrt = bp.values.cwiseSqrt().cwiseInverse();
  const Matrix b_inv_sqrt = bp.basis * inv_sqrt.asDiagonal() * bp.basis.transpose();

  const Matrix a = cov * b_inv_sqrt;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);

  RCSolution sol;
  sol.singulars = svd.singularValues().head(k);
  sol.left_basis = svd.matrixU().leftCols(k);
  sol.right_basis = svd.matrixV().leftCols(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    // Canonical sign: largest-magnitude entry of the left vector positive.
    Eigen::Index best = 0;
    sol.left_basis.col(j).cwiseAbs().maxCoeff(&best);
    if (sol.left_basis(best, j) < 0.0) {
      sol.left_basis.col(j) *= -1.0;
      sol.right_basis.col(j) *= -1.0;
    }
  }
  if (k < d) {
    const double phi1 = svd.singularValues()(0);
    if (svd.singularValues()(k - 1) - svd.singularValues()(k) <
        1e-10 * std::max(phi1, 1e-300))
      sol.degenerate_gap = true;
  }
  sol.encoder = sol.right_basis.transpose() * b_inv_sqrt;
  sol.decoder = sol.left_basis * sol.singulars.asDiagonal();
  return sol;
}

double reconstruction_objective(const Matrix& x, const Matrix& sigma,
                                const Matrix& encoder, const Matrix& decoder) {
  const double n = static_cast<double>(x.rows());
  const Matrix m = decoder * encoder;
  return (x - x * m.transpose()).squaredNorm() / n +
         (m * sigma * m.transpose()).trace();
}

JESolution solve_joint_embedding(const augmentation::MomentPair& moments,
                                 Eigen::Index k, const SolveOptions& opts) {
  const Eigen::Index d = moments.s.rows();
  if (k < 1 || k > d) throw RankOutOfRange("k=" + std::to_string(k));
  if (moments.g.rows() != d || moments.g.cols() != d)
    throw DimensionMismatch("moment matrices must share shape");

  const Matrix s = apply_jitter(moments.s, opts);
  spectral::EigenPair sp = spectral::sym_eig(s);
  check_condition(sp, opts, "S");
  Vector inv_sqrt = sp.values.cwiseSqrt().cwiseInverse();
  const Matrix s_inv_sqrt = sp.basis * inv_sqrt.asDiagonal() * sp.basis.transpose();

  const Matrix m = s_inv_sqrt * moments.g * s_inv_sqrt;
  spectral::EigenPair mp = spectral::sym_eig(0.5 * (m + m.transpose()));

  JESolution sol;
  sol.eigvals = mp.values.head(k);
  sol.basis = mp.basis.leftCols(k);
  if (k < d) {
    const double scale = std::max(mp.values(0), 1.0);
    if (mp.values(k - 1) - mp.values(k) < 1e-10 * scale) sol.degenerate_gap = true;
  }
  sol.w = sol.basis.transpose() * s_inv_sqrt;
  return sol;
}

double joint_embedding_objective(const augmentation::MomentPair& moments,
                                 const Matrix& w) {
  return static_cast<double>(w.rows()) - (w * moments.g * w.transpose()).trace();
}

}  // namespace sslab::solvers
