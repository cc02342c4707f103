#include "sslab/spectral.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace sslab::spectral {

namespace {

double spectral_scale(const Matrix& m) {
  // Cheap upper bound on the spectral norm; guarded against zero matrices.
  const double s = m.cwiseAbs().rowwise().sum().maxCoeff();
  return std::max(s, 1e-300);
}

void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw NonFinite("matrix contains NaN/Inf");
}

// Flip the sign of a vector so that its largest-magnitude entry is positive;
// ties go to the lowest index.
void canonical_sign(Eigen::Ref<Vector> v, double* flip = nullptr) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  const double s = v(best) < 0.0 ? -1.0 : 1.0;
  v *= s;
  if (flip) *flip = s;
}

}  // namespace

EigenPair sym_eig(const Matrix& m) {
  check_finite(m);
  if (m.rows() != m.cols())
    throw DimensionMismatch("sym_eig requires a square matrix");
  const double scale = spectral_scale(m);
  const double asym = (m - m.transpose()).norm();
  if (asym > 1e-10 * scale)
    throw NonSymmetric("asymmetry " + std::to_string(asym));

  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw NonFinite("eigensolver failed");

  const Eigen::Index d = m.rows();
  // Solver returns ascending order; re-sort descending with a stable rule.
  std::vector<Eigen::Index> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });

  EigenPair out;
  out.values.resize(d);
  out.basis.resize(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    out.values(j) = es.eigenvalues()(idx[static_cast<size_t>(j)]);
    out.basis.col(j) = es.eigenvectors().col(idx[static_cast<size_t>(j)]);
    canonical_sign(out.basis.col(j));
  }
  return out;
}

Matrix spd_inv_sqrt(const Matrix& m, double eps, bool strict) {
  EigenPair ep = sym_eig(m);
  const double top = ep.values.size() ? ep.values(0) : 0.0;
  if (ep.values.size() && ep.values(ep.values.size() - 1) < -1e-10 * std::max(top, 1e-300))
    throw SingularMatrix("matrix has a significantly negative eigenvalue");
  if (eps < 0.0) eps = 1e-12 * std::max(top, 0.0);

  Vector inv(ep.values.size());
  for (Eigen::Index i = 0; i < ep.values.size(); ++i) {
    if (ep.values(i) > eps) {
      inv(i) = 1.0 / std::sqrt(ep.values(i));
    } else {
      if (strict)
        throw SingularMatrix("eigenvalue " + std::to_string(ep.values(i)) +
                             " below eps in strict mode");
      inv(i) = 0.0;
    }
  }
  return ep.basis * inv.asDiagonal() * ep.basis.transpose();
}

SvdTriple best_rank_k(const Matrix& a, Eigen::Index k) {
  check_finite(a);
  if (a.rows() != a.cols())
    throw DimensionMismatch("best_rank_k expects a square matrix");
  const Eigen::Index d = a.rows();
  if (k < 1 || k > d) throw RankOutOfRange("k=" + std::to_string(k));

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdTriple out;
  out.left.resize(d, k);
  out.right.resize(d, k);
  out.singulars = svd.singularValues().head(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.left.col(j) = svd.matrixU().col(j);
    out.right.col(j) = svd.matrixV().col(j);
    double flip = 1.0;
    canonical_sign(out.left.col(j), &flip);
    out.right.col(j) *= flip;
  }
  return out;
}

double subspace_distance(const Matrix& b1, const Matrix& b2) {
  if (b1.rows() != b2.rows() || b1.cols() != b2.cols())
    throw DimensionMismatch("subspace_distance basis shapes differ");
  auto check_orthonormal = [](const Matrix& b) {
    const Matrix g = b.transpose() * b;
    if ((g - Matrix::Identity(b.cols(), b.cols())).norm() > 1e-8)
      throw DimensionMismatch("basis columns are not orthonormal");
  };
  check_orthonormal(b1);
  check_orthonormal(b2);
  return (b1 * b1.transpose() - b2 * b2.transpose()).norm();
}

Matrix row_space_basis(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinV);
  const double tol = 1e-12 * std::max(svd.singularValues().maxCoeff(), 1e-300);
  Eigen::Index r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()(r) > tol) ++r;
  return svd.matrixV().leftCols(r);
}

}  // namespace sslab::spectral
