// Dense symmetric eigen / SVD primitives with deterministic ordering and
// sign conventions, plus the low-rank projection and subspace metric that
// the solvers build on.

#ifndef SSLAB_SPECTRAL_HPP
#define SSLAB_SPECTRAL_HPP

#include "sslab/common.hpp"

namespace sslab::spectral {

// Eigendecomposition of a symmetric matrix. Column i of `basis` pairs with
// values[i]; values sorted non-increasing, ties broken deterministically and
// each eigenvector's largest-magnitude entry made positive.
struct EigenPair {
  Vector values;
  Matrix basis;

  Matrix reconstruct() const {
    return basis * values.asDiagonal() * basis.transpose();
  }
};

// Full SVD A = left * diag(singulars) * right^T, possibly truncated.
struct SvdTriple {
  Matrix left;      // d x r
  Vector singulars; // r, non-negative, non-increasing
  Matrix right;     // d x r

  Matrix reconstruct() const {
    return left * singulars.asDiagonal() * right.transpose();
  }
};

EigenPair sym_eig(const Matrix& m);

// Symmetric pseudo-inverse square root: eigenvalues <= eps map to zero.
// In strict mode any eigenvalue <= eps raises SingularMatrix instead.
// eps < 0 selects the default 1e-12 * (largest eigenvalue).
Matrix spd_inv_sqrt(const Matrix& m, double eps = -1.0, bool strict = false);

// Frobenius-optimal rank-<=k approximant of a square matrix (truncated SVD).
SvdTriple best_rank_k(const Matrix& a, Eigen::Index k);

// || B1 B1^T - B2 B2^T ||_F for orthonormal-column bases; zero iff the
// column spans coincide.
double subspace_distance(const Matrix& b1, const Matrix& b2);

// Orthonormal basis of the row space of a (rows assumed full rank up to
// numerical tolerance); returned as columns.
Matrix row_space_basis(const Matrix& a);

}  // namespace sslab::spectral

#endif  // SSLAB_SPECTRAL_HPP
