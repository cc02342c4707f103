// Closed-form solutions of the three linear training problems: supervised
// regression with augmentation, reconstruction (encoder/decoder), and
// joint-embedding under the orthonormal-representation constraint; plus the
// Monte-Carlo check of the augmented-loss / ridge identity.

#ifndef SSLAB_SOLVERS_HPP
#define SSLAB_SOLVERS_HPP

#include "sslab/augmentation.hpp"
#include "sslab/common.hpp"

namespace sslab::solvers {

struct SupervisedSolution {
  Matrix v;  // l x d
};

struct RCSolution {
  Matrix encoder;      // k x d
  Matrix decoder;      // d x k
  Vector singulars;    // length k
  Matrix left_basis;   // d x k (R_k)
  Matrix right_basis;  // d x k (P_k)
  bool degenerate_gap = false;  // truncation boundary was numerically tied

  Matrix product() const { return decoder * encoder; }
};

struct JESolution {
  Matrix w;       // k x d
  Matrix basis;   // d x k (top eigenvectors Q_k)
  Vector eigvals; // length k
  bool degenerate_gap = false;
};

struct SolveOptions {
  bool strict = true;    // reject near-singular systems
  bool jitter = false;   // add eps*I with eps = 1e-10 * trace/d before solving
};

// V = (1/n) Y^T X ((1/n) X^T X + sigma)^{-1}.
SupervisedSolution solve_supervised(const Matrix& x, const Matrix& y,
                                    const Matrix& sigma,
                                    const SolveOptions& opts = {});

// Monte-Carlo augmented empirical risk of V versus its closed-form ridge
// expansion; returns (mc_loss, ridge_loss, standard error of mc_loss).
struct RidgeCheck {
  double mc_loss = 0.0;
  double ridge_loss = 0.0;
  double se = 0.0;
};
RidgeCheck ridge_equivalence_check(const Matrix& x, const Matrix& y, const Matrix& v,
                                   const augmentation::AugmentationModel& model,
                                   int draws, std::uint64_t seed);

// Rank-k truncated SVD of (1/n) X^T X ((1/n) X^T X + sigma)^{-1/2}; the
// mixing factor T is fixed to the identity.
RCSolution solve_reconstruction(const Matrix& x, const Matrix& sigma, Eigen::Index k,
                                const SolveOptions& opts = {});

// Top-k eigenspace of S^{-1/2} G S^{-1/2}; the rotation factor U is fixed to
// the identity. Consumes moments so analytic and empirical inputs share the
// same path.
JESolution solve_joint_embedding(const augmentation::MomentPair& moments,
                                 Eigen::Index k, const SolveOptions& opts = {});

// Objective values, shared with the oracles and tests.
double supervised_objective(const Matrix& x, const Matrix& y, const Matrix& v,
                            const Matrix& sigma);
double reconstruction_objective(const Matrix& x, const Matrix& sigma,
                                const Matrix& encoder, const Matrix& decoder);
// Invariance objective k - tr(W G W^T) for a feasible W.
double joint_embedding_objective(const augmentation::MomentPair& moments,
                                 const Matrix& w);

}  // namespace sslab::solvers

#endif  // SSLAB_SOLVERS_HPP
