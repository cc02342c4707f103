// Iterative reference solvers. These consume only the training objectives
// (invariance trace, reconstruction error, augmented regression loss), never
// the closed-form factorizations they are used to validate.

#ifndef SSLAB_ORACLE_HPP
#define SSLAB_ORACLE_HPP

#include "sslab/augmentation.hpp"
#include "sslab/common.hpp"
#include "sslab/datamodel.hpp"
#include "sslab/theory.hpp"

#include <utility>

namespace sslab::oracle {

struct OracleOptions {
  int max_iters = 2000;
  double step_size = 0.0;  // 0 selects 1 / (2 * largest relevant eigenvalue)
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int restarts = 3;
};

// Projected gradient ascent on tr(W G W^T) with the feasibility retraction
// W <- (W S W^T)^{-1/2} W. Returns the best W over `restarts` runs.
Matrix oracle_joint_embedding(const augmentation::MomentPair& moments,
                              Eigen::Index k, const OracleOptions& opts = {});

// Exact alternating minimization over encoder and decoder of the expanded
// reconstruction objective; monotone descending.
std::pair<Matrix, Matrix> oracle_reconstruction(const Matrix& x, const Matrix& sigma,
                                                Eigen::Index k,
                                                const OracleOptions& opts = {});

// Full-batch gradient descent on the Monte-Carlo augmented loss with views
// resampled each epoch and tail-averaged iterates.
Matrix oracle_supervised(const Matrix& x, const Matrix& y,
                         const augmentation::AugmentationModel& model,
                         const OracleOptions& opts = {});

// Bisection to 1e-10 on the alpha transition of the consistency predicate.
double threshold_search(theory::Method method, const datamodel::SpectralSpec& spec,
                        double lo, double hi);

}  // namespace sslab::oracle

#endif  // SSLAB_ORACLE_HPP
