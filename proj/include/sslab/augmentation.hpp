// The Gaussian augmentation family tau(x) = x + theta + alpha*gamma and the
// exact / Monte-Carlo second-moment algebra of the augmented samples.

#ifndef SSLAB_AUGMENTATION_HPP
#define SSLAB_AUGMENTATION_HPP

#include "sslab/common.hpp"

namespace sslab::augmentation {

struct AugmentationModel {
  Matrix theta;  // PSD d x d
  Matrix gamma;  // PSD d x d
  double alpha = 0.0;

  Eigen::Index dim() const { return theta.rows(); }
  void validate() const;
};

// S: second moment of augmented samples, G: mean outer products.
// S - G equals the augmentation covariance.
struct MomentPair {
  Matrix s;
  Matrix g;
  // Entry-wise standard errors when Monte-Carlo estimated; empty otherwise.
  Matrix s_se;
  Matrix g_se;
};

// Sigma = Theta + alpha^2 * Gamma.
Matrix aug_covariance(const AugmentationModel& model);

// One draw of tau(x). Square roots are eigendecomposition based since Gamma
// is rank-deficient by construction.
Vector sample_view(const AugmentationModel& model, const Vector& x, Rng& rng);

// Exact moments for this family: G = (1/n) X^T X, S = G + Sigma.
MomentPair analytic_moments(const AugmentationModel& model, const Matrix& x);

// Plug-in Monte-Carlo estimates from `draws` independent views per sample.
// G uses the cross-pair estimator so it is unbiased (draws >= 2). RNG streams
// are derived per (sample, draw) from `seed`, so results are independent of
// evaluation order.
MomentPair empirical_moments(const AugmentationModel& model, const Matrix& x,
                             int draws, std::uint64_t seed);

// Symmetric PSD square root used by the sampler; exposed for reuse.
Matrix psd_sqrt(const Matrix& m);

}  // namespace sslab::augmentation

#endif  // SSLAB_AUGMENTATION_HPP
