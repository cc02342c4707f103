// Alignment thresholds, the regime comparator, exact large-n limit moments,
// and the consistency predicates evaluated on those limits.

#ifndef SSLAB_THEORY_HPP
#define SSLAB_THEORY_HPP

#include "sslab/augmentation.hpp"
#include "sslab/datamodel.hpp"

namespace sslab::theory {

enum class Regime { ReconstructionPreferable, JointEmbeddingPreferable, Indeterminate };
enum class Method { Supervised, JointEmbedding, Reconstruction };

const char* regime_name(Regime r);
const char* method_name(Method m);

struct ThresholdReport {
  double delta = 0.0;            // min_i c_i / (c_i + lambda_theta_i), important i
  double eta = 0.0;              // min_i c_i / sqrt(c_i + lambda_theta_i)
  double alpha_je_sq_raw = 0.0;  // may be negative
  double alpha_rc_sq_raw = 0.0;
  double alpha_je = 0.0;         // sqrt(max(raw, 0))
  double alpha_rc = 0.0;
  Regime regime = Regime::Indeterminate;
};

struct ThresholdPair {
  double raw_sq = 0.0;
  double clamped = 0.0;
};

ThresholdPair threshold_je(const datamodel::SpectralSpec& spec);
ThresholdPair threshold_rc(const datamodel::SpectralSpec& spec);
Regime classify_regime(const datamodel::SpectralSpec& spec);
ThresholdReport threshold_report(const datamodel::SpectralSpec& spec);

// Exact n -> infinity moment matrices in the Q basis (diagonal). The clean
// case drops the data-noise term and zeroes G on the noise coordinates.
augmentation::MomentPair limit_moments(const datamodel::SpectralSpec& spec,
                                       double alpha, bool corrupted);

// Whether the method's selected k-dimensional structure equals the important
// subspace at the exact limit. Supervised is always consistent.
bool consistency_predicate(Method method, const datamodel::SpectralSpec& spec,
                           double alpha);

}  // namespace sslab::theory

#endif  // SSLAB_THEORY_HPP
