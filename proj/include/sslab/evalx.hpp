// Linear probing of frozen representations and the clean-vs-corrupted
// probe-gap metric.

#ifndef SSLAB_EVALX_HPP
#define SSLAB_EVALX_HPP

#include "sslab/common.hpp"

namespace sslab::evalx {

struct ProbeResult {
  Matrix weights;  // l x k
  double loss = 0.0;
  bool used_pseudo_inverse = false;
};

// Z = X * W^T for an encoder with rows as output features.
Matrix represent(const Matrix& encoder, const Matrix& x);

// Unregularized least squares with no intercept; silent pseudo-inverse
// fallback (flagged) when Z^T Z is singular. Optional ridge for
// ill-conditioned representations, off by default.
ProbeResult fit_probe(const Matrix& z, const Matrix& y, double ridge = 0.0);

// Mean squared loss of an already-fitted probe on a (possibly held-out)
// set. The default metric is in-sample; this supports the sanity-check
// split.
double probe_loss(const ProbeResult& probe, const Matrix& z, const Matrix& y);

// | probe loss on clean representations - probe loss on corrupted ones |.
double probe_gap(const Matrix& clean_repr, const Matrix& corrupt_repr, const Matrix& y);

}  // namespace sslab::evalx

#endif  // SSLAB_EVALX_HPP
