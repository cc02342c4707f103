#include "sslab/theory.hpp"

#include "sslab/spectral.hpp"

#include <limits>

namespace sslab::theory {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::ReconstructionPreferable: return "ReconstructionPreferable";
    case Regime::JointEmbeddingPreferable: return "JointEmbeddingPreferable";
    case Regime::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Supervised: return "supervised";
    case Method::JointEmbedding: return "je";
    case Method::Reconstruction: return "rc";
  }
  return "?";
}

namespace {

double compute_delta(const datamodel::SpectralSpec& spec) {
  double delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spec.k; ++i) {
    const double c = spec.c[static_cast<size_t>(i)];
    const double lt = spec.lambda_theta[static_cast<size_t>(i)];
    delta = std::min(delta, c / (c + lt));
  }
  return delta;
}

double compute_eta(const datamodel::SpectralSpec& spec) {
  double eta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < spec.k; ++i) {
    const double c = spec.c[static_cast<size_t>(i)];
    const double lt = spec.lambda_theta[static_cast<size_t>(i)];
    eta = std::min(eta, c / std::sqrt(c + lt));
  }
  return eta;
}

}  // namespace

ThresholdPair threshold_je(const datamodel::SpectralSpec& spec) {
  spec.validate();
  const double delta = compute_delta(spec);
  double raw = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = spec.k; i < spec.d; ++i) {
    const double lt = spec.lambda_theta[static_cast<size_t>(i)];
    const double lg = spec.lambda_gamma[static_cast<size_t>(i)];
    raw = std::max(raw, (1.0 - delta) / delta - lt / lg);
  }
  return {raw, std::sqrt(std::max(raw, 0.0))};
}

ThresholdPair threshold_rc(const datamodel::SpectralSpec& spec) {
  spec.validate();
  const double eta = compute_eta(spec);
  double raw = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = spec.k; i < spec.d; ++i) {
    const double lt = spec.lambda_theta[static_cast<size_t>(i)];
    const double lg = spec.lambda_gamma[static_cast<size_t>(i)];
    raw = std::max(raw, lg / (eta * eta) - lt / lg - 1.0);
  }
  return {raw, std::sqrt(std::max(raw, 0.0))};
}

Regime classify_regime(const datamodel::SpectralSpec& spec) {
  spec.validate();
  const double bound = compute_eta(spec) * compute_eta(spec) / compute_delta(spec);
  double lg_min = std::numeric_limits<double>::infinity();
  double lg_max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = spec.k; i < spec.d; ++i) {
    const double lg = spec.lambda_gamma[static_cast<size_t>(i)];
    lg_min = std::min(lg_min, lg);
    lg_max = std::max(lg_max, lg);
  }
  if (lg_max < bound) return Regime::ReconstructionPreferable;
  if (lg_min > bound) return Regime::JointEmbeddingPreferable;
  return Regime::Indeterminate;
}

ThresholdReport threshold_report(const datamodel::SpectralSpec& spec) {
  ThresholdReport rep;
  rep.delta = compute_delta(spec);
  rep.eta = compute_eta(spec);
  const ThresholdPair je = threshold_je(spec);
  const ThresholdPair rc = threshold_rc(spec);
  rep.alpha_je_sq_raw = je.raw_sq;
  rep.alpha_rc_sq_raw = rc.raw_sq;
  rep.alpha_je = je.clamped;
  rep.alpha_rc = rc.clamped;
  rep.regime = classify_regime(spec);
  return rep;
}

augmentation::MomentPair limit_moments(const datamodel::SpectralSpec& spec,
                                       double alpha, bool corrupted) {
  spec.validate();
  if (!(alpha >= 0.0)) throw SpecInvalid("alpha must be >= 0");
  Vector s_diag(spec.d), g_diag(spec.d);
  for (Eigen::Index i = 0; i < spec.d; ++i) {
    const double lt = spec.lambda_theta[static_cast<size_t>(i)];
    const double lg = spec.lambda_gamma[static_cast<size_t>(i)];
    if (i < spec.k) {
      const double c = spec.c[static_cast<size_t>(i)];
      s_diag(i) = c + lt;  // lambda_gamma is zero here
      g_diag(i) = c;
    } else if (corrupted) {
      s_diag(i) = lt + (1.0 + alpha * alpha) * lg;
      g_diag(i) = lg;
    } else {
      s_diag(i) = lt + alpha * alpha * lg;
      g_diag(i) = 0.0;
    }
  }
  augmentation::MomentPair mp;
  mp.s = s_diag.asDiagonal();
  mp.g = g_diag.asDiagonal();
  return mp;
}

bool consistency_predicate(Method method, const datamodel::SpectralSpec& spec,
                           double alpha) {
  spec.validate();
  if (method == Method::Supervised) return true;

  const augmentation::MomentPair mp = limit_moments(spec, alpha, /*corrupted=*/true);
  const Matrix s_inv_sqrt = spectral::spd_inv_sqrt(mp.s, -1.0, /*strict=*/true);

  // Each eigen/singular direction is attributed to the important or noise
  // block by where its vector mass lies; the method is consistent when every
  // important-block value strictly dominates every noise-block value.
  double min_important = std::numeric_limits<double>::infinity();
  double max_noise = -std::numeric_limits<double>::infinity();

  auto classify = [&](const Matrix& vectors, const Vector& values) {
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      Eigen::Index arg = 0;
      vectors.col(j).cwiseAbs().maxCoeff(&arg);
      if (arg < spec.k)
        min_important = std::min(min_important, values(j));
      else
        max_noise = std::max(max_noise, values(j));
    }
  };

  if (method == Method::JointEmbedding) {
    const Matrix m = s_inv_sqrt * mp.g * s_inv_sqrt;
    const spectral::EigenPair ep = spectral::sym_eig(0.5 * (m + m.transpose()));
    classify(ep.basis, ep.values);
  } else {
    const Matrix a = mp.g * s_inv_sqrt;
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    classify(svd.matrixU(), svd.singularValues());
  }
  return min_important > max_noise;
}

}  // namespace sslab::theory
