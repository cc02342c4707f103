#include "sslab/oracle.hpp"

#include "sslab/solvers.hpp"
#include "sslab/spectral.hpp"

#include <limits>

namespace sslab::oracle {

namespace {

// (W S W^T)^{-1/2} W: keeps the row span, restores W S W^T = I.
Matrix retract(const Matrix& w, const Matrix& s) {
  const Matrix gram = w * s * w.transpose();
  return spectral::spd_inv_sqrt(0.5 * (gram + gram.transpose())) * w;
}

}  // namespace

Matrix oracle_joint_embedding(const augmentation::MomentPair& moments,
                              Eigen::Index k, const OracleOptions& opts) {
  const Eigen::Index d = moments.s.rows();
  if (k < 1 || k > d) throw RankOutOfRange("k=" + std::to_string(k));

  const Matrix& s = moments.s;
  const Matrix& g = moments.g;
  const double scale = std::max(g.norm() + s.norm(), 1e-300);

  Matrix best;
  double best_obj = -std::numeric_limits<double>::infinity();
  double best_grad_norm = std::numeric_limits<double>::infinity();

  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(r)));
    Matrix w = retract(rng.normal_matrix(k, d), s);
    double step = opts.step_size > 0.0 ? opts.step_size : 1.0 / (2.0 * scale);
    double obj = (w * g * w.transpose()).trace();
    double grad_norm = std::numeric_limits<double>::infinity();

    // Heavy-ball momentum: plain gradient steps converge at a rate limited
    // by the eigengap, which stalls the row space well above the target
    // accuracy on near-degenerate instances.
    Matrix vel = Matrix::Zero(k, d);
    double beta = 0.9;
    int accepts = 0;

    for (int it = 0; it < opts.max_iters; ++it) {
      // Ascent direction projected onto the tangent space of {W S W^T = I}.
      const Matrix wg = w * g;
      const Matrix grad = wg - (wg * w.transpose()) * (w * s);
      grad_norm = grad.norm();
      if (grad_norm < opts.tol * std::max(1.0, std::abs(obj))) break;

      vel = beta * vel + step * grad;
      const Matrix cand = retract(w + vel, s);
      const double cand_obj = (cand * g * cand.transpose()).trace();
      if (cand_obj >= obj - 1e-15 * std::max(1.0, std::abs(obj))) {
        w = cand;
        obj = cand_obj;
        step *= 1.02;
        if (++accepts % 50 == 0) beta = 1.0 - 0.7 * (1.0 - beta);
        beta = std::min(beta, 0.999);
      } else {
        vel.setZero();
        beta = 0.9;
        accepts = 0;
        step *= 0.5;
        if (step < 1e-18 / scale) break;
      }
    }
    if (obj > best_obj) {
      best_obj = obj;
      best = w;
      best_grad_norm = grad_norm;
    }
  }
  if (!(best_grad_norm < 1e-4 * std::max(1.0, std::abs(best_obj))))
    throw NonConvergence("joint-embedding oracle: final gradient norm " +
                         std::to_string(best_grad_norm));
  return best;
}

std::pair<Matrix, Matrix> oracle_reconstruction(const Matrix& x, const Matrix& sigma,
                                                Eigen::Index k,
                                                const OracleOptions& opts) {
  const Eigen::Index d = x.cols();
  if (k < 1 || k > d) throw RankOutOfRange("k=" + std::to_string(k));
  const double n = static_cast<double>(x.rows());
  const Matrix cov = (x.transpose() * x) / n;
  const Matrix reg = cov + sigma;

  Matrix best_e, best_d;
  double best_obj = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(mix_seed(opts.seed, 0x7200 + static_cast<std::uint64_t>(r)));
    Matrix enc = rng.normal_matrix(k, d);
    Matrix dec = Matrix::Zero(d, k);
    double prev = std::numeric_limits<double>::infinity();
    Matrix prev_basis;
    bool ok = false;

    for (int it = 0; it < opts.max_iters; ++it) {
      // Exact minimization over the decoder, then over the encoder.
      const Matrix gram = enc * reg * enc.transpose();
      Eigen::LDLT<Matrix> ldlt_d(0.5 * (gram + gram.transpose()));
      if (ldlt_d.info() != Eigen::Success) break;
      dec = ldlt_d.solve(enc * cov).transpose();

      const Matrix dtd = dec.transpose() * dec;
      Eigen::LDLT<Matrix> ldlt_e(dtd);
      Eigen::LDLT<Matrix> ldlt_reg(reg);
      if (ldlt_e.info() != Eigen::Success || ldlt_reg.info() != Eigen::Success) break;
      enc = ldlt_e.solve(dec.transpose() * cov) ;
      enc = ldlt_reg.solve(enc.transpose()).transpose();

      // Objective stagnation alone can trigger while the row space is still
      // drifting (the objective is quadratic in the subspace error), so
      // require the encoder row space to have settled too.
      const double obj = solvers::reconstruction_objective(x, sigma, enc, dec);
      if (prev - obj < opts.tol * std::max(1.0, std::abs(obj)) && it > 2) {
        const Matrix basis = spectral::row_space_basis(enc);
        if (prev_basis.size() == basis.size() &&
            spectral::subspace_distance(prev_basis, basis) < 1e-11) {
          ok = true;
          break;
        }
        prev_basis = basis;
      }
      prev = obj;
    }
    const double obj = solvers::reconstruction_objective(x, sigma, enc, dec);
    if (obj < best_obj) {
      best_obj = obj;
      best_e = enc;
      best_d = dec;
      converged = ok;
    }
  }
  if (!converged)
    throw NonConvergence("reconstruction oracle did not converge");
  return {best_e, best_d};
}

Matrix oracle_supervised(const Matrix& x, const Matrix& y,
                         const augmentation::AugmentationModel& model,
                         const OracleOptions& opts) {
  model.validate();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index l = y.cols();
  const Matrix theta_sqrt = augmentation::psd_sqrt(model.theta);
  const Matrix gamma_sqrt = augmentation::psd_sqrt(model.gamma);

  const Matrix cov = (x.transpose() * x) / static_cast<double>(n);
  const Matrix sigma = augmentation::aug_covariance(model);
  const double step =
      opts.step_size > 0.0 ? opts.step_size : 1.0 / (2.0 * (cov.norm() + sigma.norm() + 1e-300));

  const int views_per_epoch = 8;
  Matrix v = Matrix::Zero(l, d);
  Matrix avg = Matrix::Zero(l, d);
  long avg_count = 0;
  Rng rng(mix_seed(opts.seed, 0x51));

  for (int epoch = 0; epoch < opts.max_iters; ++epoch) {
    Matrix grad = Matrix::Zero(l, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int a = 0; a < views_per_epoch; ++a) {
        const Vector z1 = rng.normal_vector(d);
        const Vector z2 = rng.normal_vector(d);
        const Vector t =
            x.row(i).transpose() + theta_sqrt * z1 + model.alpha * (gamma_sqrt * z2);
        grad.noalias() += (v * t - y.row(i).transpose()) * t.transpose();
      }
    }
    grad *= 2.0 / (static_cast<double>(n) * views_per_epoch);
    // Full step while burning in, then a small step with tail averaging so
    // the averaged iterate reaches the central-limit rate.
    const bool tail = epoch >= opts.max_iters / 2;
    v -= (tail ? 0.1 * step : step) * grad;
    if (!v.allFinite()) throw NonConvergence("supervised oracle diverged");
    if (tail) {
      avg += v;
      ++avg_count;
    }
  }
  return avg / static_cast<double>(avg_count);
}

double threshold_search(theory::Method method, const datamodel::SpectralSpec& spec,
                        double lo, double hi) {
  if (!(lo < hi)) throw SpecInvalid("threshold_search needs lo < hi");
  const bool at_lo = theory::consistency_predicate(method, spec, lo);
  const bool at_hi = theory::consistency_predicate(method, spec, hi);
  if (at_lo || !at_hi)
    throw NoBracket("predicate is " + std::string(at_lo ? "true" : "false") +
                    " at lo and " + std::string(at_hi ? "true" : "false") + " at hi");
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (theory::consistency_predicate(method, spec, mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sslab::oracle
