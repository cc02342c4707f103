#include "sslab/verify.hpp"

#include "sslab/augmentation.hpp"
#include "sslab/evalx.hpp"
#include "sslab/oracle.hpp"
#include "sslab/solvers.hpp"
#include "sslab/spectral.hpp"
#include "sslab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sslab::verify {

namespace {

Matrix random_psd(Eigen::Index d, Rng& rng, double scale = 1.0) {
  const Matrix a = rng.normal_matrix(d, d);
  return scale * (a * a.transpose()) / static_cast<double>(d);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

RandomInstance make_random_instance(std::uint64_t seed, Eigen::Index d_max) {
  // Resample until the truncation gaps of both factorizations are clearly
  // non-degenerate; near-ties make the optimal subspace ill-posed and the
  // closed-form/oracle comparison meaningless.
  for (int attempt = 0;; ++attempt) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    RandomInstance inst;
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(d_max - 2));
    const Eigen::Index n = 2 * d + static_cast<Eigen::Index>(rng.next_u64() % 20);
    const Eigen::Index l = 1 + static_cast<Eigen::Index>(rng.next_u64() % 3);
    inst.k = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(std::max<Eigen::Index>(d / 2, 1)));
    inst.x = rng.normal_matrix(n, d);
    inst.y = rng.normal_matrix(n, l);
    inst.sigma = random_psd(d, rng, 0.5 + rng.uniform());
    if (attempt >= 50) return inst;

    augmentation::MomentPair mp;
    mp.g = (inst.x.transpose() * inst.x) / static_cast<double>(inst.x.rows());
    mp.s = mp.g + inst.sigma;
    const Matrix s_inv_sqrt = spectral::spd_inv_sqrt(mp.s);
    const Matrix m = s_inv_sqrt * mp.g * s_inv_sqrt;
    const spectral::EigenPair je = spectral::sym_eig(0.5 * (m + m.transpose()));
    const Eigen::JacobiSVD<Matrix> rc(mp.g * s_inv_sqrt);
    const Vector& phi = rc.singularValues();
    const double je_gap =
        (je.values(inst.k - 1) - je.values(inst.k)) / std::max(je.values(0), 1e-300);
    const double rc_gap =
        (phi(inst.k - 1) - phi(inst.k)) / std::max(phi(0), 1e-300);
    if (je_gap > 1e-2 && rc_gap > 1e-2) return inst;
  }
}

datamodel::SpectralSpec make_random_spec(std::uint64_t seed, Eigen::Index d_max) {
  Rng rng(seed);
  datamodel::SpectralSpec spec;
  spec.d = 3 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(d_max - 2));
  spec.k = 1 + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(spec.d - 1));
  spec.n = 4 * spec.d;
  spec.seed = mix_seed(seed, 0xabc);
  spec.c.resize(static_cast<size_t>(spec.k));
  double prev = 1.0 + 9.0 * rng.uniform();
  for (Eigen::Index i = 0; i < spec.k; ++i) {
    spec.c[static_cast<size_t>(i)] = prev;
    prev *= 0.3 + 0.65 * rng.uniform();
  }
  spec.lambda_theta.resize(static_cast<size_t>(spec.d));
  spec.lambda_gamma.assign(static_cast<size_t>(spec.d), 0.0);
  for (Eigen::Index i = 0; i < spec.d; ++i)
    spec.lambda_theta[static_cast<size_t>(i)] = 2.0 * rng.uniform();
  for (Eigen::Index i = spec.k; i < spec.d; ++i)
    spec.lambda_gamma[static_cast<size_t>(i)] = 0.05 + 5.0 * rng.uniform();
  return spec;
}

std::vector<Check> suite_oracles(int instances, std::uint64_t seed) {
  std::vector<Check> checks;
  double worst_je_obj = 0.0, worst_je_sub = 0.0;
  double worst_rc_obj = 0.0, worst_rc_sub = 0.0;
  double worst_sup = 0.0;

  oracle::OracleOptions opts;
  opts.max_iters = 20000;
  opts.tol = 1e-13;

  for (int i = 0; i < instances; ++i) {
    const RandomInstance inst = make_random_instance(mix_seed(seed, static_cast<std::uint64_t>(i)));
    opts.seed = mix_seed(seed, 1000 + static_cast<std::uint64_t>(i));

    augmentation::MomentPair mp;
    mp.g = (inst.x.transpose() * inst.x) / static_cast<double>(inst.x.rows());
    mp.s = mp.g + inst.sigma;

    const solvers::JESolution je = solvers::solve_joint_embedding(mp, inst.k);
    const Matrix w_oracle = oracle_joint_embedding(mp, inst.k, opts);
    worst_je_obj = std::max(worst_je_obj,
                            std::abs(solvers::joint_embedding_objective(mp, je.w) -
                                     solvers::joint_embedding_objective(mp, w_oracle)));
    worst_je_sub = std::max(
        worst_je_sub, spectral::subspace_distance(spectral::row_space_basis(je.w),
                                                  spectral::row_space_basis(w_oracle)));

    const solvers::RCSolution rc = solvers::solve_reconstruction(inst.x, inst.sigma, inst.k);
    const auto [e_oracle, d_oracle] = oracle_reconstruction(inst.x, inst.sigma, inst.k, opts);
    worst_rc_obj = std::max(
        worst_rc_obj,
        std::abs(solvers::reconstruction_objective(inst.x, inst.sigma, rc.encoder, rc.decoder) -
                 solvers::reconstruction_objective(inst.x, inst.sigma, e_oracle, d_oracle)));
    worst_rc_sub = std::max(
        worst_rc_sub, spectral::subspace_distance(spectral::row_space_basis(rc.encoder),
                                                  spectral::row_space_basis(e_oracle)));
  }
  checks.push_back({"je_objective_gap", worst_je_obj < 1e-6, fmt(worst_je_obj)});
  checks.push_back({"je_subspace_distance", worst_je_sub < 1e-6, fmt(worst_je_sub)});
  checks.push_back({"rc_objective_gap", worst_rc_obj < 1e-6, fmt(worst_rc_obj)});
  checks.push_back({"rc_subspace_distance", worst_rc_sub < 1e-6, fmt(worst_rc_sub)});

  // Supervised oracle: fewer, slower instances with a stochastic tolerance.
  oracle::OracleOptions sup_opts;
  sup_opts.max_iters = 3000;
  for (int i = 0; i < std::min(instances, 3); ++i) {
    Rng rng(mix_seed(seed, 500 + static_cast<std::uint64_t>(i)));
    const Eigen::Index d = 4, n = 60, l = 2;
    const Matrix x = rng.normal_matrix(n, d);
    const Matrix y = rng.normal_matrix(n, l);
    augmentation::AugmentationModel model;
    model.theta = random_psd(d, rng, 0.3);
    model.gamma = random_psd(d, rng, 0.3);
    model.alpha = rng.uniform();
    sup_opts.seed = mix_seed(seed, 700 + static_cast<std::uint64_t>(i));
    const Matrix v_closed =
        solvers::solve_supervised(x, y, augmentation::aug_covariance(model)).v;
    const Matrix v_oracle = oracle_supervised(x, y, model, sup_opts);
    worst_sup =
        std::max(worst_sup, (v_closed - v_oracle).norm() / std::max(v_closed.norm(), 1e-300));
  }
  // SGD with resampled views is stochastic; the tolerance reflects the
  // central-limit error at these epoch counts, not solver accuracy.
  checks.push_back({"supervised_oracle_gap", worst_sup < 2e-2, fmt(worst_sup)});
  return checks;
}

std::vector<Check> suite_invariants(std::uint64_t seed) {
  std::vector<Check> checks;
  Rng rng(seed);

  // S - G identity, analytic.
  double worst_identity = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.next_u64() % 8);
    augmentation::AugmentationModel model;
    model.theta = random_psd(d, rng);
    model.gamma = random_psd(d, rng);
    model.alpha = 2.0 * rng.uniform();
    const Matrix x = rng.normal_matrix(2 * d, d);
    const augmentation::MomentPair mp = augmentation::analytic_moments(model, x);
    worst_identity = std::max(
        worst_identity, (mp.s - mp.g - augmentation::aug_covariance(model)).norm());
  }
  checks.push_back({"moment_identity", worst_identity < 1e-12, fmt(worst_identity)});

  // JE primal feasibility and probe invariance.
  double worst_feas = 0.0, worst_probe = 0.0, worst_class = 0.0;
  for (int i = 0; i < 20; ++i) {
    const RandomInstance inst = make_random_instance(mix_seed(seed, 40 + static_cast<std::uint64_t>(i)));
    augmentation::MomentPair mp;
    mp.g = (inst.x.transpose() * inst.x) / static_cast<double>(inst.x.rows());
    mp.s = mp.g + inst.sigma;
    const solvers::JESolution je = solvers::solve_joint_embedding(mp, inst.k);
    worst_feas = std::max(
        worst_feas,
        (je.w * mp.s * je.w.transpose() - Matrix::Identity(inst.k, inst.k)).norm());

    const Matrix z = evalx::represent(je.w, inst.x);
    Matrix b = rng.normal_matrix(inst.k, inst.k);
    b += 3.0 * Matrix::Identity(inst.k, inst.k);  // keep it invertible
    const double l0 = evalx::fit_probe(z, inst.y).loss;
    const double l1 = evalx::fit_probe(z * b.transpose(), inst.y).loss;
    worst_probe = std::max(worst_probe, std::abs(l0 - l1));

    // Solution-class invariance: (T E, D T^{-1}) and U W preserve objectives.
    const solvers::RCSolution rc = solvers::solve_reconstruction(inst.x, inst.sigma, inst.k);
    const Matrix t = b;
    const double rc0 =
        solvers::reconstruction_objective(inst.x, inst.sigma, rc.encoder, rc.decoder);
    const double rc1 = solvers::reconstruction_objective(
        inst.x, inst.sigma, t * rc.encoder, rc.decoder * t.inverse());
    worst_class = std::max(worst_class, std::abs(rc0 - rc1));

    const Matrix u = spectral::sym_eig(0.5 * (b + b.transpose())).basis;
    const double je0 = solvers::joint_embedding_objective(mp, je.w);
    const double je1 = solvers::joint_embedding_objective(mp, u * je.w);
    worst_class = std::max(worst_class, std::abs(je0 - je1));
  }
  checks.push_back({"je_primal_feasibility", worst_feas < 1e-8, fmt(worst_feas)});
  checks.push_back({"probe_invariance", worst_probe < 1e-8, fmt(worst_probe)});
  checks.push_back({"solution_class_invariance", worst_class < 1e-9, fmt(worst_class)});
  return checks;
}

std::vector<Check> suite_thresholds(int specs, std::uint64_t seed) {
  std::vector<Check> checks;
  double worst_bisect = 0.0;
  int iff_mismatches = 0;
  int ordering_violations = 0, ordered_cases = 0;

  for (int i = 0; i < specs; ++i) {
    const datamodel::SpectralSpec spec = make_random_spec(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const theory::ThresholdPair je = theory::threshold_je(spec);
    const theory::ThresholdPair rc = theory::threshold_rc(spec);

    for (auto [method, pair] :
         {std::pair{theory::Method::JointEmbedding, je},
          std::pair{theory::Method::Reconstruction, rc}}) {
      // Bisection recovers the closed-form transition when a bracket exists.
      if (pair.raw_sq > 1e-6) {
        const double hi = pair.clamped * 2.0 + 1.0;
        const double found = oracle::threshold_search(method, spec, 0.0, hi);
        worst_bisect = std::max(
            worst_bisect, std::abs(found - pair.clamped) / std::max(pair.clamped, 1.0));
      }
      // Iff agreement on an alpha grid off the boundary band.
      for (double frac : {0.0, 0.5, 0.9, 1.1, 2.0, 10.0}) {
        const double alpha_sq = std::max(pair.raw_sq, 0.1) * frac;
        if (std::abs(alpha_sq - pair.raw_sq) < 1e-9) continue;
        const double alpha = std::sqrt(std::max(alpha_sq, 0.0));
        const bool predicted = alpha_sq > pair.raw_sq;
        if (theory::consistency_predicate(method, spec, alpha) != predicted)
          ++iff_mismatches;
      }
    }

    const theory::Regime regime = theory::classify_regime(spec);
    if (regime == theory::Regime::ReconstructionPreferable) {
      ++ordered_cases;
      if (!(je.raw_sq > rc.raw_sq)) ++ordering_violations;
    } else if (regime == theory::Regime::JointEmbeddingPreferable) {
      ++ordered_cases;
      if (!(je.raw_sq < rc.raw_sq)) ++ordering_violations;
    }
  }
  checks.push_back({"bisection_agreement", worst_bisect < 1e-7, fmt(worst_bisect)});
  checks.push_back({"iff_agreement", iff_mismatches == 0,
                    std::to_string(iff_mismatches) + " mismatches"});
  checks.push_back({"regime_threshold_ordering", ordering_violations == 0,
                    std::to_string(ordering_violations) + " violations in " +
                        std::to_string(ordered_cases) + " ordered cases"});
  return checks;
}

std::vector<Check> suite_lemma(int instances, int draws, std::uint64_t seed) {
  std::vector<Check> checks;
  int failures = 0;
  double worst_sigmas = 0.0;
  for (int i = 0; i < instances; ++i) {
    Rng rng(mix_seed(seed, 9000 + static_cast<std::uint64_t>(i)));
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.next_u64() % 5);
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(rng.next_u64() % 30);
    const Eigen::Index l = 1 + static_cast<Eigen::Index>(rng.next_u64() % 2);
    const Matrix x = rng.normal_matrix(n, d);
    const Matrix y = rng.normal_matrix(n, l);
    const Matrix v = rng.normal_matrix(l, d);
    augmentation::AugmentationModel model;
    model.theta = random_psd(d, rng);
    model.gamma = random_psd(d, rng);
    model.alpha = 2.0 * rng.uniform();
    const solvers::RidgeCheck rcheck = solvers::ridge_equivalence_check(
        x, y, v, model, draws, mix_seed(seed, 9500 + static_cast<std::uint64_t>(i)));
    const double sigmas = std::abs(rcheck.mc_loss - rcheck.ridge_loss) /
                          std::max(rcheck.se, 1e-300);
    worst_sigmas = std::max(worst_sigmas, sigmas);
    if (sigmas > 4.0) ++failures;
  }
  checks.push_back({"ridge_equivalence_4se", failures == 0,
                    "worst deviation " + fmt(worst_sigmas) + " SE"});
  return checks;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.pass; });
}

}  // namespace sslab::verify
