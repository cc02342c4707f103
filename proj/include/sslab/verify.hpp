// Self-check suites driven by the `verify` CLI subcommand: closed forms
// against iterative oracles, structural invariants, threshold formulas
// against bisection, and the augmented-loss / ridge identity.

#ifndef SSLAB_VERIFY_HPP
#define SSLAB_VERIFY_HPP

#include "sslab/common.hpp"
#include "sslab/datamodel.hpp"

#include <string>
#include <vector>

namespace sslab::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Random problem instance shared by the oracle checks: data matrix plus a
// PSD augmentation covariance with controlled conditioning.
struct RandomInstance {
  Matrix x;      // n x d
  Matrix y;      // n x l
  Matrix sigma;  // d x d PSD
  Eigen::Index k = 1;
};

RandomInstance make_random_instance(std::uint64_t seed, Eigen::Index d_max = 20);

// Random spectral spec with d <= d_max; thresholds may be positive or
// vacuous depending on the draw.
datamodel::SpectralSpec make_random_spec(std::uint64_t seed, Eigen::Index d_max = 12);

std::vector<Check> suite_oracles(int instances = 30, std::uint64_t seed = 7);
std::vector<Check> suite_invariants(std::uint64_t seed = 7);
std::vector<Check> suite_thresholds(int specs = 200, std::uint64_t seed = 7);
std::vector<Check> suite_lemma(int instances = 10, int draws = 20000,
                               std::uint64_t seed = 7);

bool all_pass(const std::vector<Check>& checks);

}  // namespace sslab::verify

#endif  // SSLAB_VERIFY_HPP
