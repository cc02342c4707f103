// Shared error types, RNG, and matrix aliases used across the library.

#ifndef SSLAB_COMMON_HPP
#define SSLAB_COMMON_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sslab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SSLAB_DEFINE_ERROR(Name)                                    \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

SSLAB_DEFINE_ERROR(NonSymmetric);
SSLAB_DEFINE_ERROR(NonFinite);
SSLAB_DEFINE_ERROR(SingularMatrix);
SSLAB_DEFINE_ERROR(SingularSystem);
SSLAB_DEFINE_ERROR(RankOutOfRange);
SSLAB_DEFINE_ERROR(DimensionMismatch);
SSLAB_DEFINE_ERROR(EmptyData);
SSLAB_DEFINE_ERROR(SpecInvalid);
SSLAB_DEFINE_ERROR(BadMagic);
SSLAB_DEFINE_ERROR(TruncatedFile);
SSLAB_DEFINE_ERROR(CountMismatch);
SSLAB_DEFINE_ERROR(RaggedRows);
SSLAB_DEFINE_ERROR(NonNumericCell);
SSLAB_DEFINE_ERROR(InsufficientSamples);
SSLAB_DEFINE_ERROR(NonConvergence);
SSLAB_DEFINE_ERROR(NoBracket);
SSLAB_DEFINE_ERROR(SchemaMismatch);
SSLAB_DEFINE_ERROR(IoError);

#undef SSLAB_DEFINE_ERROR

// Counter-based seed mixing (splitmix64 finalizer). Used to derive
// independent streams per (seed, index...) so parallel work is reproducible
// regardless of scheduling.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic Gaussian generator. Hand-rolled Box-Muller over splitmix64
// so that streams are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sslab

#endif  // SSLAB_COMMON_HPP
