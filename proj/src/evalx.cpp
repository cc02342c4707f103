#include "sslab/evalx.hpp"

namespace sslab::evalx {

Matrix represent(const Matrix& encoder, const Matrix& x) {
  if (encoder.cols() != x.cols())
    throw DimensionMismatch("encoder expects " + std::to_string(encoder.cols()) +
                            " features, data has " + std::to_string(x.cols()));
  return x * encoder.transpose();
}

ProbeResult fit_probe(const Matrix& z, const Matrix& y, double ridge) {
  if (z.rows() != y.rows()) throw DimensionMismatch("Z and Y sample counts differ");
  if (z.rows() < 1) throw EmptyData("fit_probe needs n >= 1");
  const double n = static_cast<double>(z.rows());
  const Eigen::Index k = z.cols();

  Matrix gram = z.transpose() * z;
  if (ridge > 0.0) gram += n * ridge * Matrix::Identity(k, k);

  ProbeResult out;
  Eigen::LDLT<Matrix> ldlt(gram);
  bool solved = false;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    const Matrix w = ldlt.solve(z.transpose() * y).transpose();
    // LDLT accepts mildly indefinite inputs; accept only if the normal
    // equations actually hold.
    const double resid = (gram * w.transpose() - z.transpose() * y).norm();
    if (resid <= 1e-8 * std::max(1.0, (z.transpose() * y).norm())) {
      out.weights = w;
      solved = true;
    }
  }
  if (!solved) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(z);
    out.weights = cod.solve(y).transpose();
    out.used_pseudo_inverse = true;
  }
  out.loss = (y - z * out.weights.transpose()).squaredNorm() / n;
  return out;
}

double probe_loss(const ProbeResult& probe, const Matrix& z, const Matrix& y) {
  if (z.rows() != y.rows()) throw DimensionMismatch("Z and Y sample counts differ");
  if (z.cols() != probe.weights.cols())
    throw DimensionMismatch("probe expects " + std::to_string(probe.weights.cols()) +
                            " features");
  if (z.rows() < 1) throw EmptyData("probe_loss needs n >= 1");
  return (y - z * probe.weights.transpose()).squaredNorm() /
         static_cast<double>(z.rows());
}

double probe_gap(const Matrix& clean_repr, const Matrix& corrupt_repr, const Matrix& y) {
  if (clean_repr.rows() != corrupt_repr.rows() ||
      clean_repr.cols() != corrupt_repr.cols())
    throw DimensionMismatch("representation shapes differ");
  if (clean_repr.rows() != y.rows())
    throw DimensionMismatch("labels do not match representations");
  return std::abs(fit_probe(clean_repr, y).loss - fit_probe(corrupt_repr, y).loss);
}

}  // namespace sslab::evalx
