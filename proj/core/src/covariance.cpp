/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/covariance.hpp"

#include <cmath>

namespace nncgp {

void KernelParams::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidInput("KernelParams: sigma2 must be positive and finite");
  if (phi.size() == 0) throw InvalidInput("KernelParams: phi is empty");
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
      throw InvalidInput("KernelParams: phi must be positive and finite");
}

double kernel(const Eigen::Ref<const Vector>& a,
              const Eigen::Ref<const Vector>& b, const KernelParams& p) {
  if (a.size() != b.size() || a.size() != p.phi.size())
    throw InvalidInput("kernel: dimension mismatch");
  double e = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    e += std::abs(a[i] - b[i]) / p.phi[i];
  return p.sigma2 * std::exp(-0.5 * e);
}

double correlation(const Matrix& A, int i, const Matrix& B, int j,
                   const Vector& phi) {
  double e = 0.0;
  for (Eigen::Index c = 0; c < phi.size(); ++c)
    e += std::abs(A(i, c) - B(j, c)) / phi[c];
  return std::exp(-0.5 * e);
}

Matrix cross_cov(const Matrix& A, const Matrix& B, const KernelParams& p) {
  if (A.rows() == 0 || B.rows() == 0)
    throw InvalidInput("cross_cov: empty point list");
  if (A.cols() != B.cols() || A.cols() != p.phi.size())
    throw InvalidInput("cross_cov: dimension mismatch");
  Matrix M(A.rows(), B.rows());
  #pragma omp parallel for schedule(static) if (A.rows() * B.rows() > 16384)
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j)
      M(i, j) = p.sigma2 * correlation(A, i, B, j, p.phi);
  return M;
}

Eigen::LLT<Matrix> chol_with_jitter(Matrix C, double scale,
                                    const std::string& label) {
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() == Eigen::Success) return llt;
  C.diagonal().array() += 1e-10 * scale;
  llt.compute(C);
  if (llt.info() == Eigen::Success) return llt;
  throw NumericalError(label + ": covariance not positive definite after "
                       "jitter retry");
}

}  // namespace nncgp
