/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include "nncgp/types.hpp"

namespace nncgp {

/// Diagonal anisotropic exponential kernel parameters: variance sigma2 and
/// one positive range per coordinate.
struct KernelParams {
  double sigma2 = 1.0;
  Vector phi;

  void validate() const;
};

/// k(s, s') = sigma2 * exp(-1/2 * sum_i |s_i - s'_i| / phi_i).
double kernel(const Eigen::Ref<const Vector>& a,
              const Eigen::Ref<const Vector>& b, const KernelParams& p);

/// Correlation part of the kernel (sigma2 factored out), indexed into two
/// point matrices. This is the hot path for factor construction.
double correlation(const Matrix& A, int i, const Matrix& B, int j,
                   const Vector& phi);

/// M[i][j] = kernel(A.row(i), B.row(j)); symmetric PSD when A and B alias.
Matrix cross_cov(const Matrix& A, const Matrix& B, const KernelParams& p);

/// Cholesky with the documented jitter fallback: on failure add
/// 1e-10 * scale to the diagonal and retry once; a second failure throws.
/// `label` names the offending computation in the error message.
Eigen::LLT<Matrix> chol_with_jitter(Matrix C, double scale,
                                    const std::string& label);

}  // namespace nncgp
