// Test-side oracles, deliberately independent of the library code paths
// they are used to check. Everything here is brute force: dense linear
// algebra, exhaustive scans, quadrature and counting.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nncgp/rng.hpp"

namespace testsupport {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Anisotropic exponential covariance assembled entry by entry.
inline MatrixXd dense_cov(const MatrixXd& A, const MatrixXd& B, double sigma2,
                          const VectorXd& phi) {
  MatrixXd C(A.rows(), B.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.rows(); ++j) {
      double e = 0.0;
      for (int c = 0; c < A.cols(); ++c)
        e += std::abs(A(i, c) - B(j, c)) / phi[c];
      C(i, j) = sigma2 * std::exp(-0.5 * e);
    }
  return C;
}

// Exact multivariate normal log density via full LDLT.
inline double dense_mvn_logpdf(const VectorXd& x, const VectorXd& mu,
                               const MatrixXd& cov) {
  const Eigen::LDLT<MatrixXd> ldlt(cov);
  const VectorXd r = x - mu;
  const double quad = r.dot(ldlt.solve(r));
  const double logdet = ldlt.vectorD().array().log().sum();
  return -0.5 * (x.size() * std::log(2.0 * M_PI) + logdet + quad);
}

// Exact Gaussian conditioning of components `target` on `given`.
struct CondMoments {
  VectorXd mean;
  MatrixXd cov;
};
inline CondMoments dense_condition(const VectorXd& mu, const MatrixXd& cov,
                                   const std::vector<int>& given,
                                   const VectorXd& values,
                                   const std::vector<int>& target) {
  const int ng = static_cast<int>(given.size());
  const int nt = static_cast<int>(target.size());
  MatrixXd s_gg(ng, ng), s_tg(nt, ng), s_tt(nt, nt);
  VectorXd mu_g(ng), mu_t(nt);
  for (int i = 0; i < ng; ++i) {
    mu_g[i] = mu[given[i]];
    for (int j = 0; j < ng; ++j) s_gg(i, j) = cov(given[i], given[j]);
  }
  for (int i = 0; i < nt; ++i) {
    mu_t[i] = mu[target[i]];
    for (int j = 0; j < ng; ++j) s_tg(i, j) = cov(target[i], given[j]);
    for (int j = 0; j < nt; ++j) s_tt(i, j) = cov(target[i], target[j]);
  }
  CondMoments out;
  if (ng == 0) {
    out.mean = mu_t;
    out.cov = s_tt;
    return out;
  }
  const Eigen::LDLT<MatrixXd> ldlt(s_gg);
  const MatrixXd gain = ldlt.solve(s_tg.transpose()).transpose();
  out.mean = mu_t + gain * (values - mu_g);
  out.cov = s_tt - gain * s_tg.transpose();
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value
// (Numerical Recipes small-lambda series).
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / a.size();
    const double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

inline double ks_pvalue(double d, std::size_t n1, std::size_t n2) {
  const double ne = static_cast<double>(n1) * n2 / (n1 + n2);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * std::pow(-1.0, k - 1) *
                        std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

// Deterministic uniform/normal scalars for oracle-side simulation.
inline double oracle_uniform(nncgp::RngStream& rng) { return rng.uniform(); }

}  // namespace testsupport
