/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/oracle.hpp"

#include <cmath>
#include <unordered_set>

namespace nncgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

DenseJoint dense_marginal_cov(const std::vector<FidelityDataset>& datasets,
                              const std::vector<LevelParams>& params,
                              const BasisConfig& basis, int cap) {
  const int T = static_cast<int>(datasets.size());
  if (T == 0) throw InvalidInput("dense_marginal_cov: no datasets");
  int total = 0;
  for (const auto& ds : datasets) total += ds.size();
  if (total > cap)
    throw InvalidInput("dense_marginal_cov: stacked size " +
                       std::to_string(total) + " exceeds cap " +
                       std::to_string(cap));

  DenseJoint joint;
  joint.mu.resize(total);
  joint.lambda.resize(total, total);
  joint.level_offsets.resize(T);

  // Scale factors prod_{j=i..t-1} ζ_j(s) per level pair, evaluated per
  // stacked row: scales[t][i](k) with i in [0, t].
  std::vector<std::vector<Vector>> scales(T);
  int offset = 0;
  for (int t = 0; t < T; ++t) {
    joint.level_offsets[t] = offset;
    offset += datasets[t].size();
    scales[t].resize(t + 1);
    scales[t][t] = Vector::Ones(datasets[t].size());
    for (int i = t - 1; i >= 0; --i) {
      // One extra ζ_i factor relative to the product starting at i + 1.
      const Matrix g = basis_design(basis.scale[i + 1],
                                    datasets[t].locations);
      scales[t][i] = scales[t][i + 1].cwiseProduct(g * params[i + 1].gamma);
    }
  }

  for (int t = 0; t < T; ++t) {
    Vector mean = Vector::Zero(datasets[t].size());
    for (int i = 0; i <= t; ++i) {
      const Vector trend_i = basis_design(basis.trend[i],
                                          datasets[t].locations) *
                             params[i].beta;
      mean += scales[t][i].cwiseProduct(trend_i);
    }
    joint.mu.segment(joint.level_offsets[t], datasets[t].size()) = mean;
  }

  for (int t = 0; t < T; ++t) {
    for (int u = t; u < T; ++u) {
      Matrix block = Matrix::Zero(datasets[t].size(), datasets[u].size());
      for (int i = 0; i <= t; ++i) {
        const Matrix c = cross_cov(datasets[t].locations,
                                   datasets[u].locations, params[i].kernel);
        block += scales[t][i].asDiagonal() * c * scales[u][i].asDiagonal();
      }
      if (u == t) {
        block.diagonal().array() += params[t].tau2;
        // Distinct rows at identical coordinates share the field but not
        // the noise; exact duplicates within a level are rejected at
        // ingestion, so nothing more to do here.
      }
      joint.lambda.block(joint.level_offsets[t], joint.level_offsets[u],
                         datasets[t].size(), datasets[u].size()) = block;
      if (u != t)
        joint.lambda.block(joint.level_offsets[u], joint.level_offsets[t],
                           datasets[u].size(), datasets[t].size()) =
            block.transpose();
    }
  }
  return joint;
}

double dense_log_likelihood(const Vector& z, const DenseJoint& joint) {
  if (z.size() != joint.mu.size())
    throw InvalidInput("dense_log_likelihood: dimension mismatch");
  Eigen::LLT<Matrix> llt(joint.lambda);
  if (llt.info() != Eigen::Success)
    throw NumericalError("dense_log_likelihood: covariance factorization "
                         "failed");
  const Vector resid = z - joint.mu;
  const Vector alpha = llt.solve(resid);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < joint.lambda.rows(); ++i)
    logdet += std::log(llt.matrixL()(i, i));
  return -0.5 * (z.size() * kLog2Pi + resid.dot(alpha)) - logdet;
}

std::pair<Vector, Matrix> dense_conditional(const DenseJoint& joint,
                                            const std::vector<int>& observed,
                                            const Vector& z_obs,
                                            const std::vector<int>& targets) {
  if (static_cast<int>(observed.size()) != z_obs.size())
    throw InvalidInput("dense_conditional: observed values length mismatch");
  std::unordered_set<int> obs_set(observed.begin(), observed.end());
  for (int t : targets)
    if (obs_set.count(t))
      throw InvalidInput("dense_conditional: target and observed index sets "
                         "overlap");

  const int no = static_cast<int>(observed.size());
  const int nt = static_cast<int>(targets.size());
  Vector mu_t(nt);
  for (int i = 0; i < nt; ++i) mu_t[i] = joint.mu[targets[i]];
  Matrix s_tt(nt, nt);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nt; ++j)
      s_tt(i, j) = joint.lambda(targets[i], targets[j]);
  if (no == 0) return {mu_t, s_tt};

  Vector mu_o(no);
  Matrix s_oo(no, no), s_to(nt, no);
  for (int i = 0; i < no; ++i) {
    mu_o[i] = joint.mu[observed[i]];
    for (int j = 0; j < no; ++j)
      s_oo(i, j) = joint.lambda(observed[i], observed[j]);
    for (int k = 0; k < nt; ++k) s_to(k, i) = joint.lambda(targets[k],
                                                           observed[i]);
  }
  Eigen::LLT<Matrix> llt(s_oo);
  if (llt.info() != Eigen::Success)
    throw NumericalError("dense_conditional: observed block is singular");
  const Matrix gain = llt.solve(s_to.transpose()).transpose();  // nt x no
  Vector mean = mu_t + gain * (z_obs - mu_o);
  Matrix cov = s_tt - gain * s_to.transpose();
  return {std::move(mean), std::move(cov)};
}

}  // namespace nncgp
