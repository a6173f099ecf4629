/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include "nncgp/model.hpp"

namespace nncgp {

/// Exact joint moments of the stacked observations (z_1(S_1), ..., z_T(S_T))
/// under the autoregressive co-kriging model, ordered by level blocks.
/// Intended for small verification instances, not production fitting.
struct DenseJoint {
  Vector mu;
  Matrix lambda;
  std::vector<int> level_offsets;  // start row of each level block
};

/// Unconditional marginal moments:
///   mean_t(s)  = sum_{i<=t} (prod_{j=i..t-1} ζ_j(s)) h_i(s)·β_i
///   cov(z_t(s), z_{t'}(s')) =
///     sum_{i<=min(t,t')} (prod_{j=i..t-1} ζ_j(s)) (prod_{j=i..t'-1} ζ_j(s'))
///       C_i(s, s')  + 1{t = t', s = s'} τ_t².
/// Throws when the stacked size exceeds `cap`.
DenseJoint dense_marginal_cov(const std::vector<FidelityDataset>& datasets,
                              const std::vector<LevelParams>& params,
                              const BasisConfig& basis, int cap = 500);

/// Exact multivariate normal log density of a stacked observation vector.
double dense_log_likelihood(const Vector& z, const DenseJoint& joint);

/// Exact Gaussian conditioning: moments of the `target` components given
/// the `observed` components equal z_obs. Components in neither set are
/// marginalized out. The two index sets must be disjoint.
std::pair<Vector, Matrix> dense_conditional(const DenseJoint& joint,
                                            const std::vector<int>& observed,
                                            const Vector& z_obs,
                                            const std::vector<int>& targets);

}  // namespace nncgp
