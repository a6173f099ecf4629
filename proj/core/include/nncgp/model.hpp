/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <vector>

#include "nncgp/nngp.hpp"

namespace nncgp {

/// Basis families for the trend h_t and the scale discrepancy g_t:
/// a constant, or a constant plus one linear term per coordinate.
enum class BasisKind { kConstant, kConstantLinear };

int basis_size(BasisKind kind, int dim);

/// Evaluates a basis at a single point into `out` (sized basis_size).
void eval_basis(BasisKind kind, const Eigen::Ref<const Vector>& point,
                Eigen::Ref<Vector> out);

/// Basis design matrix over the rows of a point matrix.
Matrix basis_design(BasisKind kind, const Matrix& points);

/// Per-level basis choices for the whole model. scale[0] is unused
/// (level 1 has no scale discrepancy).
struct BasisConfig {
  std::vector<BasisKind> trend;
  std::vector<BasisKind> scale;

  static BasisConfig uniform(int T, BasisKind trend_kind,
                             BasisKind scale_kind);
};

/// All level-t model parameters: trend coefficients beta_t, scale
/// coefficients gamma_{t-1} (empty at level 1), kernel (sigma2_t, phi_t)
/// and the nugget variance tau2_t.
struct LevelParams {
  Vector beta;
  Vector gamma;
  KernelParams kernel;
  double tau2 = 1.0;
};

/// Conjugate prior choices for one level. Vector-valued entries are
/// diagonal Gaussian moments; sigma2 and tau2 carry inverse-gamma
/// (shape, rate); phi has an independent U(0, upper_j) per coordinate.
struct LevelPriors {
  Vector beta_mean, beta_var;
  Vector gamma_mean, gamma_var;  // empty at level 1
  double sigma2_shape = 2.0, sigma2_rate = 1.0;
  double tau2_shape = 2.0, tau2_rate = 1.0;
  Vector phi_upper;
};

using Priors = std::vector<LevelPriors>;

/// Latent state over the augmented reference sets: w_tilde[t] is the
/// level-(t+1) process on S̃_{t+1} (own rows first), and y_tilde[t] is the
/// composed autoregressive output at the same rows.
struct LatentState {
  std::vector<Vector> w_tilde;
  std::vector<Vector> y_tilde;
};

/// Immutable per-fit bundle: data, augmented reference sets, neighbor
/// graphs, reverse adjacency, basis designs and the cross-level index
/// maps every update needs.
struct Workspace {
  int T = 0;
  int dim = 0;
  int m = 0;
  std::vector<FidelityDataset> data;
  std::vector<AugmentedReferenceSet> refsets;
  std::vector<NeighborGraph> graphs;
  std::vector<ChildIndex> children;
  BasisConfig basis;
  std::vector<Matrix> trend_design;  // per level, over combined rows
  std::vector<Matrix> scale_design;  // per level >= 2, over combined rows

  // occurrences[t][u]: levels t' >= t observing the site at combined row u
  // of level t, as (level index t', data row in level t'). The own-level
  // entry (t, u) is present for u < n_own.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> occurrences;

  int n_own(int t) const { return refsets[t].n_own; }
  int n_total(int t) const { return refsets[t].size(); }
  /// Combined row of data row i of level t_data within level t's reference
  /// set (requires t <= t_data).
  int row_in_level(int t, int t_data, int i) const {
    return refsets[t].level_rows[t_data - t][i];
  }
};

Workspace build_workspace(std::vector<FidelityDataset> datasets, int m,
                          BasisConfig basis, bool jitter_duplicates = false);

/// Scale discrepancy ζ_{t-1}(s_u | gamma) at combined row u of level t.
double zeta_at(const Workspace& ws, int t, int row, const Vector& gamma);

/// Recomputes y_tilde from w_tilde and the parameters:
/// y_1 = H_1 β_1 + w_1 and y_t = ζ_{t-1} ∘ y_{t-1} + H_t β_t + w_t,
/// starting at level `from` (0-based).
void compose_y(LatentState& state, const std::vector<LevelParams>& params,
               const Workspace& ws, int from = 0);

/// Per-level contributions to the joint posterior log density.
struct LogJointBreakdown {
  std::vector<double> prior;       // log p(Θ_t)
  std::vector<double> nngp;        // log p̃(w_t | θ_t) + log p̃(w_t* | w_t, θ_t)
  std::vector<double> likelihood;  // log N(Z_t | y_t(S_t), τ_t² I)
  double total = 0.0;
};

LogJointBreakdown log_joint_breakdown(
    const LatentState& state, const std::vector<LevelParams>& params,
    const Priors& priors, const Workspace& ws,
    const std::vector<NNGPFactors>& factors);

/// Log of the joint posterior kernel (up to the normalizing constant).
/// Throws NumericalError naming the offending term when not finite.
double log_joint(const LatentState& state,
                 const std::vector<LevelParams>& params, const Priors& priors,
                 const Workspace& ws, const std::vector<NNGPFactors>& factors);

/// Gaussian, inverse-gamma and uniform prior log densities for one level.
double log_prior(const LevelParams& p, const LevelPriors& prior);

/// Deterministic initialization per the documented policy: beta and gamma
/// at prior means, variances at prior means, phi at half the upper bound,
/// w at zero.
std::vector<LevelParams> init_params(const Priors& priors,
                                     const Workspace& ws);
LatentState init_latent(const Workspace& ws,
                        const std::vector<LevelParams>& params);

}  // namespace nncgp
