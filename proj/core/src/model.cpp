/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/model.hpp"

#include <cmath>

namespace nncgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;

double log_normal_pdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + r * r / var);
}

double log_inverse_gamma_pdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) -
         (shape + 1.0) * std::log(x) - rate / x;
}
}  // namespace

int basis_size(BasisKind kind, int dim) {
  return kind == BasisKind::kConstant ? 1 : 1 + dim;
}

void eval_basis(BasisKind kind, const Eigen::Ref<const Vector>& point,
                Eigen::Ref<Vector> out) {
  out[0] = 1.0;
  if (kind == BasisKind::kConstantLinear)
    for (Eigen::Index j = 0; j < point.size(); ++j) out[1 + j] = point[j];
}

Matrix basis_design(BasisKind kind, const Matrix& points) {
  Matrix design(points.rows(), basis_size(kind, points.cols()));
  design.col(0).setOnes();
  if (kind == BasisKind::kConstantLinear)
    design.rightCols(points.cols()) = points;
  return design;
}

BasisConfig BasisConfig::uniform(int T, BasisKind trend_kind,
                                 BasisKind scale_kind) {
  BasisConfig cfg;
  cfg.trend.assign(T, trend_kind);
  cfg.scale.assign(T, scale_kind);
  return cfg;
}

Workspace build_workspace(std::vector<FidelityDataset> datasets, int m,
                          BasisConfig basis, bool jitter_duplicates) {
  if (datasets.empty()) throw InvalidInput("build_workspace: no datasets");
  Workspace ws;
  ws.T = static_cast<int>(datasets.size());
  ws.dim = datasets[0].dim();
  ws.m = m;
  if (static_cast<int>(basis.trend.size()) != ws.T ||
      static_cast<int>(basis.scale.size()) != ws.T)
    throw InvalidInput("build_workspace: basis config size mismatch");
  for (auto& ds : datasets) {
    validate_dataset(ds, jitter_duplicates);
    ds.locations =
        dedupe_locations(ds.locations, jitter_duplicates,
                         "dataset level " + std::to_string(ds.level));
  }
  ws.data = std::move(datasets);
  ws.refsets = augment_reference_sets(ws.data);
  ws.basis = std::move(basis);

  ws.graphs.reserve(ws.T);
  ws.children.reserve(ws.T);
  ws.trend_design.resize(ws.T);
  ws.scale_design.resize(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    ws.graphs.push_back(build_neighbor_graph(ws.refsets[t], m));
    ws.children.push_back(build_children(ws.graphs[t]));
    ws.trend_design[t] = basis_design(ws.basis.trend[t],
                                      ws.refsets[t].combined);
    if (t >= 1)
      ws.scale_design[t] = basis_design(ws.basis.scale[t],
                                        ws.refsets[t].combined);
  }

  ws.occurrences.resize(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    ws.occurrences[t].resize(ws.n_total(t));
    for (int td = t; td < ws.T; ++td)
      for (int i = 0; i < ws.data[td].size(); ++i)
        ws.occurrences[t][ws.row_in_level(t, td, i)].emplace_back(td, i);
  }
  return ws;
}

double zeta_at(const Workspace& ws, int t, int row, const Vector& gamma) {
  return ws.scale_design[t].row(row).dot(gamma);
}

void compose_y(LatentState& state, const std::vector<LevelParams>& params,
               const Workspace& ws, int from) {
  if (static_cast<int>(state.y_tilde.size()) != ws.T)
    state.y_tilde.resize(ws.T);
  for (int t = from; t < ws.T; ++t) {
    const Vector& w = state.w_tilde[t];
    if (w.size() != ws.n_total(t))
      throw InvalidInput("compose_y: latent size mismatch at level " +
                         std::to_string(t + 1));
    Vector y = ws.trend_design[t] * params[t].beta + w;
    if (t >= 1) {
      const Vector& y_prev = state.y_tilde[t - 1];
      const auto& rows_prev = ws.refsets[t - 1].level_rows;
      // S̃_t resolves into S̃_{t-1}: own rows through level t's map, extra
      // rows through the map of the level that contributed them.
      for (int u = 0; u < ws.n_total(t); ++u) {
        const auto& occ = ws.occurrences[t][u];
        if (occ.empty())
          throw InvalidInput("compose_y: missing index mapping at level " +
                             std::to_string(t + 1));
        const auto& [td, i] = occ.front();
        const int prev_row = rows_prev[td - (t - 1)][i];
        y[u] += zeta_at(ws, t, u, params[t].gamma) * y_prev[prev_row];
      }
    }
    state.y_tilde[t] = std::move(y);
  }
}

double log_prior(const LevelParams& p, const LevelPriors& prior) {
  double lp = 0.0;
  for (Eigen::Index j = 0; j < p.beta.size(); ++j)
    lp += log_normal_pdf(p.beta[j], prior.beta_mean[j], prior.beta_var[j]);
  for (Eigen::Index j = 0; j < p.gamma.size(); ++j)
    lp += log_normal_pdf(p.gamma[j], prior.gamma_mean[j], prior.gamma_var[j]);
  lp += log_inverse_gamma_pdf(p.kernel.sigma2, prior.sigma2_shape,
                              prior.sigma2_rate);
  lp += log_inverse_gamma_pdf(p.tau2, prior.tau2_shape, prior.tau2_rate);
  for (Eigen::Index j = 0; j < p.kernel.phi.size(); ++j) {
    if (p.kernel.phi[j] <= 0.0 || p.kernel.phi[j] >= prior.phi_upper[j])
      return -std::numeric_limits<double>::infinity();
    lp -= std::log(prior.phi_upper[j]);
  }
  return lp;
}

LogJointBreakdown log_joint_breakdown(
    const LatentState& state, const std::vector<LevelParams>& params,
    const Priors& priors, const Workspace& ws,
    const std::vector<NNGPFactors>& factors) {
  LogJointBreakdown out;
  out.prior.resize(ws.T);
  out.nngp.resize(ws.T);
  out.likelihood.resize(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    out.prior[t] = log_prior(params[t], priors[t]);
    out.nngp[t] = nngp_log_density(state.w_tilde[t], factors[t],
                                   ws.graphs[t]);
    double ll = 0.0;
    const Vector& y = state.y_tilde[t];
    for (int u = 0; u < ws.n_own(t); ++u)
      ll += log_normal_pdf(ws.data[t].values[u], y[u], params[t].tau2);
    out.likelihood[t] = ll;
    out.total += out.prior[t] + out.nngp[t] + out.likelihood[t];
  }
  return out;
}

double log_joint(const LatentState& state,
                 const std::vector<LevelParams>& params, const Priors& priors,
                 const Workspace& ws,
                 const std::vector<NNGPFactors>& factors) {
  const LogJointBreakdown b =
      log_joint_breakdown(state, params, priors, ws, factors);
  for (int t = 0; t < ws.T; ++t) {
    if (!std::isfinite(b.prior[t]))
      throw NumericalError("log_joint: non-finite prior term at level " +
                           std::to_string(t + 1));
    if (!std::isfinite(b.nngp[t]))
      throw NumericalError("log_joint: non-finite latent density at level " +
                           std::to_string(t + 1));
    if (!std::isfinite(b.likelihood[t]))
      throw NumericalError("log_joint: non-finite likelihood at level " +
                           std::to_string(t + 1));
  }
  return b.total;
}

std::vector<LevelParams> init_params(const Priors& priors,
                                     const Workspace& ws) {
  if (static_cast<int>(priors.size()) != ws.T)
    throw InvalidInput("init_params: priors size mismatch");
  std::vector<LevelParams> params(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    const LevelPriors& pr = priors[t];
    LevelParams& p = params[t];
    p.beta = pr.beta_mean;
    p.gamma = pr.gamma_mean;
    p.kernel.sigma2 = pr.sigma2_shape > 1.0
                          ? pr.sigma2_rate / (pr.sigma2_shape - 1.0)
                          : pr.sigma2_rate;
    p.tau2 = pr.tau2_shape > 1.0 ? pr.tau2_rate / (pr.tau2_shape - 1.0)
                                 : pr.tau2_rate;
    p.kernel.phi = 0.5 * pr.phi_upper;
    const int pbeta = basis_size(ws.basis.trend[t], ws.dim);
    if (p.beta.size() != pbeta)
      throw InvalidInput("init_params: beta prior size mismatch at level " +
                         std::to_string(t + 1));
    const int pgamma = t >= 1 ? basis_size(ws.basis.scale[t], ws.dim) : 0;
    if (p.gamma.size() != pgamma)
      throw InvalidInput("init_params: gamma prior size mismatch at level " +
                         std::to_string(t + 1));
    if (pr.phi_upper.size() != ws.dim)
      throw InvalidInput("init_params: phi_upper size mismatch at level " +
                         std::to_string(t + 1));
  }
  return params;
}

LatentState init_latent(const Workspace& ws,
                        const std::vector<LevelParams>& params) {
  LatentState state;
  state.w_tilde.resize(ws.T);
  for (int t = 0; t < ws.T; ++t)
    state.w_tilde[t] = Vector::Zero(ws.n_total(t));
  compose_y(state, params, ws);
  return state;
}

}  // namespace nncgp
