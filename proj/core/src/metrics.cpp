/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/metrics.hpp"

#include <cmath>

namespace nncgp {

double rmspe(const Vector& pred, const Vector& obs) {
  if (pred.size() != obs.size() || pred.size() == 0)
    throw InvalidInput("rmspe: length mismatch");
  return std::sqrt((pred - obs).squaredNorm() /
                   static_cast<double>(pred.size()));
}

double nsme(const Vector& pred, const Vector& obs) {
  if (pred.size() != obs.size() || pred.size() == 0)
    throw InvalidInput("nsme: length mismatch");
  const double mean = obs.mean();
  const double sst = (obs.array() - mean).square().sum();
  if (!(sst > 0.0))
    throw InvalidInput("nsme: observations are constant");
  const double sse = (pred - obs).squaredNorm();
  return 1.0 - sse / sst;
}

std::pair<double, double> interval_metrics(const Vector& lower,
                                           const Vector& upper,
                                           const Vector& obs) {
  if (lower.size() != obs.size() || upper.size() != obs.size() ||
      obs.size() == 0)
    throw InvalidInput("interval_metrics: length mismatch");
  int covered = 0;
  double total_len = 0.0;
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    if (lower[i] > upper[i])
      throw InvalidInput("interval_metrics: lower bound exceeds upper at "
                         "index " + std::to_string(i));
    if (obs[i] >= lower[i] && obs[i] <= upper[i]) ++covered;
    total_len += upper[i] - lower[i];
  }
  const double n = static_cast<double>(obs.size());
  return {covered / n, total_len / n};
}

namespace {

// -2 log p(z | params, w) with the factorized likelihood.
double deviance(const std::vector<LevelParams>& params,
                const LatentState& state, const Workspace& ws) {
  constexpr double kLog2Pi = 1.8378770664093453;
  double ll = 0.0;
  for (int t = 0; t < ws.T; ++t) {
    const Vector& y = state.y_tilde[t];
    const double tau2 = params[t].tau2;
    for (int u = 0; u < ws.n_own(t); ++u) {
      const double r = ws.data[t].values[u] - y[u];
      ll += -0.5 * (kLog2Pi + std::log(tau2) + r * r / tau2);
    }
  }
  return -2.0 * ll;
}

}  // namespace

std::pair<double, double> dic(const ChainTrace& trace, const Workspace& ws) {
  if (trace.n_retained == 0) throw InvalidInput("dic: empty trace");
  for (int t = 0; t < ws.T; ++t)
    if (trace.w_snapshots[t].rows() != trace.n_retained)
      throw InvalidInput("dic: trace carries no latent snapshots");

  double mean_dev = 0.0;
  LatentState state;
  state.w_tilde.resize(ws.T);
  for (int r = 0; r < trace.n_retained; ++r) {
    const std::vector<LevelParams> params = trace.params_at(r, ws);
    for (int t = 0; t < ws.T; ++t)
      state.w_tilde[t] = trace.w_snapshots[t].row(r).transpose();
    compose_y(state, params, ws);
    mean_dev += deviance(params, state, ws);
  }
  mean_dev /= trace.n_retained;

  // Plug-in deviance at posterior means of parameters and latents.
  std::vector<LevelParams> mean_params(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    mean_params[t].beta = trace.beta[t].colwise().mean().transpose();
    mean_params[t].gamma = trace.gamma[t].cols() > 0
                               ? Vector(trace.gamma[t].colwise().mean()
                                            .transpose())
                               : Vector();
    mean_params[t].kernel.sigma2 = trace.sigma2[t].mean();
    mean_params[t].kernel.phi = trace.phi[t].colwise().mean().transpose();
    mean_params[t].tau2 = trace.tau2[t].mean();
    state.w_tilde[t] = trace.w_snapshots[t].colwise().mean().transpose();
  }
  compose_y(state, mean_params, ws);
  const double plug_in = deviance(mean_params, state, ws);

  const double pd = mean_dev - plug_in;
  return {pd, pd + mean_dev};
}

}  // namespace nncgp
