/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

namespace nncgp {

void SamplerConfig::validate() const {
  if (burn_in < 0 || burn_in >= n_iter)
    throw InvalidInput("SamplerConfig: require 0 <= burn_in < n_iter");
  if (thin < 1) throw InvalidInput("SamplerConfig: thin must be >= 1");
  if (!(mh_step > 0.0)) throw InvalidInput("SamplerConfig: mh_step must be "
                                           "positive");
}

std::vector<LevelParams> ChainTrace::params_at(int draw,
                                               const Workspace& ws) const {
  std::vector<LevelParams> out(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    out[t].beta = beta[t].row(draw).transpose();
    out[t].gamma = gamma[t].cols() > 0 ? Vector(gamma[t].row(draw).transpose())
                                       : Vector();
    out[t].kernel.sigma2 = sigma2[t][draw];
    out[t].kernel.phi = phi[t].row(draw).transpose();
    out[t].tau2 = tau2[t][draw];
  }
  return out;
}

GibbsSampler::GibbsSampler(const Workspace& ws, Priors priors,
                           SamplerConfig config)
    : ws_(ws), priors_(std::move(priors)), cfg_(config) {
  cfg_.validate();
  params_ = init_params(priors_, ws_);
  latent_ = init_latent(ws_, params_);
  factors_.reserve(ws_.T);
  z_.resize(ws_.T);
  for (int t = 0; t < ws_.T; ++t) {
    factors_.push_back(compute_factors(ws_.graphs[t],
                                       ws_.refsets[t].combined,
                                       params_[t].kernel));
    z_[t] = ws_.data[t].values;
    streams_.emplace_back(cfg_.seed, static_cast<std::uint64_t>(t));
  }
  mh_step_.assign(ws_.T, cfg_.mh_step);
  phi_proposals_.assign(ws_.T, 0);
  phi_accepts_.assign(ws_.T, 0);
}

void GibbsSampler::set_state(std::vector<LevelParams> params,
                             LatentState latent) {
  params_ = std::move(params);
  latent_ = std::move(latent);
  for (int t = 0; t < ws_.T; ++t) {
    params_[t].kernel.validate();
    factors_[t] = compute_factors(ws_.graphs[t], ws_.refsets[t].combined,
                                  params_[t].kernel);
  }
  compose_y(latent_, params_, ws_);
}

void GibbsSampler::set_observations(int level, Vector z) {
  if (z.size() != ws_.n_own(level))
    throw InvalidInput("set_observations: length mismatch");
  z_[level] = std::move(z);
}

double GibbsSampler::current_log_joint() const {
  // Evaluated against the sampler's own (possibly replaced) observations.
  double total = 0.0;
  for (int t = 0; t < ws_.T; ++t) {
    total += log_prior(params_[t], priors_[t]);
    total += nngp_log_density(latent_.w_tilde[t], factors_[t], ws_.graphs[t]);
    const Vector& y = latent_.y_tilde[t];
    const double tau2 = params_[t].tau2;
    for (int u = 0; u < ws_.n_own(t); ++u) {
      const double r = z_[t][u] - y[u];
      total += -0.5 * (std::log(2.0 * M_PI * tau2) + r * r / tau2);
    }
  }
  return total;
}

GibbsSampler::SiteChain GibbsSampler::site_chain(int level, int row) const {
  SiteChain chain;
  const auto& occ = ws_.occurrences[level][row];
  int t_max = level;
  int td_ref = level, i_ref = row;
  for (const auto& [td, i] : occ)
    if (td > t_max) {
      t_max = td;
      td_ref = td;
      i_ref = i;
    }
  double c = 1.0;
  for (int lv = level + 1; lv <= t_max; ++lv) {
    const int r = ws_.row_in_level(lv, td_ref, i_ref);
    c *= zeta_at(ws_, lv, r, params_[lv].gamma);
    chain.rows.push_back(r);
    chain.coef.push_back(c);
  }
  return chain;
}

void GibbsSampler::sweep_latent(int level, Subset subset) {
  const NeighborGraph& graph = ws_.graphs[level];
  const NNGPFactors& fac = factors_[level];
  const auto& children = ws_.children[level].children;
  Vector& w = latent_.w_tilde[level];
  RngStream& rng = streams_[level];
  const int n_own = ws_.n_own(level);
  const bool exact = cfg_.update_rule == UpdateRule::kExact;

  for (int k = 0; k < graph.size(); ++k) {
    const int u = graph.order[k];
    const bool starred = u >= n_own;
    if (subset == Subset::kStarred && !starred) continue;
    if (subset == Subset::kObserved && starred) continue;

    const auto& nb = graph.neighbors[k];
    const double f_u = fac.f(k);
    double prior_mean = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      prior_mean += fac.b[k][a] * w[nb[a]];
    double prec = 1.0 / f_u;
    double lin = prior_mean / f_u;

    SiteChain chain;
    if (exact) {
      // Factors of later points that condition on this site.
      for (const auto& [kc, slot] : children[u]) {
        const double f_c = fac.f(kc);
        const Vector& b_c = fac.b[kc];
        const auto& nb_c = graph.neighbors[kc];
        double s = 0.0;
        for (std::size_t a = 0; a < nb_c.size(); ++a)
          s += b_c[a] * w[nb_c[a]];
        s -= b_c[slot] * w[u];
        prec += b_c[slot] * b_c[slot] / f_c;
        lin += b_c[slot] * (w[graph.order[kc]] - s) / f_c;
      }
      // Observation terms at every level that measures this site.
      chain = site_chain(level, u);
      for (const auto& [td, i] : ws_.occurrences[level][u]) {
        const double c = td == level ? 1.0 : chain.coef[td - level - 1];
        const double tau2 = params_[td].tau2;
        const double r = z_[td][i] - latent_.y_tilde[td][i] + c * w[u];
        prec += c * c / tau2;
        lin += c * r / tau2;
      }
    } else {
      if (!starred) {
        const double tau2 = params_[level].tau2;
        const double r = z_[level][u] - latent_.y_tilde[level][u] + w[u];
        prec += 1.0 / tau2;
        lin += r / tau2;
      }
      chain = site_chain(level, u);
    }

    const double variance = 1.0 / prec;
    const double w_new = variance * lin + std::sqrt(variance) * rng.normal();
    const double delta = w_new - w[u];
    w[u] = w_new;
    latent_.y_tilde[level][u] += delta;
    for (std::size_t j = 0; j < chain.rows.size(); ++j)
      latent_.y_tilde[level + 1 + j][chain.rows[j]] += chain.coef[j] * delta;
  }
}

template <typename DesignFn>
void GibbsSampler::accumulate_normal(int level, const Vector& mean0,
                                     const Vector& var0,
                                     const Vector& coef_cur,
                                     DesignFn&& design_at, Matrix& prec,
                                     Vector& rhs) const {
  const int p = static_cast<int>(mean0.size());
  prec = Matrix::Zero(p, p);
  prec.diagonal() = var0.cwiseInverse();
  rhs = mean0.cwiseQuotient(var0);
  const bool exact = cfg_.update_rule == UpdateRule::kExact;
  const int td_hi = exact ? ws_.T - 1 : level;
  Vector design(p);
  for (int td = level; td <= td_hi; ++td) {
    const double inv_tau2 = 1.0 / params_[td].tau2;
    for (int i = 0; i < ws_.data[td].size(); ++i) {
      design_at(td, i, design);
      const double resid =
          z_[td][i] - latent_.y_tilde[td][i] + design.dot(coef_cur);
      prec.selfadjointView<Eigen::Lower>().rankUpdate(design, inv_tau2);
      rhs += inv_tau2 * resid * design;
    }
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) prec(i, j) = prec(j, i);
}

namespace {

// ζ-product prod_{j=level..td-1} ζ_j at data row i of level td, i.e. the
// factor carrying a level's contribution up the autoregression.
double zeta_product(const Workspace& ws,
                    const std::vector<LevelParams>& params, int level, int td,
                    int i) {
  double c = 1.0;
  for (int lv = level + 1; lv <= td; ++lv)
    c *= zeta_at(ws, lv, ws.row_in_level(lv, td, i), params[lv].gamma);
  return c;
}

}  // namespace

GibbsSampler::GaussianMoments GibbsSampler::beta_conditional(
    int level) const {
  Matrix prec;
  Vector rhs;
  accumulate_normal(
      level, priors_[level].beta_mean, priors_[level].beta_var,
      params_[level].beta,
      [&](int td, int i, Vector& out) {
        const int row_t = ws_.row_in_level(level, td, i);
        out = zeta_product(ws_, params_, level, td, i) *
              ws_.trend_design[level].row(row_t).transpose();
      },
      prec, rhs);
  Eigen::LLT<Matrix> llt(prec);
  if (llt.info() != Eigen::Success)
    throw NumericalError("update_beta: singular posterior precision at "
                         "level " + std::to_string(level + 1));
  GaussianMoments m;
  m.mean = llt.solve(rhs);
  m.cov = llt.solve(Matrix::Identity(prec.rows(), prec.cols()));
  return m;
}

GibbsSampler::GaussianMoments GibbsSampler::gamma_conditional(
    int level) const {
  if (level < 1) throw InvalidInput("gamma_conditional: level must be >= 2");
  Matrix prec;
  Vector rhs;
  accumulate_normal(
      level, priors_[level].gamma_mean, priors_[level].gamma_var,
      params_[level].gamma,
      [&](int td, int i, Vector& out) {
        const int row_t = ws_.row_in_level(level, td, i);
        const int row_prev = ws_.row_in_level(level - 1, td, i);
        out = zeta_product(ws_, params_, level, td, i) *
              latent_.y_tilde[level - 1][row_prev] *
              ws_.scale_design[level].row(row_t).transpose();
      },
      prec, rhs);
  Eigen::LLT<Matrix> llt(prec);
  if (llt.info() != Eigen::Success)
    throw NumericalError("update_gamma: singular posterior precision at "
                         "level " + std::to_string(level + 1));
  GaussianMoments m;
  m.mean = llt.solve(rhs);
  m.cov = llt.solve(Matrix::Identity(prec.rows(), prec.cols()));
  return m;
}

void GibbsSampler::update_beta(int level) {
  const GaussianMoments m = beta_conditional(level);
  Vector zdraw(m.mean.size());
  for (Eigen::Index j = 0; j < zdraw.size(); ++j)
    zdraw[j] = streams_[level].normal();
  const Eigen::LLT<Matrix> llt(m.cov);
  params_[level].beta = m.mean + llt.matrixL() * zdraw;
  compose_y(latent_, params_, ws_, level);
}

void GibbsSampler::update_gamma(int level) {
  const GaussianMoments m = gamma_conditional(level);
  Vector zdraw(m.mean.size());
  for (Eigen::Index j = 0; j < zdraw.size(); ++j)
    zdraw[j] = streams_[level].normal();
  const Eigen::LLT<Matrix> llt(m.cov);
  params_[level].gamma = m.mean + llt.matrixL() * zdraw;
  compose_y(latent_, params_, ws_, level);
}

std::pair<double, double> GibbsSampler::sigma2_conditional(int level) const {
  const NeighborGraph& graph = ws_.graphs[level];
  const NNGPFactors& fac = factors_[level];
  const Vector& w = latent_.w_tilde[level];
  double quad = 0.0;
  for (int k = 0; k < graph.size(); ++k) {
    const auto& nb = graph.neighbors[k];
    double mean = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      mean += fac.b[k][a] * w[nb[a]];
    const double r = w[graph.order[k]] - mean;
    quad += r * r / fac.f_corr[k];
  }
  const double shape = priors_[level].sigma2_shape + 0.5 * ws_.n_total(level);
  const double rate = priors_[level].sigma2_rate + 0.5 * quad;
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw NumericalError("update_sigma2: non-positive rate at level " +
                         std::to_string(level + 1));
  return {shape, rate};
}

void GibbsSampler::update_sigma2(int level) {
  const auto [shape, rate] = sigma2_conditional(level);
  const double s2 = streams_[level].inverse_gamma(shape, rate);
  params_[level].kernel.sigma2 = s2;
  factors_[level].rescale_sigma2(s2);
}

std::pair<double, double> GibbsSampler::tau2_conditional(int level) const {
  double ss = 0.0;
  const Vector& y = latent_.y_tilde[level];
  for (int u = 0; u < ws_.n_own(level); ++u) {
    const double r = z_[level][u] - y[u];
    ss += r * r;
  }
  return {priors_[level].tau2_shape + 0.5 * ws_.n_own(level),
          priors_[level].tau2_rate + 0.5 * ss};
}

void GibbsSampler::update_tau2(int level) {
  const auto [shape, rate] = tau2_conditional(level);
  params_[level].tau2 = streams_[level].inverse_gamma(shape, rate);
}

bool GibbsSampler::update_phi(int level, int iteration) {
  RngStream& rng = streams_[level];
  const Vector& phi = params_[level].kernel.phi;
  const Vector& upper = priors_[level].phi_upper;
  const int d = static_cast<int>(phi.size());

  Vector proposal(d);
  bool in_support = true;
  for (int j = 0; j < d; ++j) {
    proposal[j] = phi[j] * std::exp(mh_step_[level] * rng.normal());
    if (!(proposal[j] > 0.0) || proposal[j] >= upper[j]) in_support = false;
  }
  ++phi_proposals_[level];

  double alpha = 0.0;
  bool accepted = false;
  if (in_support) {
    KernelParams prop_kernel{params_[level].kernel.sigma2, proposal};
    NNGPFactors prop_factors = compute_factors(
        ws_.graphs[level], ws_.refsets[level].combined, prop_kernel);
    const double ll_cur = nngp_log_density(latent_.w_tilde[level],
                                           factors_[level], ws_.graphs[level]);
    const double ll_prop = nngp_log_density(latent_.w_tilde[level],
                                            prop_factors, ws_.graphs[level]);
    // Uniform prior cancels inside the support; the log-scale random walk
    // contributes the sum of log ratios as its Hastings correction.
    double log_r = ll_prop - ll_cur;
    for (int j = 0; j < d; ++j)
      log_r += std::log(proposal[j]) - std::log(phi[j]);
    alpha = std::min(1.0, std::exp(log_r));
    if (rng.uniform() < alpha) {
      params_[level].kernel.phi = proposal;
      factors_[level] = std::move(prop_factors);
      accepted = true;
      ++phi_accepts_[level];
    }
  }
  if (cfg_.adapt && iteration < cfg_.burn_in) {
    const double gain =
        1.0 / std::pow(static_cast<double>(iteration) + 1.0, 0.6);
    double log_step = std::log(mh_step_[level]) + gain * (alpha - 0.35);
    log_step = std::min(std::max(log_step, -8.0), 3.0);
    mh_step_[level] = std::exp(log_step);
  }
  return accepted;
}

double GibbsSampler::phi_acceptance(int level) const {
  return phi_proposals_[level] == 0
             ? 0.0
             : static_cast<double>(phi_accepts_[level]) /
                   static_cast<double>(phi_proposals_[level]);
}

void GibbsSampler::iterate(int iteration) {
  for (int t = 0; t < ws_.T; ++t) {
    if (t < ws_.T - 1) sweep_latent(t, Subset::kStarred);
    sweep_latent(t, Subset::kObserved);
  }
  if (!cfg_.update_params) return;
  for (int t = 0; t < ws_.T; ++t) {
    update_beta(t);
    if (t >= 1) update_gamma(t);
    update_tau2(t);
    update_sigma2(t);
    update_phi(t, iteration);
  }
}

ChainTrace run_chain(const Workspace& ws, const Priors& priors,
                     const SamplerConfig& config) {
  config.validate();
  GibbsSampler gs(ws, priors, config);

  ChainTrace trace;
  trace.n_retained = (config.n_iter - config.burn_in) / config.thin;
  trace.beta.resize(ws.T);
  trace.gamma.resize(ws.T);
  trace.sigma2.assign(ws.T, Vector(trace.n_retained));
  trace.tau2.assign(ws.T, Vector(trace.n_retained));
  trace.phi.resize(ws.T);
  trace.w_snapshots.resize(ws.T);
  trace.log_joint.resize(trace.n_retained);
  for (int t = 0; t < ws.T; ++t) {
    trace.beta[t].resize(trace.n_retained, gs.params()[t].beta.size());
    trace.gamma[t].resize(trace.n_retained, gs.params()[t].gamma.size());
    trace.phi[t].resize(trace.n_retained, ws.dim);
    if (config.record_w)
      trace.w_snapshots[t].resize(trace.n_retained, ws.n_total(t));
  }

  int kept = 0;
  for (int iter = 0; iter < config.n_iter; ++iter) {
    gs.iterate(iter);
    const bool retain = iter >= config.burn_in &&
                        (iter - config.burn_in + 1) % config.thin == 0 &&
                        kept < trace.n_retained;
    if (retain) {
      for (int t = 0; t < ws.T; ++t) {
        trace.beta[t].row(kept) = gs.params()[t].beta.transpose();
        if (gs.params()[t].gamma.size() > 0)
          trace.gamma[t].row(kept) = gs.params()[t].gamma.transpose();
        trace.sigma2[t][kept] = gs.params()[t].kernel.sigma2;
        trace.tau2[t][kept] = gs.params()[t].tau2;
        trace.phi[t].row(kept) = gs.params()[t].kernel.phi.transpose();
        if (config.record_w)
          trace.w_snapshots[t].row(kept) =
              gs.latent().w_tilde[t].transpose();
      }
      trace.log_joint[kept] = gs.current_log_joint();
      ++kept;
    }
    if (config.progress_every > 0 &&
        ((iter + 1) % config.progress_every == 0 ||
         iter + 1 == config.n_iter)) {
      std::fprintf(stderr, "[nncgp] iter=%d/%d log_joint=%.4f acc_phi=",
                   iter + 1, config.n_iter, gs.current_log_joint());
      for (int t = 0; t < ws.T; ++t)
        std::fprintf(stderr, "%s%.3f", t ? "," : "", gs.phi_acceptance(t));
      std::fprintf(stderr, "\n");
    }
  }
  trace.phi_accept_rate.resize(ws.T);
  trace.mh_step_final.resize(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    trace.phi_accept_rate[t] = gs.phi_acceptance(t);
    trace.mh_step_final[t] = gs.mh_step(t);
  }
  return trace;
}

}  // namespace nncgp
