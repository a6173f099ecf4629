// Acceptance suite: one scenario per criterion, one pass/fail line each.
// Exit code equals the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "nncgp/baselines.hpp"
#include "nncgp/metrics.hpp"
#include "nncgp/oracle.hpp"
#include "nncgp/predict.hpp"
#include "nncgp/synth.hpp"
#include "support/test_oracles.hpp"

using namespace nncgp;
namespace ts = testsupport;

namespace {

Matrix random_points(int n, int d, std::uint64_t seed) {
  RngStream rng(seed, 97);
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform();
  return pts;
}

LevelPriors section5_priors(int p_beta, int q_gamma, int d) {
  LevelPriors pr;
  pr.beta_mean = Vector::Zero(p_beta);
  pr.beta_var = Vector::Constant(p_beta, 1e4);
  pr.gamma_mean = Vector::Zero(q_gamma);
  pr.gamma_var = Vector::Constant(q_gamma, 1e4);
  pr.sigma2_shape = 2.0;
  pr.sigma2_rate = 1.0;
  pr.tau2_shape = 2.0;
  pr.tau2_rate = 1.0;
  pr.phi_upper = Vector::Constant(d, 100.0);
  return pr;
}

std::vector<LevelParams> table1_truth() {
  LevelParams t1, t2;
  t1.beta = Vector::Constant(1, 10.0);
  t1.kernel.sigma2 = 4.0;
  t1.kernel.phi = Vector::Constant(2, 0.1);  // 1/phi = 10
  t1.tau2 = 0.1;
  t2.beta = Vector::Constant(1, 1.0);
  t2.gamma = Vector::Constant(1, 1.0);
  t2.kernel.sigma2 = 1.0;
  t2.kernel.phi = Vector::Constant(2, 0.1);
  t2.tau2 = 0.05;
  return {t1, t2};
}

ChainTrace constant_param_trace(const Workspace& ws,
                                const std::vector<LevelParams>& params,
                                std::vector<Matrix> w_rows) {
  ChainTrace trace;
  trace.n_retained = static_cast<int>(w_rows[0].rows());
  trace.beta.resize(ws.T);
  trace.gamma.resize(ws.T);
  trace.sigma2.resize(ws.T);
  trace.tau2.resize(ws.T);
  trace.phi.resize(ws.T);
  trace.w_snapshots = std::move(w_rows);
  for (int t = 0; t < ws.T; ++t) {
    trace.beta[t] = params[t].beta.transpose().replicate(trace.n_retained, 1);
    trace.gamma[t] =
        params[t].gamma.size() > 0
            ? Matrix(params[t].gamma.transpose().replicate(trace.n_retained,
                                                           1))
            : Matrix(trace.n_retained, 0);
    trace.sigma2[t] =
        Vector::Constant(trace.n_retained, params[t].kernel.sigma2);
    trace.tau2[t] = Vector::Constant(trace.n_retained, params[t].tau2);
    trace.phi[t] =
        params[t].kernel.phi.transpose().replicate(trace.n_retained, 1);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Criterion 1: factorized log density is exact at full conditioning.
bool criterion_exactness(std::string& detail) {
  bool ok = true;
  std::ostringstream msg;
  RngStream rng(8101, 0);
  for (int n : {20, 50, 200}) {
    const Matrix locs = random_points(n, 2, 600 + n);
    KernelParams kernel;
    kernel.sigma2 = rng.uniform(0.5, 5.0);
    kernel.phi = Vector(2);
    kernel.phi << rng.uniform(0.05, 0.8), rng.uniform(0.05, 0.8);
    const auto graph = build_neighbor_graph(locs, n - 1);
    const auto factors = compute_factors(graph, locs, kernel);
    Vector w(n);
    for (int i = 0; i < n; ++i)
      w[i] = rng.normal(0.0, std::sqrt(kernel.sigma2));
    const double approx = nngp_log_density(w, factors, graph);
    const Matrix C = ts::dense_cov(locs, locs, kernel.sigma2, kernel.phi);
    const double exact = ts::dense_mvn_logpdf(w, Vector::Zero(n), C);
    const double rel = std::abs(approx - exact) / std::abs(exact);
    msg << "n=" << n << " rel_err=" << rel << "  ";
    ok = ok && rel <= 1e-8;
  }
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: sparsity of the implied precision. The 1/2 n m (m+1) bound
// counts off-diagonal couplings (the diagonal alone already exceeds it at
// m = 1), so the diagonal entries reported by sparse_precision_nnz are
// removed before the comparison.
bool criterion_sparsity(std::string& detail) {
  bool ok = true;
  std::ostringstream msg;
  const int n = 100;
  const Matrix locs = random_points(n, 2, 777);
  KernelParams kernel{1.0, Vector::Constant(2, 0.3)};
  for (int m : {1, 5, 10}) {
    const auto graph = build_neighbor_graph(locs, m);
    const auto factors = compute_factors(graph, locs, kernel);
    const std::int64_t nnz = sparse_precision_nnz(factors, graph);
    const std::int64_t offdiag = nnz - n;
    const std::int64_t bound = n * m * (m + 1) / 2;
    msg << "m=" << m << " offdiag_nnz=" << offdiag << "<=" << bound << "  ";
    ok = ok && offdiag <= bound;
  }
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: conjugate updates reproduce their closed-form conditionals.
bool criterion_conjugate(std::string& detail) {
  std::ostringstream msg;
  bool ok = true;
  const int draws = 100000;

  Matrix s1(6, 2), s2(4, 2);
  s1 << 0.1, 0.1, 0.6, 0.2, 0.3, 0.7, 0.8, 0.8, 0.2, 0.4, 0.9, 0.3;
  s2 << 0.15, 0.55, 0.7, 0.6, 0.4, 0.15, 0.85, 0.45;
  FidelityDataset d1, d2;
  d1.level = 1;
  d1.locations = s1;
  d2.level = 2;
  d2.locations = s2;
  RngStream data_rng(31337, 0);
  d1.values = Vector(6);
  d2.values = Vector(4);
  for (int i = 0; i < 6; ++i) d1.values[i] = data_rng.normal(10.0, 2.0);
  for (int i = 0; i < 4; ++i) d2.values[i] = data_rng.normal(11.0, 1.5);
  auto ws = build_workspace({d1, d2}, 3,
                            BasisConfig::uniform(2, BasisKind::kConstant,
                                                 BasisKind::kConstant));
  Priors priors{section5_priors(1, 0, 2), section5_priors(1, 1, 2)};
  priors[0].beta_var.setConstant(25.0);
  priors[1].gamma_mean.setConstant(0.5);
  priors[1].gamma_var.setConstant(4.0);
  priors[0].sigma2_shape = 5.0;  // keep fourth moments finite for the SEs
  priors[0].sigma2_rate = 4.0;
  priors[0].tau2_shape = 5.0;
  priors[0].tau2_rate = 2.0;

  SamplerConfig cfg;
  cfg.n_iter = 10;
  cfg.burn_in = 1;
  cfg.seed = 424242;
  GibbsSampler gs(ws, priors, cfg);
  // Non-trivial fixed state.
  for (int t = 0; t < 2; ++t) gs.sweep_latent(
      t, GibbsSampler::Subset::kAll);

  auto check_gaussian = [&](const char* name,
                            const GibbsSampler::GaussianMoments& m,
                            std::function<double()> draw_fn) {
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < draws; ++r) {
      const double v = draw_fn();
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    const double se_mean = std::sqrt(m.cov(0, 0) / draws);
    const double se_var = m.cov(0, 0) * std::sqrt(2.0 / (draws - 1));
    const bool pass = std::abs(mean - m.mean[0]) <= 3.0 * se_mean &&
                      std::abs(var - m.cov(0, 0)) <= 3.0 * se_var;
    msg << name << (pass ? " ok" : " FAIL") << "  ";
    ok = ok && pass;
  };

  // beta at the top level: the printed own-level form is the exact
  // conditional there; the draw should match it.
  {
    const auto m = gs.beta_conditional(1);
    check_gaussian("beta", m, [&]() {
      gs.update_beta(1);
      return gs.params()[1].beta[0];
    });
    // update_beta mutates beta but its conditional is beta-free; restore
    // the composed state for the next blocks.
  }
  {
    const auto m = gs.gamma_conditional(1);
    check_gaussian("gamma", m, [&]() {
      gs.update_gamma(1);
      return gs.params()[1].gamma[0];
    });
  }
  {
    const auto [shape, rate] = gs.sigma2_conditional(0);
    const double mean_true = rate / (shape - 1.0);
    const double var_true =
        rate * rate / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
    // Standard error of the sample variance from the fourth central
    // moment of the inverse gamma.
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> sample(draws);
    for (int r = 0; r < draws; ++r) {
      gs.update_sigma2(0);
      sample[r] = gs.params()[0].kernel.sigma2;
      sum += sample[r];
      sumsq += sample[r] * sample[r];
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    double mu4 = 0.0;
    for (double v : sample) mu4 += std::pow(v - mean, 4.0);
    mu4 /= draws;
    const double se_mean = std::sqrt(var_true / draws);
    const double se_var = std::sqrt(
        std::max(mu4 - var_true * var_true, 0.0) / draws);
    const bool pass = std::abs(mean - mean_true) <= 3.0 * se_mean &&
                      std::abs(var - var_true) <= 3.0 * se_var;
    msg << "sigma2" << (pass ? " ok" : " FAIL") << "  ";
    ok = ok && pass;
  }
  {
    const auto [shape, rate] = gs.tau2_conditional(0);
    const double mean_true = rate / (shape - 1.0);
    const double var_true =
        rate * rate / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0));
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> sample(draws);
    for (int r = 0; r < draws; ++r) {
      gs.update_tau2(0);
      sample[r] = gs.params()[0].tau2;
      sum += sample[r];
      sumsq += sample[r] * sample[r];
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    double mu4 = 0.0;
    for (double v : sample) mu4 += std::pow(v - mean, 4.0);
    mu4 /= draws;
    const double se_mean = std::sqrt(var_true / draws);
    const double se_var = std::sqrt(
        std::max(mu4 - var_true * var_true, 0.0) / draws);
    const bool pass = std::abs(mean - mean_true) <= 3.0 * se_mean &&
                      std::abs(var - var_true) <= 3.0 * se_var;
    msg << "tau2" << (pass ? " ok" : " FAIL") << "  ";
    ok = ok && pass;
  }
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: Geweke-style joint validation. Forward draws of
// (params, w, z) from the prior versus successive-conditional simulation
// through the full sampler; probes compared by two-sample KS at 1%.
bool criterion_geweke(std::string& detail) {
  const int n_samples = 5000;
  const int thin = 10;

  Matrix s1 = random_points(15, 2, 9001);
  Matrix s2 = random_points(15, 2, 9002);
  FidelityDataset d1, d2;
  d1.level = 1;
  d1.locations = s1;
  d1.values = Vector::Zero(15);
  d2.level = 2;
  d2.locations = s2;
  d2.values = Vector::Zero(15);
  auto ws = build_workspace({d1, d2}, 5,
                            BasisConfig::uniform(2, BasisKind::kConstant,
                                                 BasisKind::kConstant));

  Priors priors(2);
  for (int t = 0; t < 2; ++t) {
    priors[t].beta_mean = Vector::Zero(1);
    priors[t].beta_var = Vector::Constant(1, 1.0);
    priors[t].sigma2_shape = 3.0;
    priors[t].sigma2_rate = 2.0;
    priors[t].tau2_shape = 3.0;
    priors[t].tau2_rate = 0.6;
    priors[t].phi_upper = Vector::Constant(2, 1.5);
  }
  priors[1].gamma_mean = Vector::Constant(1, 0.5);
  priors[1].gamma_var = Vector::Constant(1, 0.25);

  auto prior_draw = [&](RngStream& rng) {
    std::vector<LevelParams> params(2);
    for (int t = 0; t < 2; ++t) {
      params[t].beta = Vector::Constant(1, rng.normal(0.0, 1.0));
      if (t == 1)
        params[t].gamma = Vector::Constant(1, rng.normal(0.5, 0.5));
      params[t].kernel.sigma2 = rng.inverse_gamma(3.0, 2.0);
      params[t].tau2 = rng.inverse_gamma(3.0, 0.6);
      params[t].kernel.phi = Vector(2);
      for (int j = 0; j < 2; ++j)
        params[t].kernel.phi[j] = rng.uniform(0.0, 1.5);
    }
    return params;
  };

  struct Probes {
    std::vector<double> sigma2_1, tau2_1, mean_w1, gamma;
  };
  Probes fwd, sc;

  // Forward samples are independent draws from the prior model.
  {
    RngStream rng(777001, 0);
    for (int s = 0; s < n_samples; ++s) {
      const auto params = prior_draw(rng);
      LatentState state;
      state.w_tilde.resize(2);
      for (int t = 0; t < 2; ++t) {
        const auto factors = compute_factors(
            ws.graphs[t], ws.refsets[t].combined, params[t].kernel);
        state.w_tilde[t] = sample_nngp(factors, ws.graphs[t], rng);
      }
      fwd.sigma2_1.push_back(params[0].kernel.sigma2);
      fwd.tau2_1.push_back(params[0].tau2);
      fwd.mean_w1.push_back(state.w_tilde[0].head(15).mean());
      fwd.gamma.push_back(params[1].gamma[0]);
    }
  }

  // Successive-conditional chain: full sampler scan, then redraw z | state.
  {
    SamplerConfig cfg;
    cfg.n_iter = 10;
    cfg.burn_in = 1;
    cfg.adapt = false;  // adaptation would break kernel stationarity here
    cfg.mh_step = 0.7;
    cfg.seed = 777002;
    cfg.update_rule = UpdateRule::kExact;
    GibbsSampler gs(ws, priors, cfg);
    RngStream rng(777003, 0);
    // Initialize from a forward draw.
    {
      const auto params = prior_draw(rng);
      LatentState state;
      state.w_tilde.resize(2);
      for (int t = 0; t < 2; ++t) {
        const auto factors = compute_factors(
            ws.graphs[t], ws.refsets[t].combined, params[t].kernel);
        state.w_tilde[t] = sample_nngp(factors, ws.graphs[t], rng);
      }
      gs.set_state(params, state);
      for (int t = 0; t < 2; ++t) {
        Vector z(15);
        for (int i = 0; i < 15; ++i)
          z[i] = gs.latent().y_tilde[t][i] +
                 std::sqrt(gs.params()[t].tau2) * rng.normal();
        gs.set_observations(t, z);
      }
    }
    const int total_scans = n_samples * thin;
    for (int scan = 0; scan < total_scans; ++scan) {
      gs.iterate(/*iteration=*/cfg.burn_in + 1);  // adaptation frozen
      for (int t = 0; t < 2; ++t) {
        Vector z(15);
        for (int i = 0; i < 15; ++i)
          z[i] = gs.latent().y_tilde[t][i] +
                 std::sqrt(gs.params()[t].tau2) * rng.normal();
        gs.set_observations(t, z);
      }
      if ((scan + 1) % thin == 0) {
        sc.sigma2_1.push_back(gs.params()[0].kernel.sigma2);
        sc.tau2_1.push_back(gs.params()[0].tau2);
        sc.mean_w1.push_back(gs.latent().w_tilde[0].head(15).mean());
        sc.gamma.push_back(gs.params()[1].gamma[0]);
      }
    }
  }

  std::ostringstream msg;
  bool ok = true;
  auto ks_check = [&](const char* name, const std::vector<double>& a,
                      const std::vector<double>& b) {
    const double d = ts::ks_statistic(a, b);
    const double p = ts::ks_pvalue(d, a.size(), b.size());
    msg << name << " p=" << p << (p > 0.01 ? "" : " FAIL") << "  ";
    ok = ok && p > 0.01;
  };
  ks_check("sigma2_1", fwd.sigma2_1, sc.sigma2_1);
  ks_check("tau2_1", fwd.tau2_1, sc.tau2_1);
  ks_check("mean_w1", fwd.mean_w1, sc.mean_w1);
  ks_check("gamma", fwd.gamma, sc.gamma);
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: the phi Metropolis step targets the right density.
bool criterion_mh_target(std::string& detail) {
  const int n = 10;
  Matrix locs(n, 1);
  RngStream setup(4242, 0);
  for (int i = 0; i < n; ++i) locs(i, 0) = setup.uniform();
  FidelityDataset ds;
  ds.level = 1;
  ds.locations = locs;
  ds.values = Vector::Zero(n);
  auto ws = build_workspace({ds}, 3,
                            BasisConfig::uniform(1, BasisKind::kConstant,
                                                 BasisKind::kConstant));
  Priors priors(1);
  priors[0].beta_mean = Vector::Zero(1);
  priors[0].beta_var = Vector::Constant(1, 1.0);
  priors[0].phi_upper = Vector::Constant(1, 2.0);

  // Fixed latent field drawn once at phi = 0.3.
  Vector w;
  {
    KernelParams true_kernel{1.0, Vector::Constant(1, 0.3)};
    const auto factors = compute_factors(ws.graphs[0],
                                         ws.refsets[0].combined, true_kernel);
    w = sample_nngp(factors, ws.graphs[0], setup);
  }

  // Quadrature of the target over (0, 2): p(phi | w) up to a constant.
  const int grid_size = 4001;
  const double upper = 2.0;
  auto log_target = [&](double phi) {
    KernelParams kernel{1.0, Vector::Constant(1, phi)};
    const auto factors = compute_factors(ws.graphs[0],
                                         ws.refsets[0].combined, kernel);
    return nngp_log_density(w, factors, ws.graphs[0]);
  };
  std::vector<double> grid(grid_size), density(grid_size);
  double max_log = -1e300;
  for (int i = 0; i < grid_size; ++i) {
    grid[i] = upper * (i + 0.5) / grid_size;
    density[i] = log_target(grid[i]);
    max_log = std::max(max_log, density[i]);
  }
  double total = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    density[i] = std::exp(density[i] - max_log);
    total += density[i];
  }
  const int bins = 20;
  std::vector<double> bin_prob(bins, 0.0);
  for (int i = 0; i < grid_size; ++i) {
    const int b = std::min(bins - 1,
                           static_cast<int>(grid[i] / upper * bins));
    bin_prob[b] += density[i] / total;
  }

  // Chain: repeated update_phi on the fixed w (thinned for the bands).
  SamplerConfig cfg;
  cfg.n_iter = 10;
  cfg.burn_in = 1;
  cfg.adapt = false;
  cfg.mh_step = 0.8;
  cfg.seed = 515151;
  GibbsSampler gs(ws, priors, cfg);
  auto params = gs.params();
  params[0].kernel.sigma2 = 1.0;
  params[0].kernel.phi = Vector::Constant(1, 0.3);
  LatentState latent = gs.latent();
  latent.w_tilde[0] = w;
  gs.set_state(params, latent);

  const int burn = 2000, kept = 20000, thin = 25;
  for (int i = 0; i < burn; ++i) gs.update_phi(0, cfg.burn_in + 1);
  std::vector<int> counts(bins, 0);
  for (int k = 0; k < kept; ++k) {
    for (int s = 0; s < thin; ++s) gs.update_phi(0, cfg.burn_in + 1);
    const double phi = gs.params()[0].kernel.phi[0];
    const int b = std::min(bins - 1,
                           static_cast<int>(phi / upper * bins));
    ++counts[b];
  }

  std::ostringstream msg;
  bool ok = true;
  double worst_z = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double expect = kept * bin_prob[b];
    const double sd = std::sqrt(kept * bin_prob[b] * (1.0 - bin_prob[b]));
    if (sd < 1e-9) {
      if (counts[b] != 0 && expect < 1.0) ok = false;
      continue;
    }
    const double zscore = std::abs(counts[b] - expect) / sd;
    worst_z = std::max(worst_z, zscore);
    if (zscore > 3.0) ok = false;
  }
  msg << "bins=" << bins << " worst |z|=" << worst_z;
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: chain-based prediction equals dense conditioning at fixed
// true parameters and full neighbor sets.
bool criterion_oracle_prediction(std::string& detail) {
  const auto truth = table1_truth();
  // 40 training sites per level plus 5 held-out level-2 targets.
  SynthConfig sc;
  sc.T = 2;
  sc.n = {40, 45};
  sc.truth = truth;
  sc.basis = BasisConfig::uniform(2, BasisKind::kConstant,
                                  BasisKind::kConstant);
  sc.bbox.lo = Vector::Zero(2);
  sc.bbox.hi = Vector::Ones(2);
  sc.holdout_level = 2;
  sc.seed = 606060;
  const auto sim = simulate(sc);

  FidelityDataset train2 = sim.train[1];
  FidelityDataset test;
  test.level = 2;
  test.locations = train2.locations.bottomRows(5);
  test.values = train2.values.tail(5);
  train2.locations.conservativeResize(40, 2);
  train2.values.conservativeResize(40);

  auto ws = build_workspace({sim.train[0], train2}, /*m=*/84,
                            BasisConfig::uniform(2, BasisKind::kConstant,
                                                 BasisKind::kConstant));
  Priors priors{section5_priors(1, 0, 2), section5_priors(1, 1, 2)};

  // Latent chain at fixed true parameters.
  SamplerConfig cfg;
  cfg.n_iter = 10;
  cfg.burn_in = 1;
  cfg.seed = 616161;
  cfg.update_params = false;
  GibbsSampler gs(ws, priors, cfg);
  gs.set_state(truth, gs.latent());
  const int burn = 300, n_draws = 1200, thin = 3;
  for (int i = 0; i < burn; ++i) {
    gs.sweep_latent(0, GibbsSampler::Subset::kStarred);
    gs.sweep_latent(0, GibbsSampler::Subset::kObserved);
    gs.sweep_latent(1, GibbsSampler::Subset::kObserved);
  }
  std::vector<Matrix> w_rows = {Matrix(n_draws, ws.n_total(0)),
                                Matrix(n_draws, ws.n_total(1))};
  for (int r = 0; r < n_draws; ++r) {
    for (int s = 0; s < thin; ++s) {
      gs.sweep_latent(0, GibbsSampler::Subset::kStarred);
      gs.sweep_latent(0, GibbsSampler::Subset::kObserved);
      gs.sweep_latent(1, GibbsSampler::Subset::kObserved);
    }
    w_rows[0].row(r) = gs.latent().w_tilde[0].transpose();
    w_rows[1].row(r) = gs.latent().w_tilde[1].transpose();
  }
  const auto trace = constant_param_trace(ws, truth, std::move(w_rows));

  PredictionRequest req;
  req.targets = test.locations;
  req.level = 2;
  const auto pred = predict(ws, trace, req, 626262);

  // Batch means over sub-traces for the Monte Carlo standard error.
  const int batches = 10, per_batch = n_draws / batches;
  Matrix batch_means(batches, 5);
  for (int b = 0; b < batches; ++b) {
    std::vector<Matrix> rows = {
        trace.w_snapshots[0].middleRows(b * per_batch, per_batch),
        trace.w_snapshots[1].middleRows(b * per_batch, per_batch)};
    const auto sub = constant_param_trace(ws, truth, std::move(rows));
    batch_means.row(b) = predict(ws, sub, req, 636363 + b).mean.transpose();
  }

  // Dense predictive mean: condition the stacked joint on all 80 training
  // observations; targets are the trailing level-2 entries.
  FidelityDataset level2_all;
  level2_all.level = 2;
  level2_all.locations.resize(45, 2);
  level2_all.locations.topRows(40) = train2.locations;
  level2_all.locations.bottomRows(5) = test.locations;
  level2_all.values.resize(45);
  level2_all.values.head(40) = train2.values;
  level2_all.values.tail(5) = test.values;
  const auto joint = dense_marginal_cov({sim.train[0], level2_all}, truth,
                                        ws.basis);
  std::vector<int> observed(80);
  std::iota(observed.begin(), observed.begin() + 40, 0);
  std::iota(observed.begin() + 40, observed.end(), 40);
  Vector z_obs(80);
  z_obs.head(40) = sim.train[0].values;
  z_obs.segment(40, 40) = train2.values;
  std::vector<int> targets(5);
  std::iota(targets.begin(), targets.end(), 80);
  const auto [dense_mean, dense_cov] =
      dense_conditional(joint, observed, z_obs, targets);

  std::ostringstream msg;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    double bm = batch_means.col(i).mean();
    double bv = (batch_means.col(i).array() - bm).square().sum() /
                (batches - 1);
    const double se = std::sqrt(bv / batches);
    const double diff = std::abs(pred.mean[i] - dense_mean[i]);
    msg << "|d" << i << "|=" << diff << "/se=" << se << "  ";
    if (diff > 3.0 * se) ok = false;
  }
  detail = msg.str();
  return ok;
}

// ---------------------------------------------------------------------------
// Criteria 7 and 8 share the desk-scale study.
struct DeskScaleRun {
  EvalReport nncgp, single, combined;
  bool ci_beta1 = false, ci_gamma1 = false, ci_tau21 = false;
};

SynthOutput desk_scale_data(std::uint64_t seed) {
  SynthConfig sc;
  sc.T = 2;
  sc.n = {500, 500};
  sc.truth = table1_truth();
  sc.basis = BasisConfig::uniform(2, BasisKind::kConstant,
                                  BasisKind::kConstant);
  sc.bbox.lo = Vector::Zero(2);
  sc.bbox.hi = Vector::Ones(2);
  sc.holdout_level = 2;
  sc.holdouts.push_back({Vector::Constant(2, 0.20),
                         Vector::Constant(2, 0.45)});
  sc.holdouts.push_back({Vector::Constant(2, 0.60),
                         Vector::Constant(2, 0.85)});
  sc.seed = seed;
  return simulate(sc);
}

SamplerConfig desk_scale_sampler(std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.n_iter = 5000;
  cfg.burn_in = 1000;
  cfg.thin = 4;
  cfg.seed = seed;
  cfg.mh_step = 0.5;
  return cfg;
}

EvalReport score(const Workspace& ws, const ChainTrace& trace,
                 const FidelityDataset& test, int level,
                 std::uint64_t pred_seed) {
  PredictionRequest req;
  req.targets = test.locations;
  req.level = level;
  const auto pred = predict(ws, trace, req, pred_seed);
  EvalReport report;
  report.n_test = test.size();
  report.rmspe = rmspe(pred.mean, test.values);
  report.nsme = nsme(pred.mean, test.values);
  const auto [cvg, alci] = interval_metrics(pred.quantiles.col(0),
                                            pred.quantiles.col(1),
                                            test.values);
  report.cvg95 = cvg;
  report.alci95 = alci;
  return report;
}

bool ci_covers(const Vector& draws_sorted_src, double truth) {
  std::vector<double> draws(draws_sorted_src.data(),
                            draws_sorted_src.data() +
                            draws_sorted_src.size());
  std::sort(draws.begin(), draws.end());
  const double lo = draws[static_cast<std::size_t>(0.025 * draws.size())];
  const double hi = draws[static_cast<std::size_t>(0.975 *
                                                   (draws.size() - 1))];
  return lo <= truth && truth <= hi;
}

DeskScaleRun run_desk_scale(std::uint64_t seed, int m) {
  const auto sim = desk_scale_data(seed);
  DeskScaleRun out;

  Priors priors{section5_priors(1, 0, 2), section5_priors(1, 1, 2)};
  auto ws = build_workspace(sim.train, m,
                            BasisConfig::uniform(2, BasisKind::kConstant,
                                                 BasisKind::kConstant));
  const auto trace = run_chain(ws, priors, desk_scale_sampler(seed));
  out.nncgp = score(ws, trace, sim.test, 2, seed * 13 + 1);
  out.ci_beta1 = ci_covers(trace.beta[0].col(0), 10.0);
  out.ci_gamma1 = ci_covers(trace.gamma[1].col(0), 1.0);
  out.ci_tau21 = ci_covers(trace.tau2[0], 0.1);

  const auto single = fit_single_level(sim.train[1], priors[0],
                                       desk_scale_sampler(seed + 7), m);
  out.single = score(single.ws, single.trace, sim.test, 1, seed * 13 + 2);

  const auto combined = fit_combined(sim.train, priors[0],
                                     desk_scale_sampler(seed + 11), m);
  out.combined = score(combined.ws, combined.trace, sim.test, 1,
                       seed * 13 + 3);
  return out;
}

std::vector<DeskScaleRun> g_desk_runs;  // criterion 7 results reused by 8
std::vector<std::uint64_t> g_desk_seeds = {101, 102, 103};

bool criterion_desk_scale(std::string& detail) {
  std::ostringstream msg;
  int pass_a = 0, pass_b = 0, pass_c = 0;
  for (std::uint64_t seed : g_desk_seeds) {
    const auto run = run_desk_scale(seed, 10);
    g_desk_runs.push_back(run);
    const bool a = run.nncgp.rmspe <= 0.8 * run.single.rmspe &&
                   run.nncgp.rmspe <= 0.95 * run.combined.rmspe;
    const bool b = run.nncgp.cvg95 >= 0.88 && run.nncgp.cvg95 <= 0.99;
    const bool c = run.ci_beta1 && run.ci_gamma1 && run.ci_tau21;
    pass_a += a;
    pass_b += b;
    pass_c += c;
    msg << "seed " << seed << ": rmspe " << run.nncgp.rmspe << "/"
        << run.single.rmspe << "/" << run.combined.rmspe << " cvg "
        << run.nncgp.cvg95 << " ci[" << run.ci_beta1 << run.ci_gamma1
        << run.ci_tau21 << "]  ";
  }
  msg << "(a:" << pass_a << "/3, b:" << pass_b << "/3, c:" << pass_c
      << "/3)";
  detail = msg.str();
  return pass_a >= 2 && pass_b >= 2 && pass_c >= 2;
}

bool criterion_m_sensitivity(std::string& detail) {
  const std::uint64_t seed = g_desk_seeds[0];
  const auto sim = desk_scale_data(seed);
  Priors priors{section5_priors(1, 0, 2), section5_priors(1, 1, 2)};

  auto rmspe_at = [&](int m) {
    auto ws = build_workspace(sim.train, m,
                              BasisConfig::uniform(2, BasisKind::kConstant,
                                                   BasisKind::kConstant));
    const auto trace = run_chain(ws, priors, desk_scale_sampler(seed));
    return score(ws, trace, sim.test, 2, seed * 17 + m).rmspe;
  };

  const double at10 = g_desk_runs.empty() ? rmspe_at(10)
                                          : g_desk_runs[0].nncgp.rmspe;
  const double at2 = rmspe_at(2);
  const double at15 = rmspe_at(15);
  const double at20 = rmspe_at(20);
  std::ostringstream msg;
  msg << "rmspe m2=" << at2 << " m10=" << at10 << " m15=" << at15
      << " m20=" << at20;
  detail = msg.str();
  return at10 <= at2 && at15 <= 1.05 * at10 && at20 <= 1.05 * at15;
}

// ---------------------------------------------------------------------------
// Criterion 9: the stated metric identities.
bool criterion_metrics(std::string& detail) {
  bool ok = true;
  std::ostringstream msg;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      msg << what << " FAIL  ";
    }
  };
  Vector a(2), b(2);
  a << 2, 4;
  b << 1, 2;
  expect(rmspe(a, a) == 0.0, "rmspe-zero");
  expect(std::abs(rmspe(a, b) - 1.5811388300841898) < 1e-12, "rmspe-value");
  Vector obs(4);
  obs << 1, 2, 3, 4;
  expect(std::abs(nsme(obs, obs) - 1.0) < 1e-15, "nsme-perfect");
  expect(std::abs(nsme(Vector::Constant(4, 2.5), obs)) < 1e-14,
         "nsme-mean");
  {
    Vector lo(3), hi(3), o(3);
    lo << 0, 0, 0;
    hi << 5, 5, 5;
    o << 1, 2, 3;
    const auto [cvg, alci] = interval_metrics(lo, hi, o);
    expect(cvg == 1.0, "cvg-all-inside");
    const auto [cvg2, alci2] = interval_metrics(o, o, o);
    expect(cvg2 == 1.0 && alci2 == 0.0, "cvg-degenerate");
    (void)alci;
  }
  {
    // Single-draw DIC: pd = 0, dic = D.
    FidelityDataset ds;
    ds.level = 1;
    ds.locations.resize(1, 2);
    ds.locations << 0.5, 0.5;
    ds.values = Vector::Constant(1, 1.0);
    auto ws = build_workspace({ds}, 1,
                              BasisConfig::uniform(1, BasisKind::kConstant,
                                                   BasisKind::kConstant));
    std::vector<LevelParams> params(1);
    params[0].beta = Vector::Zero(1);
    params[0].kernel = {1.0, Vector::Constant(2, 0.5)};
    params[0].tau2 = 0.5;
    Matrix w(1, 1);
    w << 0.2;
    const auto trace = constant_param_trace(ws, params, {w});
    const auto [pd, dic_value] = dic(trace, ws);
    const double dev =
        -2.0 * (-0.5 * (std::log(2.0 * M_PI * 0.5) + 0.8 * 0.8 / 0.5));
    expect(std::abs(pd) < 1e-12, "dic-pd-zero");
    expect(std::abs(dic_value - dev) < 1e-12, "dic-single");
  }
  detail = ok ? "all metric identities hold" : msg.str();
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  std::vector<Criterion> criteria = {
      {1, "NNGP exactness at full conditioning", criterion_exactness},
      {2, "sparse precision bound", criterion_sparsity},
      {3, "conjugate conditional correctness", criterion_conjugate},
      {4, "Geweke joint validation", criterion_geweke},
      {5, "Metropolis target correctness", criterion_mh_target},
      {6, "dense-oracle prediction equivalence", criterion_oracle_prediction},
      {7, "desk-scale multi-fidelity study", criterion_desk_scale},
      {8, "neighbor-count sensitivity", criterion_m_sensitivity},
      {9, "metric identities", criterion_metrics},
  };

  int failures = 0;
  for (auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start).count();
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n",
                ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
