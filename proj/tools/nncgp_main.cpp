/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */

// Command line front end: simulate | fit | predict | evaluate |
// oracle-check. Exit codes: 0 success, 1 user error, 2 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "nncgp/baselines.hpp"
#include "nncgp/io.hpp"
#include "nncgp/oracle.hpp"
#include "nncgp/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace nncgp;

constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

// Keys understood across subcommands; anything else in a config file is
// reported as an error naming the key.
const std::set<std::string> kKnownKeys = {
    "data.m", "data.jitter_duplicates", "data.test",
    "data.dim",
    "basis.trend", "basis.scale",
    "sampler.n_iter", "sampler.burn_in", "sampler.thin", "sampler.mh_step",
    "sampler.adapt", "sampler.seed", "sampler.progress_every",
    "sampler.update_rule",
    "priors.beta_mean", "priors.beta_var", "priors.gamma_mean",
    "priors.gamma_var", "priors.sigma2_shape", "priors.sigma2_rate",
    "priors.tau2_shape", "priors.tau2_rate", "priors.phi_upper",
    "synth.T", "synth.seed", "synth.bbox", "synth.holdout_level",
    "synth.holdout_boxes", "synth.dense_cap", "synth.sequential",
    "predict.level", "predict.targets", "predict.grid",
    "predict.quantiles", "predict.seed",
    "out.dir",
};

bool known_key(const std::string& key) {
  if (kKnownKeys.count(key)) return true;
  // Per-level families: data.train.N, synth.n.N, truth.*.N, basis.*.N.
  const auto last_dot = key.rfind('.');
  if (last_dot == std::string::npos) return false;
  const std::string stem = key.substr(0, last_dot);
  const std::string leaf = key.substr(last_dot + 1);
  const bool numeric = !leaf.empty() &&
                       leaf.find_first_not_of("0123456789") ==
                           std::string::npos;
  if (!numeric) return false;
  static const std::set<std::string> families = {
      "data.train", "synth.n", "truth.beta", "truth.gamma", "truth.sigma2",
      "truth.phi", "truth.tau2", "basis.trend", "basis.scale",
  };
  return families.count(stem) > 0;
}

void validate_keys(const Config& cfg) {
  for (const auto& [key, value] : cfg.entries())
    if (!known_key(key))
      throw InvalidInput("config: unknown key '" + key + "'");
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

BasisKind parse_basis(const std::string& name, const std::string& key) {
  if (name == "constant") return BasisKind::kConstant;
  if (name == "linear") return BasisKind::kConstantLinear;
  throw InvalidInput("config key '" + key + "': expected 'constant' or "
                     "'linear'");
}

int level_count(const Config& cfg, const std::string& family) {
  int T = 0;
  while (cfg.has(family + "." + std::to_string(T + 1))) ++T;
  return T;
}

SynthConfig parse_synth(const Config& cfg) {
  SynthConfig sc;
  sc.T = static_cast<int>(cfg.get_long("synth.T"));
  if (sc.T < 1) throw InvalidInput("config key 'synth.T': must be >= 1");
  const auto bbox = cfg.get_doubles("synth.bbox");
  if (bbox.size() % 2 != 0 || bbox.empty())
    throw InvalidInput("config key 'synth.bbox': expected lo..,hi.. pairs");
  const int d = static_cast<int>(bbox.size()) / 2;
  sc.bbox.lo = to_vector({bbox.begin(), bbox.begin() + d});
  sc.bbox.hi = to_vector({bbox.begin() + d, bbox.end()});
  sc.basis.trend.resize(sc.T);
  sc.basis.scale.resize(sc.T);
  for (int t = 1; t <= sc.T; ++t) {
    const std::string suffix = "." + std::to_string(t);
    sc.n.push_back(static_cast<int>(cfg.get_long("synth.n" + suffix)));
    LevelParams p;
    p.beta = to_vector(cfg.get_doubles("truth.beta" + suffix));
    if (t >= 2) p.gamma = to_vector(cfg.get_doubles("truth.gamma" + suffix));
    p.kernel.sigma2 = cfg.get_double("truth.sigma2" + suffix);
    p.kernel.phi = to_vector(cfg.get_doubles("truth.phi" + suffix));
    if (p.kernel.phi.size() == 1)
      p.kernel.phi = Vector::Constant(d, p.kernel.phi[0]);
    p.tau2 = cfg.get_double("truth.tau2" + suffix);
    sc.truth.push_back(std::move(p));
    sc.basis.trend[t - 1] = parse_basis(
        cfg.get_string("basis.trend" + suffix,
                       cfg.get_string("basis.trend", "constant")),
        "basis.trend");
    sc.basis.scale[t - 1] = parse_basis(
        cfg.get_string("basis.scale" + suffix,
                       cfg.get_string("basis.scale", "constant")),
        "basis.scale");
    const int expected_beta = basis_size(sc.basis.trend[t - 1], d);
    if (p.beta.size() != expected_beta)
      throw InvalidInput("config key 'truth.beta" + suffix + "': expected " +
                         std::to_string(expected_beta) + " coefficients");
  }
  sc.holdout_level = static_cast<int>(cfg.get_long("synth.holdout_level",
                                                   sc.T));
  if (cfg.has("synth.holdout_boxes")) {
    // Boxes as lo..,hi.. tuples separated by ';'.
    std::string spec = cfg.get_string("synth.holdout_boxes");
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ';')) {
      if (token.find_first_not_of(" \t") == std::string::npos) continue;
      std::vector<double> vals;
      std::stringstream ts(token);
      std::string cell;
      while (std::getline(ts, cell, ','))
        vals.push_back(std::stod(cell));
      if (static_cast<int>(vals.size()) != 2 * d)
        throw InvalidInput("config key 'synth.holdout_boxes': each box "
                           "needs " + std::to_string(2 * d) + " numbers");
      Box b;
      b.lo = to_vector({vals.begin(), vals.begin() + d});
      b.hi = to_vector({vals.begin() + d, vals.end()});
      sc.holdouts.push_back(std::move(b));
    }
  }
  sc.seed = static_cast<std::uint64_t>(cfg.get_long("synth.seed", 1));
  sc.dense_cap = static_cast<int>(cfg.get_long("synth.dense_cap", 4000));
  sc.sequential = cfg.get_bool("synth.sequential", false);
  return sc;
}

struct FitInputs {
  std::vector<FidelityDataset> datasets;
  int m = 10;
  BasisConfig basis;
  Priors priors;
  SamplerConfig sampler;
  bool jitter = false;
};

FitInputs parse_fit(const Config& cfg, const std::string& model,
                    std::uint64_t seed_override, bool has_seed_override) {
  FitInputs in;
  const int T = level_count(cfg, "data.train");
  if (T == 0)
    throw InvalidInput("config: missing required key 'data.train.1'");
  for (int t = 1; t <= T; ++t) {
    const std::string path = cfg.get_string("data.train." +
                                            std::to_string(t));
    if (!std::filesystem::exists(path))
      throw InvalidInput("training file does not exist: " + path);
    in.datasets.push_back(read_data_csv(path, t));
  }
  const int d = in.datasets[0].dim();
  in.m = static_cast<int>(cfg.get_long("data.m", 10));
  in.jitter = cfg.get_bool("data.jitter_duplicates", false);

  const int T_eff = model == "nncgp" ? T : 1;
  in.basis.trend.resize(T_eff);
  in.basis.scale.resize(T_eff);
  for (int t = 1; t <= T_eff; ++t) {
    const std::string suffix = "." + std::to_string(t);
    in.basis.trend[t - 1] = parse_basis(
        cfg.get_string("basis.trend" + suffix,
                       cfg.get_string("basis.trend", "constant")),
        "basis.trend");
    in.basis.scale[t - 1] = parse_basis(
        cfg.get_string("basis.scale" + suffix,
                       cfg.get_string("basis.scale", "constant")),
        "basis.scale");
  }
  for (int t = 1; t <= T_eff; ++t) {
    LevelPriors pr;
    const int p_beta = basis_size(in.basis.trend[t - 1], d);
    pr.beta_mean = Vector::Constant(p_beta,
                                    cfg.get_double("priors.beta_mean", 0.0));
    pr.beta_var = Vector::Constant(p_beta,
                                   cfg.get_double("priors.beta_var", 1e4));
    if (t >= 2) {
      const int q = basis_size(in.basis.scale[t - 1], d);
      pr.gamma_mean = Vector::Constant(
          q, cfg.get_double("priors.gamma_mean", 0.0));
      pr.gamma_var = Vector::Constant(
          q, cfg.get_double("priors.gamma_var", 1e4));
    }
    pr.sigma2_shape = cfg.get_double("priors.sigma2_shape", 2.0);
    pr.sigma2_rate = cfg.get_double("priors.sigma2_rate", 1.0);
    pr.tau2_shape = cfg.get_double("priors.tau2_shape", 2.0);
    pr.tau2_rate = cfg.get_double("priors.tau2_rate", 1.0);
    pr.phi_upper = Vector::Constant(d,
                                    cfg.get_double("priors.phi_upper",
                                                   100.0));
    in.priors.push_back(std::move(pr));
  }

  in.sampler.n_iter = static_cast<int>(cfg.get_long("sampler.n_iter", 35000));
  in.sampler.burn_in = static_cast<int>(cfg.get_long("sampler.burn_in",
                                                     5000));
  in.sampler.thin = static_cast<int>(cfg.get_long("sampler.thin", 1));
  in.sampler.mh_step = cfg.get_double("sampler.mh_step", 0.5);
  in.sampler.adapt = cfg.get_bool("sampler.adapt", true);
  in.sampler.seed = static_cast<std::uint64_t>(
      cfg.get_long("sampler.seed", 1));
  if (has_seed_override) in.sampler.seed = seed_override;
  in.sampler.progress_every = static_cast<int>(
      cfg.get_long("sampler.progress_every", 0));
  const std::string rule = cfg.get_string("sampler.update_rule", "exact");
  if (rule == "exact")
    in.sampler.update_rule = UpdateRule::kExact;
  else if (rule == "printed")
    in.sampler.update_rule = UpdateRule::kPrinted;
  else
    throw InvalidInput("config key 'sampler.update_rule': expected 'exact' "
                       "or 'printed'");
  return in;
}

// Rebuilds the workspace a fit produced, so predict/evaluate share its
// geometry deterministically.
Workspace rebuild_workspace(const FitInputs& in, const std::string& model) {
  if (model == "nncgp")
    return build_workspace(in.datasets, in.m, in.basis, in.jitter);
  if (model == "single") {
    FidelityDataset top = in.datasets.back();
    top.level = 1;
    return build_workspace({std::move(top)}, in.m, in.basis, in.jitter);
  }
  if (model == "combined") {
    const int d = in.datasets[0].dim();
    int total = 0;
    for (const auto& ds : in.datasets) total += ds.size();
    FidelityDataset merged;
    merged.level = 1;
    merged.locations.resize(total, d);
    merged.values.resize(total);
    int row = 0;
    for (const auto& ds : in.datasets) {
      merged.locations.middleRows(row, ds.size()) = ds.locations;
      merged.values.segment(row, ds.size()) = ds.values;
      row += ds.size();
    }
    return build_workspace({std::move(merged)}, in.m, in.basis, true);
  }
  throw InvalidInput("unknown model '" + model + "'");
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const Config cfg = Config::load(config_path);
  validate_keys(cfg);
  const SynthConfig sc = parse_synth(cfg);
  const SynthOutput out = simulate(sc);
  std::filesystem::create_directories(out_dir);
  for (int t = 0; t < sc.T; ++t)
    write_data_csv(out_dir + "/train_level" + std::to_string(t + 1) + ".csv",
                   out.train[t]);
  write_data_csv(out_dir + "/test.csv", out.test);

  nlohmann::json truth;
  truth["seed"] = sc.seed;
  truth["T"] = sc.T;
  truth["approximate_fields"] = out.approximate;
  truth["holdout_level"] = sc.holdout_level;
  for (int t = 0; t < sc.T; ++t) {
    nlohmann::json level;
    level["n_requested"] = sc.n[t];
    level["n_train"] = out.train[t].size();
    level["beta"] = std::vector<double>(
        sc.truth[t].beta.data(), sc.truth[t].beta.data() +
        sc.truth[t].beta.size());
    if (sc.truth[t].gamma.size() > 0)
      level["gamma"] = std::vector<double>(
          sc.truth[t].gamma.data(), sc.truth[t].gamma.data() +
          sc.truth[t].gamma.size());
    level["sigma2"] = sc.truth[t].kernel.sigma2;
    level["phi"] = std::vector<double>(
        sc.truth[t].kernel.phi.data(), sc.truth[t].kernel.phi.data() +
        sc.truth[t].kernel.phi.size());
    level["tau2"] = sc.truth[t].tau2;
    truth["levels"].push_back(level);
  }
  truth["n_test"] = out.test.size();
  std::ofstream meta(out_dir + "/truth.json");
  meta << truth.dump(2) << "\n";
  std::cout << "wrote " << sc.T << " training files and " << out.test.size()
            << " test rows to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const std::string& config_path, const std::string& model,
            const std::string& out_dir, std::uint64_t seed_override,
            bool has_seed_override) {
  const Config cfg = Config::load(config_path);
  validate_keys(cfg);
  const FitInputs in = parse_fit(cfg, model, seed_override,
                                 has_seed_override);
  const Workspace ws = rebuild_workspace(in, model);
  const ChainTrace trace = run_chain(ws, in.priors, in.sampler);
  std::filesystem::create_directories(out_dir);
  write_trace(out_dir, trace, ws);
  write_manifest(out_dir, model, in.sampler.seed, cfg.digest(), trace);
  std::cout << "retained " << trace.n_retained << " draws";
  for (int t = 0; t < ws.T; ++t)
    std::cout << " | phi acceptance level " << (t + 1) << ": "
              << trace.phi_accept_rate[t];
  std::cout << "\n";
  return 0;
}

int cmd_predict(const std::string& config_path, const std::string& model,
                const std::string& fit_dir, const std::string& out_path) {
  const Config cfg = Config::load(config_path);
  validate_keys(cfg);
  const FitInputs in = parse_fit(cfg, model, 0, false);
  const Workspace ws = rebuild_workspace(in, model);
  if (!std::filesystem::exists(fit_dir + "/trace_level1.csv"))
    throw InvalidInput("no trace found in '" + fit_dir +
                       "'; run fit first");
  const ChainTrace trace = read_trace(fit_dir, ws);

  PredictionRequest req;
  req.level = static_cast<int>(cfg.get_long("predict.level", ws.T));
  if (cfg.has("predict.quantiles"))
    req.quantiles = cfg.get_doubles("predict.quantiles");
  const std::uint64_t seed = static_cast<std::uint64_t>(
      cfg.get_long("predict.seed", 0x9E3779B9));

  PredictionResult result;
  if (cfg.has("predict.grid")) {
    const auto spec = cfg.get_doubles("predict.grid");
    const int d = ws.dim;
    if (static_cast<int>(spec.size()) != 3 * d)
      throw InvalidInput("config key 'predict.grid': expected lo.., hi.., "
                         "cell.. (" + std::to_string(3 * d) + " numbers)");
    GridSpec grid;
    grid.lo = to_vector({spec.begin(), spec.begin() + d});
    grid.hi = to_vector({spec.begin() + d, spec.begin() + 2 * d});
    grid.cell = to_vector({spec.begin() + 2 * d, spec.end()});
    result = predict_grid(ws, trace, grid, req.level, req.quantiles, seed);
    req.targets = grid.centers();
  } else {
    const std::string targets_path = cfg.get_string("predict.targets");
    req.targets = read_data_csv(targets_path).locations;
    result = predict(ws, trace, req, seed);
  }
  write_prediction_csv(out_path, req.targets, result);
  std::cout << "wrote " << req.targets.rows() << " predictions to "
            << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& test_path,
                 const std::string& config_path, const std::string& model,
                 const std::string& fit_dir, const std::string& out_path) {
  const PredictionTable pred = read_prediction_csv(pred_path);
  const FidelityDataset test = read_data_csv(test_path);
  if (pred.targets.rows() != test.size())
    throw InvalidInput("prediction and test files disagree on row count");

  EvalReport report;
  report.n_test = test.size();
  report.rmspe = rmspe(pred.mean, test.values);
  report.nsme = nsme(pred.mean, test.values);
  int lo_col = -1, hi_col = -1;
  for (std::size_t q = 0; q < pred.probs.size(); ++q) {
    if (std::abs(pred.probs[q] - 0.025) < 1e-9) lo_col = static_cast<int>(q);
    if (std::abs(pred.probs[q] - 0.975) < 1e-9) hi_col = static_cast<int>(q);
  }
  if (lo_col < 0 || hi_col < 0)
    throw InvalidInput("prediction file lacks q025/q975 columns");
  const auto [cvg, alci] = interval_metrics(pred.quantiles.col(lo_col),
                                            pred.quantiles.col(hi_col),
                                            test.values);
  report.cvg95 = cvg;
  report.alci95 = alci;

  if (!fit_dir.empty()) {
    const Config cfg = Config::load(config_path);
    validate_keys(cfg);
    const FitInputs in = parse_fit(cfg, model, 0, false);
    const Workspace ws = rebuild_workspace(in, model);
    const ChainTrace trace = read_trace(fit_dir, ws);
    const auto [pd, dic_value] = dic(trace, ws);
    report.has_dic = true;
    report.pd = pd;
    report.dic = dic_value;
  }
  const std::string json = eval_report_json(report);
  if (out_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_path);
    out << json << "\n";
    std::cout << "wrote report to " << out_path << "\n";
  }
  return 0;
}

// Small verification suite behind `oracle-check`: factor identities and the
// dense-oracle equivalences on fresh random instances, plus a negative
// control proving the checks can fail.
int cmd_oracle_check(int n, int m) {
  int failures = 0;
  auto report = [&failures](const std::string& name, bool ok) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  RngStream rng(1729, 0);
  Matrix locs(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) locs(i, j) = rng.uniform();
  KernelParams kernel{1.7, Vector(2)};
  kernel.phi << 0.3, 0.45;

  // Exactness of the factorized log density at full conditioning.
  {
    const auto g = build_neighbor_graph(locs, n - 1);
    const auto fac = compute_factors(g, locs, kernel);
    Vector w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.normal();
    const double approx = nngp_log_density(w, fac, g);
    FidelityDataset ds;
    ds.level = 1;
    ds.locations = locs;
    ds.values = w;
    DenseJoint joint;
    joint.mu = Vector::Zero(n);
    joint.lambda = cross_cov(locs, locs, kernel);
    const double exact = dense_log_likelihood(w, joint);
    report("nngp log density equals dense log density at m = n-1",
           std::abs(approx - exact) <= 1e-8 * std::abs(exact));

    // Negative control: a corrupted factor must be detected.
    auto corrupted = fac;
    corrupted.f_corr[n / 2] *= 1.5;
    const double broken = nngp_log_density(w, corrupted, g);
    report("corrupted factors are detected by the same comparison",
           !(std::abs(broken - exact) <= 1e-8 * std::abs(exact)));
  }

  // Factor moments against dense conditionals on a thinned graph.
  {
    const auto g = build_neighbor_graph(locs, m);
    const auto fac = compute_factors(g, locs, kernel);
    const Matrix C = cross_cov(locs, locs, kernel);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
      const auto& nb = g.neighbors[k];
      if (nb.empty()) continue;
      Matrix Cn(nb.size(), nb.size());
      Vector cn(nb.size());
      for (std::size_t a = 0; a < nb.size(); ++a) {
        cn[a] = C(g.order[k], nb[a]);
        for (std::size_t b = 0; b < nb.size(); ++b)
          Cn(a, b) = C(nb[a], nb[b]);
      }
      const Vector bk = Cn.ldlt().solve(cn);
      worst = std::max(worst, (bk - fac.b[k]).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(C(g.order[k], g.order[k]) -
                                       cn.dot(bk) - fac.f(k)));
    }
    report("neighbor factors solve their dense conditional systems",
           worst <= 1e-8);
  }

  // Degenerate single-point instance.
  {
    Matrix one(1, 2);
    one << 0.5, 0.5;
    const auto g = build_neighbor_graph(one, 1);
    const auto fac = compute_factors(g, one, kernel);
    Vector w(1);
    w << 0.3;
    const double value = nngp_log_density(w, fac, g);
    const double expect = -0.5 * (std::log(2.0 * M_PI * 1.7) +
                                  0.09 / 1.7);
    report("single-point instance reduces to the scalar normal",
           std::abs(value - expect) <= 1e-12);
  }
  std::cout << (failures == 0 ? "all checks passed\n"
                              : "some checks FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* cap = std::getenv("NNCGP_THREADS")) {
    const int threads = std::atoi(cap);
    if (threads > 0) omp_set_num_threads(threads);
  }
#endif

  CLI::App app{"Nearest neighbor co-kriging Gaussian process toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path, model = "nncgp";
  std::string fit_dir, pred_path, test_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int check_n = 40, check_m = 6;

  auto add_model_flag = [&model](CLI::App* cmd) {
    cmd->add_option("--model", model,
                    "Model variant: nncgp, single, or combined")
        ->check(CLI::IsMember({"nncgp", "single", "combined"}));
  };

  auto* sim = app.add_subcommand("simulate",
                                 "Generate synthetic multi-fidelity data");
  sim->add_option("--config", config_path, "Config file")->required();
  sim->add_option("--out", out_dir, "Output directory");

  auto* fit = app.add_subcommand("fit", "Run the MCMC sampler");
  fit->add_option("--config", config_path, "Config file")->required();
  fit->add_option("--out", out_dir, "Output directory");
  add_model_flag(fit);
  fit->add_option("--seed", seed, "Override sampler.seed");
  fit->callback([&has_seed, fit]() {
    has_seed = fit->count("--seed") > 0;
  });

  auto* pred = app.add_subcommand("predict",
                                  "Posterior predictions at new locations");
  pred->add_option("--config", config_path, "Config file")->required();
  pred->add_option("--fit", fit_dir, "Directory written by fit")->required();
  pred->add_option("--out", out_path, "Prediction CSV path")->required();
  add_model_flag(pred);

  auto* eval = app.add_subcommand("evaluate",
                                  "Score predictions against test data");
  eval->add_option("--pred", pred_path, "Prediction CSV")->required();
  eval->add_option("--test", test_path, "Test CSV")->required();
  eval->add_option("--config", config_path,
                   "Config file (needed with --fit)");
  eval->add_option("--fit", fit_dir, "Fit directory; adds DIC/pD");
  eval->add_option("--out", out_path, "Report path (default stdout)");
  add_model_flag(eval);

  auto* check = app.add_subcommand("oracle-check",
                                   "Dense-oracle verification suite");
  check->add_option("--n", check_n, "Instance size");
  check->add_option("--m", check_m, "Neighbor budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (fit->parsed())
      return cmd_fit(config_path, model, out_dir, seed, has_seed);
    if (pred->parsed())
      return cmd_predict(config_path, model, fit_dir, out_path);
    if (eval->parsed()) {
      if (!fit_dir.empty() && config_path.empty())
        throw InvalidInput("evaluate: --fit requires --config");
      return cmd_evaluate(pred_path, test_path, config_path, model, fit_dir,
                          out_path);
    }
    if (check->parsed()) return cmd_oracle_check(check_n, check_m);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUser;
}
