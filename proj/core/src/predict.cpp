/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/predict.hpp"

#include <algorithm>
#include <cmath>

#include "nncgp/kdtree.hpp"

namespace nncgp {

void PredictionRequest::validate(int T) const {
  if (targets.rows() == 0) throw InvalidInput("predict: no targets");
  if (level < 1 || level > T)
    throw InvalidInput("predict: level out of range");
  for (double p : quantiles)
    if (!(p > 0.0 && p < 1.0))
      throw InvalidInput("predict: quantile probabilities must lie in (0,1)");
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInput("empirical_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= values.size()) return values.back();
  return values[i] + (h - static_cast<double>(i)) * (values[i + 1] -
                                                     values[i]);
}

namespace {

// Exact-coordinate match of a target against a reference set; returns the
// combined row or -1.
int match_site(const Matrix& combined, const Eigen::Ref<const Vector>& s) {
  for (int r = 0; r < combined.rows(); ++r) {
    bool same = true;
    for (int j = 0; j < combined.cols(); ++j)
      if (combined(r, j) != s[j]) {
        same = false;
        break;
      }
    if (same) return r;
  }
  return -1;
}

}  // namespace

PredictionResult predict(const Workspace& ws, const ChainTrace& trace,
                         const PredictionRequest& request,
                         std::uint64_t seed) {
  request.validate(ws.T);
  if (trace.n_retained == 0) throw InvalidInput("predict: empty trace");
  if (request.targets.cols() != ws.dim)
    throw InvalidInput("predict: target dimension mismatch");
  for (int t = 0; t < request.level; ++t)
    if (trace.w_snapshots[t].rows() != trace.n_retained)
      throw InvalidInput("predict: trace carries no latent snapshots");

  const int n_targets = static_cast<int>(request.targets.rows());
  const int n_draws = trace.n_retained;
  const int level = request.level;  // 1-based

  // Static neighbor sets per (target, level'): m nearest among all of
  // S̃_{t'}, or the matching site itself when the target is a reference
  // site.
  std::vector<KdTree> trees;
  trees.reserve(level);
  for (int t = 0; t < level; ++t) trees.emplace_back(ws.refsets[t].combined);
  std::vector<std::vector<std::vector<int>>> nbrs(
      n_targets, std::vector<std::vector<int>>(level));
  std::vector<std::vector<int>> site_row(n_targets,
                                         std::vector<int>(level, -1));
  #pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n_targets; ++i) {
    const Vector s = request.targets.row(i).transpose();
    for (int t = 0; t < level; ++t) {
      site_row[i][t] = match_site(ws.refsets[t].combined, s);
      if (site_row[i][t] < 0) {
        const int k = std::min(ws.m, ws.n_total(t));
        nbrs[i][t] = trees[t].knn(s, k);
      }
    }
  }

  std::vector<std::vector<LevelParams>> draw_params(n_draws);
  for (int r = 0; r < n_draws; ++r) draw_params[r] = trace.params_at(r, ws);

  Matrix draws(n_draws, n_targets);
  #pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n_targets; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    const Vector s = request.targets.row(i).transpose();
    std::vector<Vector> h(level), g(level);
    for (int t = 0; t < level; ++t) {
      h[t].resize(basis_size(ws.basis.trend[t], ws.dim));
      eval_basis(ws.basis.trend[t], s, h[t]);
      if (t >= 1) {
        g[t].resize(basis_size(ws.basis.scale[t], ws.dim));
        eval_basis(ws.basis.scale[t], s, g[t]);
      }
    }
    for (int r = 0; r < n_draws; ++r) {
      const std::vector<LevelParams>& params = draw_params[r];
      double y_prev = 0.0;
      for (int t = 0; t < level; ++t) {
        double w;
        if (site_row[i][t] >= 0) {
          w = trace.w_snapshots[t](r, site_row[i][t]);
        } else {
          const auto& nb = nbrs[i][t];
          const int q = static_cast<int>(nb.size());
          Matrix R(q, q);
          Vector rho(q);
          const Matrix& pts = ws.refsets[t].combined;
          for (int a = 0; a < q; ++a) {
            double e = 0.0;
            for (int c = 0; c < ws.dim; ++c)
              e += std::abs(pts(nb[a], c) - s[c]) / params[t].kernel.phi[c];
            rho[a] = std::exp(-0.5 * e);
            R(a, a) = 1.0;
            for (int c2 = a + 1; c2 < q; ++c2) {
              const double v = correlation(pts, nb[a], pts, nb[c2],
                                           params[t].kernel.phi);
              R(a, c2) = v;
              R(c2, a) = v;
            }
          }
          auto llt = chol_with_jitter(std::move(R), 1.0, "predict");
          const Vector b = llt.solve(rho);
          double mean = 0.0;
          for (int a = 0; a < q; ++a)
            mean += b[a] * trace.w_snapshots[t](r, nb[a]);
          const double f_corr = std::max(1.0 - rho.dot(b), 1e-12);
          const double f = params[t].kernel.sigma2 * f_corr;
          w = mean + std::sqrt(f) * rng.normal();
        }
        double y = h[t].dot(params[t].beta) + w;
        if (t >= 1) y += g[t].dot(params[t].gamma) * y_prev;
        y_prev = y;
      }
      const double tau2 = params[level - 1].tau2;
      draws(r, i) = y_prev + std::sqrt(tau2) * rng.normal();
    }
  }

  PredictionResult out;
  out.n_draws = n_draws;
  out.probs = request.quantiles;
  out.mean.resize(n_targets);
  out.sd.resize(n_targets);
  out.quantiles.resize(n_targets, static_cast<int>(request.quantiles.size()));
  for (int i = 0; i < n_targets; ++i) {
    const Vector col = draws.col(i);
    const double mean = col.mean();
    out.mean[i] = mean;
    out.sd[i] = n_draws > 1
                    ? std::sqrt((col.array() - mean).square().sum() /
                                (n_draws - 1))
                    : 0.0;
    std::vector<double> sample(col.data(), col.data() + n_draws);
    for (std::size_t qj = 0; qj < request.quantiles.size(); ++qj)
      out.quantiles(i, static_cast<int>(qj)) =
          empirical_quantile(sample, request.quantiles[qj]);
  }
  return out;
}

Matrix GridSpec::centers() const {
  if (lo.size() != hi.size() || lo.size() != cell.size())
    throw InvalidInput("GridSpec: dimension mismatch");
  const int d = static_cast<int>(lo.size());
  std::vector<int> counts(d);
  long total = 1;
  for (int j = 0; j < d; ++j) {
    if (!(hi[j] > lo[j])) throw InvalidInput("GridSpec: empty bounding box");
    if (!(cell[j] > 0.0)) throw InvalidInput("GridSpec: cell sizes must be "
                                             "positive");
    counts[j] = std::max(1, static_cast<int>(std::floor(
                                (hi[j] - lo[j]) / cell[j] + 1e-12)));
    total *= counts[j];
  }
  Matrix centers(total, d);
  std::vector<int> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    for (int j = 0; j < d; ++j)
      centers(r, j) = lo[j] + (idx[j] + 0.5) * cell[j];
    // Row-major: first coordinate fastest.
    for (int j = 0; j < d; ++j) {
      if (++idx[j] < counts[j]) break;
      idx[j] = 0;
    }
  }
  return centers;
}

PredictionResult predict_grid(const Workspace& ws, const ChainTrace& trace,
                              const GridSpec& grid, int level,
                              const std::vector<double>& quantiles,
                              std::uint64_t seed) {
  PredictionRequest req;
  req.targets = grid.centers();
  req.level = level;
  req.quantiles = quantiles;
  return predict(ws, trace, req, seed);
}

}  // namespace nncgp
