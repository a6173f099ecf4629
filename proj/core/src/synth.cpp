/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/synth.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "nncgp/kdtree.hpp"
#include "nncgp/rng.hpp"

namespace nncgp {

bool Box::contains(const Eigen::Ref<const Vector>& s) const {
  for (Eigen::Index j = 0; j < lo.size(); ++j)
    if (s[j] < lo[j] || s[j] > hi[j]) return false;
  return true;
}

void SynthConfig::validate() const {
  if (T < 1) throw InvalidInput("SynthConfig: T must be >= 1");
  if (static_cast<int>(n.size()) != T || static_cast<int>(truth.size()) != T)
    throw InvalidInput("SynthConfig: per-level sizes and truths must both "
                       "have T entries");
  for (int nt : n)
    if (nt < 1) throw InvalidInput("SynthConfig: n_t must be >= 1");
  if (bbox.lo.size() != bbox.hi.size() || bbox.lo.size() == 0)
    throw InvalidInput("SynthConfig: malformed bounding box");
  for (Eigen::Index j = 0; j < bbox.lo.size(); ++j)
    if (!(bbox.hi[j] > bbox.lo[j]))
      throw InvalidInput("SynthConfig: bounding box must have positive "
                         "extent");
  if (holdout_level < 1 || holdout_level > T)
    throw InvalidInput("SynthConfig: holdout_level out of range");
  for (const Box& b : holdouts) {
    if (b.lo.size() != bbox.lo.size())
      throw InvalidInput("SynthConfig: holdout box dimension mismatch");
    for (Eigen::Index j = 0; j < b.lo.size(); ++j)
      if (b.lo[j] < bbox.lo[j] || b.hi[j] > bbox.hi[j] ||
          !(b.hi[j] > b.lo[j]))
        throw InvalidInput("SynthConfig: holdout boxes must lie inside the "
                           "bounding box");
  }
  for (const auto& p : truth) p.kernel.validate();
}

namespace {

// Dense zero-mean GP draw over `locs`.
Vector dense_field(const Matrix& locs, const KernelParams& kernel,
                   RngStream& rng) {
  Matrix C = cross_cov(locs, locs, kernel);
  auto llt = chol_with_jitter(std::move(C), kernel.sigma2, "simulate");
  Vector z(locs.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return llt.matrixL() * z;
}

// Sequential exact conditioning with history truncated to the nearest
// `m_hist` earlier points; the approximation is noted in the output.
Vector sequential_field(const Matrix& locs, const KernelParams& kernel,
                        int m_hist, RngStream& rng) {
  NeighborGraph graph = build_neighbor_graph(locs, std::max(1, m_hist));
  NNGPFactors factors = compute_factors(graph, locs, kernel);
  return sample_nngp(factors, graph, rng);
}

std::uint64_t coord_hash(const Matrix& m, int row) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (int j = 0; j < m.cols(); ++j) {
    double v = m(row, j);
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof(b));
    h = mix64(h ^ b);
  }
  return h;
}

}  // namespace

SynthOutput simulate(const SynthConfig& config) {
  config.validate();
  const int T = config.T;
  const int d = static_cast<int>(config.bbox.lo.size());

  // Locations: uniform per level, exact duplicates across levels redrawn.
  std::vector<Matrix> locs(T);
  {
    RngStream rng(config.seed, 0xBEEFull);
    std::unordered_set<std::uint64_t> seen;
    for (int t = 0; t < T; ++t) {
      locs[t].resize(config.n[t], d);
      for (int i = 0; i < config.n[t]; ++i) {
        for (;;) {
          for (int j = 0; j < d; ++j)
            locs[t](i, j) = rng.uniform(config.bbox.lo[j], config.bbox.hi[j]);
          const std::uint64_t h = coord_hash(locs[t], i);
          if (seen.insert(h).second) break;
        }
      }
    }
  }

  // Latent fields are needed on S̃_t (the union of level-t and all higher
  // level locations), so build datasets first and reuse the augmentation.
  std::vector<FidelityDataset> datasets(T);
  for (int t = 0; t < T; ++t) {
    datasets[t].level = t + 1;
    datasets[t].locations = locs[t];
    datasets[t].values = Vector::Zero(config.n[t]);
  }
  const std::vector<AugmentedReferenceSet> refsets =
      augment_reference_sets(datasets);

  SynthOutput out;
  std::vector<Vector> w(T), y(T);
  for (int t = 0; t < T; ++t) {
    RngStream rng(config.seed, 0xF1E1Dull + static_cast<std::uint64_t>(t));
    const Matrix& pts = refsets[t].combined;
    if (pts.rows() <= config.dense_cap) {
      w[t] = dense_field(pts, config.truth[t].kernel, rng);
    } else if (config.sequential) {
      w[t] = sequential_field(pts, config.truth[t].kernel,
                              config.sequential_neighbors, rng);
      out.approximate = true;
    } else {
      throw InvalidInput("simulate: field size " +
                         std::to_string(pts.rows()) +
                         " exceeds the dense cap; enable sequential "
                         "generation");
    }
  }

  // Compose y through the autoregression and add nugget noise at the
  // observed rows.
  for (int t = 0; t < T; ++t) {
    const Matrix trend = basis_design(config.basis.trend[t],
                                      refsets[t].combined);
    y[t] = trend * config.truth[t].beta + w[t];
    if (t >= 1) {
      const Matrix scale = basis_design(config.basis.scale[t],
                                        refsets[t].combined);
      const Vector zeta = scale * config.truth[t].gamma;
      // Row of each S̃_t site in S̃_{t-1}, via the level that observes it.
      std::vector<int> prev_of(refsets[t].size(), -1);
      for (int td = t; td < T; ++td) {
        const auto& rows_t = refsets[t].level_rows[td - t];
        const auto& rows_prev = refsets[t - 1].level_rows[td - (t - 1)];
        for (std::size_t i = 0; i < rows_t.size(); ++i)
          prev_of[rows_t[i]] = rows_prev[i];
      }
      for (int u = 0; u < refsets[t].size(); ++u)
        y[t][u] += zeta[u] * y[t - 1][prev_of[u]];
    }
    RngStream noise(config.seed, 0xAB1Eull + static_cast<std::uint64_t>(t));
    const double tau = std::sqrt(config.truth[t].tau2);
    for (int i = 0; i < config.n[t]; ++i)
      datasets[t].values[i] = y[t][i] + tau * noise.normal();
  }

  // Holdout extraction at the designated level.
  const int hl = config.holdout_level - 1;
  std::vector<int> keep, test;
  for (int i = 0; i < config.n[hl]; ++i) {
    const Vector s = locs[hl].row(i).transpose();
    bool held = false;
    for (const Box& b : config.holdouts)
      if (b.contains(s)) {
        held = true;
        break;
      }
    (held ? test : keep).push_back(i);
  }
  if (keep.empty())
    throw InvalidInput("simulate: holdout boxes swallowed every training "
                       "point at level " + std::to_string(config.holdout_level));

  out.test.level = config.holdout_level;
  out.test.locations.resize(test.size(), d);
  out.test.values.resize(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    out.test.locations.row(i) = locs[hl].row(test[i]);
    out.test.values[i] = datasets[hl].values[test[i]];
  }
  Matrix kept_locs(keep.size(), d);
  Vector kept_vals(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    kept_locs.row(i) = locs[hl].row(keep[i]);
    kept_vals[i] = datasets[hl].values[keep[i]];
  }
  datasets[hl].locations = std::move(kept_locs);
  datasets[hl].values = std::move(kept_vals);

  out.train = std::move(datasets);
  return out;
}

}  // namespace nncgp
