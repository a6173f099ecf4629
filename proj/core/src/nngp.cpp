/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/nngp.hpp"

#include <cmath>
#include <unordered_set>

#include "nncgp/rng.hpp"

namespace nncgp {

NNGPFactors compute_factors(const NeighborGraph& graph, const Matrix& locs,
                            const KernelParams& p) {
  p.validate();
  if (p.phi.size() != locs.cols())
    throw InvalidInput("compute_factors: phi dimension mismatch");
  const int n = graph.size();
  NNGPFactors out;
  out.sigma2 = p.sigma2;
  out.b.resize(n);
  out.f_corr.resize(n);

  bool failed = false;
  int failed_at = -1;
  #pragma omp parallel for schedule(dynamic, 32)
  for (int k = 0; k < n; ++k) {
    const auto& nb = graph.neighbors[k];
    const int q = static_cast<int>(nb.size());
    if (q == 0) {
      out.b[k] = Vector();
      out.f_corr[k] = 1.0;
      continue;
    }
    // Correlation-form systems; sigma2 cancels out of b and scales f.
    Matrix R(q, q);
    Vector r(q);
    for (int a = 0; a < q; ++a) {
      r[a] = correlation(locs, graph.order[k], locs, nb[a], p.phi);
      R(a, a) = 1.0;
      for (int c = a + 1; c < q; ++c) {
        const double v = correlation(locs, nb[a], locs, nb[c], p.phi);
        R(a, c) = v;
        R(c, a) = v;
      }
    }
    try {
      auto llt = chol_with_jitter(std::move(R), 1.0,
                                  "compute_factors index " +
                                  std::to_string(k));
      out.b[k] = llt.solve(r);
      double f = 1.0 - r.dot(out.b[k]);
      // Guard against cancellation on near-duplicate neighbors.
      out.f_corr[k] = std::max(f, 1e-12);
    } catch (const NumericalError&) {
      #pragma omp critical
      {
        failed = true;
        if (failed_at < 0 || k < failed_at) failed_at = k;
      }
    }
  }
  if (failed)
    throw NumericalError("compute_factors: neighbor covariance not positive "
                         "definite after jitter retry at ordered index " +
                         std::to_string(failed_at));
  return out;
}

double nngp_log_density(const Vector& w, const NNGPFactors& factors,
                        const NeighborGraph& graph) {
  if (w.size() != graph.size())
    throw InvalidInput("nngp_log_density: length mismatch");
  constexpr double kLog2Pi = 1.8378770664093453;
  double total = 0.0;
  #pragma omp parallel for reduction(+ : total) schedule(static) \
      if (graph.size() > 4096)
  for (int k = 0; k < graph.size(); ++k) {
    const auto& nb = graph.neighbors[k];
    double mean = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      mean += factors.b[k][a] * w[nb[a]];
    const double f = factors.f(k);
    const double resid = w[graph.order[k]] - mean;
    total += -0.5 * (kLog2Pi + std::log(f) + resid * resid / f);
  }
  return total;
}

std::int64_t sparse_precision_nnz(const NNGPFactors& factors,
                                  const NeighborGraph& graph) {
  (void)factors;
  const int n = graph.size();
  // Each ordered point couples every pair within {i} ∪ N(i); the union of
  // those cliques is the structural pattern of Bᵀ F⁻¹ B.
  std::unordered_set<std::int64_t> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * graph.m);
  auto encode = [n](int a, int b) {
    if (a < b) std::swap(a, b);
    return static_cast<std::int64_t>(a) * n + b;
  };
  for (int k = 0; k < n; ++k) {
    const auto& nb = graph.neighbors[k];
    const int self = graph.order[k];
    for (std::size_t a = 0; a < nb.size(); ++a) {
      pairs.insert(encode(self, nb[a]));
      for (std::size_t c = a + 1; c < nb.size(); ++c)
        pairs.insert(encode(nb[a], nb[c]));
    }
  }
  return static_cast<std::int64_t>(pairs.size()) + n;  // + diagonal
}

ChildIndex build_children(const NeighborGraph& graph) {
  ChildIndex idx;
  idx.children.resize(graph.size());
  for (int k = 0; k < graph.size(); ++k) {
    const auto& nb = graph.neighbors[k];
    for (std::size_t slot = 0; slot < nb.size(); ++slot)
      idx.children[nb[slot]].emplace_back(k, static_cast<int>(slot));
  }
  return idx;
}

Vector sample_nngp(const NNGPFactors& factors, const NeighborGraph& graph,
                   RngStream& rng) {
  Vector w(graph.size());
  for (int k = 0; k < graph.size(); ++k) {
    const auto& nb = graph.neighbors[k];
    double mean = 0.0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      mean += factors.b[k][a] * w[nb[a]];
    w[graph.order[k]] = mean + std::sqrt(factors.f(k)) * rng.normal();
  }
  return w;
}

}  // namespace nncgp
