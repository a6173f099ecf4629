/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "nncgp/covariance.hpp"
#include "nncgp/geometry.hpp"

namespace nncgp {

/// Per-point conditional factors of the nearest-neighbor factorization:
/// w(s_i) | w(N(i)) ~ N(b_i · w(N(i)), f_i).
///
/// b depends on correlations only, so factors are stored in correlation
/// form: f_i = sigma2 * f_corr_i. A change of sigma2 alone is a rescale
/// (see rescale_sigma2), while a change of phi requires recomputation.
struct NNGPFactors {
  std::vector<Vector> b;       // per ordered position, length |N(i)|
  std::vector<double> f_corr;  // per ordered position, in (0, 1 + jitter]
  double sigma2 = 1.0;

  double f(int k) const { return sigma2 * f_corr[k]; }
  void rescale_sigma2(double s2) { sigma2 = s2; }
  int size() const { return static_cast<int>(f_corr.size()); }
};

/// Solves the m x m neighbor systems for every ordered point:
/// b_i = C_{N(i)}^{-1} C_{N(i),s_i} and f_i = C(s_i,s_i) - C_{s_i,N(i)} b_i.
/// Throws NumericalError naming the ordered index when a neighbor matrix
/// stays indefinite after the jitter retry.
NNGPFactors compute_factors(const NeighborGraph& graph, const Matrix& locs,
                            const KernelParams& p);

/// Log density of the nearest-neighbor approximation:
/// sum_i log N(w_i | b_i · w_{N(i)}, f_i). `w` is indexed by combined row.
double nngp_log_density(const Vector& w, const NNGPFactors& factors,
                        const NeighborGraph& graph);

/// Structurally nonzero entries of the implied sparse precision
/// Bᵀ F⁻¹ B, counting the lower triangle plus the diagonal. The paper's
/// 1/2 n m (m+1) bound covers the off-diagonal part of this count.
std::int64_t sparse_precision_nnz(const NNGPFactors& factors,
                                  const NeighborGraph& graph);

/// Reverse adjacency of a neighbor graph: for each combined row u, the
/// ordered positions k whose neighbor set contains u, with the slot of u
/// in b_k. Needed by exact single-site conditionals.
struct ChildIndex {
  // children[u] = {(ordered position, slot in neighbors[position])}
  std::vector<std::vector<std::pair<int, int>>> children;
};

ChildIndex build_children(const NeighborGraph& graph);

/// Draws w sequentially through the factors (ordered positions, each
/// conditioned on its neighbors). Returns the vector indexed by combined
/// row. This is the generative counterpart of nngp_log_density.
class RngStream;
Vector sample_nngp(const NNGPFactors& factors, const NeighborGraph& graph,
                   RngStream& rng);

}  // namespace nncgp
