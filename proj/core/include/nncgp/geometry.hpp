/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <vector>

#include "nncgp/types.hpp"

namespace nncgp {

/// Deterministic location ordering: ascending sum of coordinates, ties
/// broken lexicographically by coordinate, then by input index. Identical
/// input yields an identical permutation on every run and platform.
std::vector<int> order_locations(const Matrix& locs);

/// Rejects duplicate rows, or (with jitter enabled) displaces repeats by
/// 1e-9 x the coordinate-wise domain diameter so downstream factorizations
/// stay nonsingular. Returns the possibly-jittered coordinates.
Matrix dedupe_locations(const Matrix& locs, bool jitter,
                        const std::string& context);

/// Validates a dataset at ingestion: finite coordinates and values,
/// matching lengths, no duplicate locations (see dedupe_locations).
void validate_dataset(const FidelityDataset& data, bool jitter = false);

/// Level-t reference set augmented for nesting: the observed locations
/// S_t (rows [0, n_own)) followed by the extra sites S_t^* that appear in
/// higher levels only (rows [n_own, n_own + n_extra)).
///
/// `level_rows[j]` maps each row of S_{t+j} to its row in `combined`
/// (j = 0 is the identity over the own block), which realizes the nesting
/// S_{t'} ⊆ S̃_t for every t' >= t.
struct AugmentedReferenceSet {
  int level = 1;  // 1-based
  Matrix combined;
  int n_own = 0;
  int n_extra = 0;
  std::vector<std::vector<int>> level_rows;

  int size() const { return n_own + n_extra; }
  int dim() const { return static_cast<int>(combined.cols()); }
  bool is_extra(int row) const { return row >= n_own; }
};

/// Builds the augmented reference set of every level:
/// S_t^* = (∪_{i>t} S_i) \ S_t, with cross-level membership decided by
/// exact coordinate equality. Level T has an empty extra block.
std::vector<AugmentedReferenceSet> augment_reference_sets(
    const std::vector<FidelityDataset>& datasets);

/// Directed nearest-neighbor sets over an ordered point set.
///
/// `order[k]` is the combined row at ordered position k; `neighbors[k]`
/// holds at most m earlier rows: none for k = 0, all predecessors while
/// k <= m - 1, and the m nearest (Euclidean) predecessors beyond that.
struct NeighborGraph {
  std::vector<int> order;                  // position -> combined row
  std::vector<int> rank;                   // combined row -> position
  std::vector<std::vector<int>> neighbors; // per position, combined rows
  int m = 0;

  int size() const { return static_cast<int>(order.size()); }
};

NeighborGraph build_neighbor_graph(const AugmentedReferenceSet& refset, int m);

/// Same construction over a raw point matrix (used by baselines, tests
/// and prediction helpers).
NeighborGraph build_neighbor_graph(const Matrix& locs, int m);

}  // namespace nncgp
