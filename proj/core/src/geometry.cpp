/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "nncgp/kdtree.hpp"
#include "nncgp/rng.hpp"

namespace nncgp {

namespace {

// Hash key for exact coordinate identity. -0.0 is normalized to +0.0 at
// ingestion so bitwise comparison matches numeric equality.
struct CoordKey {
  std::vector<std::uint64_t> bits;
  bool operator==(const CoordKey& o) const { return bits == o.bits; }
};

struct CoordKeyHash {
  std::size_t operator()(const CoordKey& k) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::uint64_t b : k.bits) h = mix64(h ^ b);
    return static_cast<std::size_t>(h);
  }
};

CoordKey make_key(const Matrix& locs, int row) {
  CoordKey key;
  key.bits.resize(locs.cols());
  for (Eigen::Index j = 0; j < locs.cols(); ++j) {
    double v = locs(row, j);
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof(b));
    key.bits[j] = b;
  }
  return key;
}

using CoordMap = std::unordered_map<CoordKey, int, CoordKeyHash>;

CoordMap index_by_coords(const Matrix& locs) {
  CoordMap map;
  map.reserve(locs.rows());
  for (int i = 0; i < locs.rows(); ++i) map.emplace(make_key(locs, i), i);
  return map;
}

}  // namespace

std::vector<int> order_locations(const Matrix& locs) {
  const int n = static_cast<int>(locs.rows());
  if (n == 0) throw InvalidInput("empty location set");
  std::vector<double> sums(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < locs.cols(); ++j) s += locs(i, j);
    if (!std::isfinite(s))
      throw InvalidInput("order_locations: non-finite coordinate");
    sums[i] = s;
  }
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](int a, int b) {
    if (sums[a] != sums[b]) return sums[a] < sums[b];
    for (Eigen::Index j = 0; j < locs.cols(); ++j)
      if (locs(a, j) != locs(b, j)) return locs(a, j) < locs(b, j);
    return a < b;
  });
  return perm;
}

Matrix dedupe_locations(const Matrix& locs, bool jitter,
                        const std::string& context) {
  Matrix out = locs;
  // Normalize -0.0 so exact-equality maps behave.
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      if (out(i, j) == 0.0) out(i, j) = 0.0;

  double diameter = 0.0;
  for (int j = 0; j < out.cols(); ++j) {
    const double span = out.col(j).maxCoeff() - out.col(j).minCoeff();
    diameter = std::max(diameter, span);
  }
  if (diameter <= 0.0) diameter = 1.0;

  CoordMap seen;
  seen.reserve(out.rows());
  for (int i = 0; i < out.rows(); ++i) {
    CoordKey key = make_key(out, i);
    auto it = seen.find(key);
    while (it != seen.end()) {
      if (!jitter)
        throw InvalidInput(context + ": duplicate location at rows " +
                           std::to_string(it->second) + " and " +
                           std::to_string(i));
      // Deterministic displacement derived from the row index.
      RngStream rs(0xD1CEu, static_cast<std::uint64_t>(i));
      for (int j = 0; j < out.cols(); ++j)
        out(i, j) += 1e-9 * diameter * (2.0 * rs.uniform() - 1.0);
      key = make_key(out, i);
      it = seen.find(key);
    }
    seen.emplace(std::move(key), i);
  }
  return out;
}

void validate_dataset(const FidelityDataset& data, bool jitter) {
  if (data.locations.rows() == 0) throw InvalidInput("empty location set");
  if (data.values.size() != data.locations.rows())
    throw InvalidInput("dataset level " + std::to_string(data.level) +
                       ": values and locations length mismatch");
  if (!data.locations.allFinite() || !data.values.allFinite())
    throw InvalidInput("dataset level " + std::to_string(data.level) +
                       ": non-finite entries");
  dedupe_locations(data.locations, jitter, "dataset level " +
                   std::to_string(data.level));
}

std::vector<AugmentedReferenceSet> augment_reference_sets(
    const std::vector<FidelityDataset>& datasets) {
  const int T = static_cast<int>(datasets.size());
  if (T == 0) throw InvalidInput("augment_reference_sets: no datasets");
  const int d = datasets[0].dim();
  for (const auto& ds : datasets) {
    if (ds.dim() != d)
      throw InvalidInput("augment_reference_sets: inconsistent coordinate "
                         "dimensions across levels");
    if (ds.size() == 0) throw InvalidInput("empty location set");
  }

  std::vector<AugmentedReferenceSet> refsets(T);
  for (int t = 0; t < T; ++t) {
    const int n_own = datasets[t].size();
    CoordMap own = index_by_coords(datasets[t].locations);

    // Extra sites: union of higher-level locations not present at level t,
    // each exactly once, in (level, row) scan order.
    std::vector<std::pair<int, int>> extra;  // (level index, row)
    CoordMap extra_map;
    for (int u = t + 1; u < T; ++u) {
      const Matrix& locs = datasets[u].locations;
      for (int i = 0; i < locs.rows(); ++i) {
        CoordKey key = make_key(locs, i);
        if (own.count(key) || extra_map.count(key)) continue;
        extra_map.emplace(std::move(key), static_cast<int>(extra.size()));
        extra.emplace_back(u, i);
      }
    }

    AugmentedReferenceSet& rs = refsets[t];
    rs.level = t + 1;
    rs.n_own = n_own;
    rs.n_extra = static_cast<int>(extra.size());
    rs.combined.resize(n_own + rs.n_extra, d);
    rs.combined.topRows(n_own) = datasets[t].locations;
    for (int e = 0; e < rs.n_extra; ++e)
      rs.combined.row(n_own + e) =
          datasets[extra[e].first].locations.row(extra[e].second);

    // Index maps: every S_{t'} (t' >= t) resolves into combined.
    rs.level_rows.resize(T - t);
    rs.level_rows[0].resize(n_own);
    for (int i = 0; i < n_own; ++i) rs.level_rows[0][i] = i;
    for (int u = t + 1; u < T; ++u) {
      const Matrix& locs = datasets[u].locations;
      auto& rows = rs.level_rows[u - t];
      rows.resize(locs.rows());
      for (int i = 0; i < locs.rows(); ++i) {
        CoordKey key = make_key(locs, i);
        auto it_own = own.find(key);
        if (it_own != own.end()) {
          rows[i] = it_own->second;
          continue;
        }
        auto it_extra = extra_map.find(key);
        if (it_extra == extra_map.end())
          throw NumericalError("augment_reference_sets: nesting map "
                               "incomplete at level " + std::to_string(u + 1));
        rows[i] = n_own + it_extra->second;
      }
    }
  }
  return refsets;
}

NeighborGraph build_neighbor_graph(const Matrix& locs, int m) {
  if (m < 1) throw InvalidInput("build_neighbor_graph: m must be >= 1");
  NeighborGraph g;
  g.m = m;
  g.order = order_locations(locs);
  const int n = static_cast<int>(g.order.size());
  g.rank.assign(n, 0);
  for (int k = 0; k < n; ++k) g.rank[g.order[k]] = k;

  g.neighbors.resize(n);
  KdTree tree(locs, g.rank);
  #pragma omp parallel for schedule(dynamic, 64)
  for (int k = 0; k < n; ++k) {
    if (k == 0) continue;
    if (k <= m) {
      // All predecessors, nearest first for consistency with the k > m case.
      auto& nb = g.neighbors[k];
      nb = tree.knn(locs.row(g.order[k]).transpose(), k, k);
    } else {
      g.neighbors[k] = tree.knn(locs.row(g.order[k]).transpose(), m, k);
    }
  }
  return g;
}

NeighborGraph build_neighbor_graph(const AugmentedReferenceSet& refset,
                                   int m) {
  return build_neighbor_graph(refset.combined, m);
}

}  // namespace nncgp
