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

/// Static median-split kd-tree over the rows of a point matrix.
///
/// Queries return indices of the k nearest rows by Euclidean distance.
/// An optional per-point rank filter restricts candidates to rows whose
/// rank is below a query threshold, which is what ordered (Vecchia-style)
/// neighbor construction needs.
class KdTree {
 public:
  /// Builds over `points` (n x d). `rank`, when nonempty, assigns each row
  /// an ordering rank used by the `max_rank` filter in knn().
  explicit KdTree(const Matrix& points, std::vector<int> rank = {});

  /// k nearest rows to `query`. Rows with rank >= max_rank are skipped
  /// (pass a negative max_rank to disable the filter). Ties are broken by
  /// smaller row index so results are deterministic.
  std::vector<int> knn(const Eigen::Ref<const Vector>& query, int k,
                       long max_rank = -1) const;

 private:
  struct Node {
    int point = -1;   // row index stored at this node
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<int>& idx, int lo, int hi, int depth);
  void search(int node, const Eigen::Ref<const Vector>& query, int k,
              long max_rank, std::vector<std::pair<double, int>>& heap) const;

  const Matrix points_;
  std::vector<int> rank_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace nncgp
