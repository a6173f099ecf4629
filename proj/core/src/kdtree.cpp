/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/kdtree.hpp"

#include <algorithm>
#include <cmath>

namespace nncgp {

namespace {

// Max-heap entries are (distance², row index); ties prefer the smaller
// index so query results do not depend on traversal order.
inline bool heap_less(const std::pair<double, int>& a,
                      const std::pair<double, int>& b) {
  if (a.first != b.first) return a.first < b.first;
  return a.second > b.second;
}

}  // namespace

KdTree::KdTree(const Matrix& points, std::vector<int> rank)
    : points_(points), rank_(std::move(rank)) {
  const int n = static_cast<int>(points_.rows());
  if (n == 0) throw InvalidInput("KdTree: empty point set");
  if (!rank_.empty() && static_cast<int>(rank_.size()) != n)
    throw InvalidInput("KdTree: rank vector size mismatch");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  nodes_.reserve(n);
  root_ = build(idx, 0, n, 0);
}

int KdTree::build(std::vector<int>& idx, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % static_cast<int>(points_.cols());
  const int mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](int a, int b) {
                     if (points_(a, axis) != points_(b, axis))
                       return points_(a, axis) < points_(b, axis);
                     return a < b;
                   });
  Node node;
  node.point = idx[mid];
  node.axis = axis;
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  const int left = build(idx, lo, mid, depth + 1);
  const int right = build(idx, mid + 1, hi, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void KdTree::search(int node, const Eigen::Ref<const Vector>& query, int k,
                    long max_rank,
                    std::vector<std::pair<double, int>>& heap) const {
  if (node < 0) return;
  const Node& nd = nodes_[node];
  const int p = nd.point;
  const bool admissible =
      rank_.empty() || max_rank < 0 || rank_[p] < max_rank;
  if (admissible) {
    const double d2 = (points_.row(p).transpose() - query).squaredNorm();
    std::pair<double, int> cand(d2, p);
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), heap_less);
    } else if (heap_less(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), heap_less);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), heap_less);
    }
  }
  const double diff = query[nd.axis] - points_(p, nd.axis);
  const int near = diff < 0 ? nd.left : nd.right;
  const int far = diff < 0 ? nd.right : nd.left;
  search(near, query, k, max_rank, heap);
  if (static_cast<int>(heap.size()) < k || diff * diff < heap.front().first ||
      (diff * diff == heap.front().first))
    search(far, query, k, max_rank, heap);
}

std::vector<int> KdTree::knn(const Eigen::Ref<const Vector>& query, int k,
                             long max_rank) const {
  if (k < 0) throw InvalidInput("KdTree::knn: k must be nonnegative");
  std::vector<std::pair<double, int>> heap;
  heap.reserve(k + 1);
  if (k > 0) search(root_, query, k, max_rank, heap);
  std::sort(heap.begin(), heap.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  out.reserve(heap.size());
  for (const auto& [d2, i] : heap) out.push_back(i);
  return out;
}

}  // namespace nncgp
