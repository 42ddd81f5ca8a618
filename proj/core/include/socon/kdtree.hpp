#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace socon {

/// One k-NN answer: squared Euclidean distance and the point's id.
struct Neighbor {
  double dist_sq = std::numeric_limits<double>::infinity();
  std::int64_t id = -1;
};

/**
 * Exact KD-tree over fixed-dimension points with int64 payloads.
 *
 * Nearest-neighbor answers are defined to match a brute-force scan ordered by
 * (distance, id): equal distances are broken by the smaller id. Subtrees are
 * pruned only when the splitting-plane distance strictly exceeds the current
 * k-th best, so equal-distance points are always reachable.
 */
class KdTree {
 public:
  KdTree() = default;

  /// points is row-major, size() == ids.size() * dim.
  KdTree(int dim, std::vector<double> points, std::vector<std::int64_t> ids)
      : dim_(dim), pts_(std::move(points)), ids_(std::move(ids)) {
    if (dim_ < 1) throw std::invalid_argument("KdTree: dim must be >= 1");
    if (pts_.size() != ids_.size() * static_cast<size_t>(dim_))
      throw std::invalid_argument("KdTree: points/ids size mismatch");
    order_.resize(ids_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(ids_.size() * 2 + 1);
    if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()));
  }

  std::size_t size() const { return ids_.size(); }
  int dim() const { return dim_; }

  /**
   * Up to k nearest neighbors of `query`, ascending (distance, id).
   * Points failing `accept` (when set) are skipped but still traversed.
   */
  std::vector<Neighbor> nearest(const double* query, int k,
                                const std::function<bool(std::int64_t)>& accept = {}) const {
    std::vector<Neighbor> best;
    if (k < 1 || order_.empty()) return best;
    best.reserve(static_cast<size_t>(k) + 1);
    if (root_ >= 0) search(root_, query, k, accept, best);
    return best;
  }

 private:
  struct Node {
    int axis = -1;         // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range in order_
  };

  static constexpr int kLeafSize = 16;

  const double* point(int idx) const { return pts_.data() + static_cast<size_t>(idx) * dim_; }

  int build(int begin, int end) {
    Node node;
    if (end - begin <= kLeafSize) {
      node.begin = begin;
      node.end = end;
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    // Split on the axis with the widest spread.
    int axis = 0;
    double best_spread = -1.0;
    for (int d = 0; d < dim_; ++d) {
      double lo = point(order_[begin])[d], hi = lo;
      for (int i = begin + 1; i < end; ++i) {
        const double v = point(order_[i])[d];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        axis = d;
      }
    }
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return point(a)[axis] < point(b)[axis]; });
    node.axis = axis;
    node.split = point(order_[mid])[axis];
    nodes_.push_back(node);
    const int self = static_cast<int>(nodes_.size()) - 1;
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  static bool better(double d_sq, std::int64_t id, const Neighbor& than) {
    return d_sq < than.dist_sq || (d_sq == than.dist_sq && id < than.id);
  }

  void offer(double d_sq, std::int64_t id, int k, std::vector<Neighbor>& best) const {
    if (static_cast<int>(best.size()) == k && !better(d_sq, id, best.back())) return;
    Neighbor n{d_sq, id};
    auto pos = std::upper_bound(best.begin(), best.end(), n, [](const Neighbor& a, const Neighbor& b) {
      return better(a.dist_sq, a.id, b);
    });
    best.insert(pos, n);
    if (static_cast<int>(best.size()) > k) best.pop_back();
  }

  void search(int ni, const double* q, int k, const std::function<bool(std::int64_t)>& accept,
              std::vector<Neighbor>& best) const {
    const Node& node = nodes_[ni];
    if (node.axis < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if (accept && !accept(ids_[idx])) continue;
        double d_sq = 0.0;
        const double* p = point(idx);
        for (int d = 0; d < dim_; ++d) {
          const double diff = q[d] - p[d];
          d_sq += diff * diff;
        }
        offer(d_sq, ids_[idx], k, best);
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, k, accept, best);
    const double worst = static_cast<int>(best.size()) == k
                             ? best.back().dist_sq
                             : std::numeric_limits<double>::infinity();
    if (delta * delta <= worst) search(far, q, k, accept, best);
  }

  int dim_ = 0;
  std::vector<double> pts_;
  std::vector<std::int64_t> ids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace socon
