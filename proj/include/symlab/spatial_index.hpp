// Static k-d tree over the columns of a d x N position matrix.
#pragma once

#include "symlab/core.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace symlab {

template <typename Scalar>
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(const Matrix<Scalar>& positions) : points_(&positions) {
    const auto n = static_cast<int>(positions.cols());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    if (n > 0) {
      nodes_.reserve(2 * static_cast<std::size_t>(n) / kLeafSize + 2);
      build(0, n);
    }
  }

  /// Indices of points p with |p - center| < radius, in ascending index order.
  std::vector<int> ball(const Vector<Scalar>& center, Scalar radius) const {
    std::vector<int> out;
    if (!nodes_.empty()) query(0, center, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Index of the nearest point and its distance; (-1, inf) when empty.
  std::pair<int, Scalar> nearest(const Vector<Scalar>& target) const {
    int best = -1;
    Scalar best_sq = std::numeric_limits<Scalar>::infinity();
    if (!nodes_.empty()) nearest(0, target, best, best_sq);
    return {best, std::sqrt(best_sq)};
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    int begin = 0;
    int end = 0;
    int left = -1;
    int right = -1;
    Vector<Scalar> lo;
    Vector<Scalar> hi;
  };

  int build(int begin, int end) {
    const Matrix<Scalar>& pts = *points_;
    const auto d = pts.rows();
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo = Vector<Scalar>::Constant(d, std::numeric_limits<Scalar>::infinity());
    node.hi = Vector<Scalar>::Constant(d, -std::numeric_limits<Scalar>::infinity());
    for (int i = begin; i < end; ++i) {
      node.lo = node.lo.cwiseMin(pts.col(order_[i]));
      node.hi = node.hi.cwiseMax(pts.col(order_[i]));
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin > kLeafSize) {
      Eigen::Index axis = 0;
      (node.hi - node.lo).maxCoeff(&axis);
      const int mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](int a, int b) { return pts(axis, a) < pts(axis, b); });
      const int l = build(begin, mid);
      const int r = build(mid, end);
      nodes_[id].left = l;
      nodes_[id].right = r;
    }
    return id;
  }

  Scalar box_distance_sq(const Node& node, const Vector<Scalar>& c) const {
    Scalar acc = 0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      const Scalar below = node.lo(k) - c(k);
      const Scalar above = c(k) - node.hi(k);
      const Scalar gap = std::max<Scalar>({below, above, Scalar(0)});
      acc += gap * gap;
    }
    return acc;
  }

  void query(int id, const Vector<Scalar>& c, Scalar r2, std::vector<int>& out) const {
    const Node& node = nodes_[id];
    if (box_distance_sq(node, c) >= r2) return;
    if (node.left < 0) {
      const Matrix<Scalar>& pts = *points_;
      for (int i = node.begin; i < node.end; ++i) {
        const int j = order_[i];
        if ((pts.col(j) - c).squaredNorm() < r2) out.push_back(j);
      }
      return;
    }
    query(node.left, c, r2, out);
    query(node.right, c, r2, out);
  }

  void nearest(int id, const Vector<Scalar>& c, int& best, Scalar& best_sq) const {
    const Node& node = nodes_[id];
    if (box_distance_sq(node, c) >= best_sq) return;
    if (node.left < 0) {
      const Matrix<Scalar>& pts = *points_;
      for (int i = node.begin; i < node.end; ++i) {
        const int j = order_[i];
        const Scalar dsq = (pts.col(j) - c).squaredNorm();
        if (dsq < best_sq || (dsq == best_sq && j < best)) {
          best_sq = dsq;
          best = j;
        }
      }
      return;
    }
    const bool left_first = box_distance_sq(nodes_[node.left], c) <= box_distance_sq(nodes_[node.right], c);
    nearest(left_first ? node.left : node.right, c, best, best_sq);
    nearest(left_first ? node.right : node.left, c, best, best_sq);
  }

  const Matrix<Scalar>* points_ = nullptr;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace symlab
