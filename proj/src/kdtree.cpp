#include "stackgrasp/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

KdTree::KdTree(std::span<const Vec3> points)
    : points_(points.begin(), points.end()) {
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  nodes_.reserve(points_.size());
  root_ = build(order, 0, order.size(), 0);
}

int KdTree::build(std::vector<std::size_t> &order, std::size_t lo,
                  std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  // Split on the axis of largest spread.
  Vec3 mn = points_[order[lo]], mx = mn;
  for (std::size_t i = lo; i < hi; ++i) {
    mn = mn.cwiseMin(points_[order[i]]);
    mx = mx.cwiseMax(points_[order[i]]);
  }
  int axis = 0;
  (mx - mn).maxCoeff(&axis);
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(order.begin() + lo, order.begin() + mid, order.begin() + hi,
                   [&](std::size_t a, std::size_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({order[mid], axis, -1, -1, mn, mx});
  const int left = build(order, lo, mid, depth + 1);
  const int right = build(order, mid + 1, hi, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::size_t> KdTree::radius_search(const Vec3 &query,
                                               double radius) const {
  std::vector<std::size_t> out;
  if (radius < 0.0) return out;
  radius_search(root_, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_search(int node, const Vec3 &query, double radius_sq,
                           std::vector<std::size_t> &out) const {
  if (node < 0) return;
  const Node &n = nodes_[node];
  const Vec3 &p = points_[n.point];
  if ((p - query).squaredNorm() <= radius_sq) out.push_back(n.point);
  const double diff = query[n.axis] - p[n.axis];
  const int near = diff <= 0.0 ? n.left : n.right;
  const int far = diff <= 0.0 ? n.right : n.left;
  radius_search(near, query, radius_sq, out);
  if (diff * diff <= radius_sq) radius_search(far, query, radius_sq, out);
}

std::pair<std::size_t, double> KdTree::nearest(const Vec3 &query) const {
  if (root_ < 0) {
    throw Error(ErrorKind::kInvalidArgument, "nearest query on an empty tree");
  }
  std::size_t best = nodes_[root_].point;
  double best_sq = std::numeric_limits<double>::infinity();
  nearest(root_, query, best, best_sq);
  return {best, best_sq};
}

double KdTree::box_distance_sq(const Node &n, const Vec3 &query) const {
  const Vec3 gap = (n.lo - query).cwiseMax(query - n.hi).cwiseMax(0.0);
  return gap.squaredNorm();
}

void KdTree::nearest(int node, const Vec3 &query, std::size_t &best,
                     double &best_sq) const {
  if (node < 0) return;
  const Node &n = nodes_[node];
  // Equal distances still have to be visited for the lower-index tie rule.
  if (box_distance_sq(n, query) > best_sq) return;
  const Vec3 &p = points_[n.point];
  const double d = (p - query).squaredNorm();
  if (d < best_sq || (d == best_sq && n.point < best)) {
    best_sq = d;
    best = n.point;
  }
  const double diff = query[n.axis] - p[n.axis];
  const int near = diff <= 0.0 ? n.left : n.right;
  const int far = diff <= 0.0 ? n.right : n.left;
  nearest(near, query, best, best_sq);
  if (diff * diff <= best_sq) nearest(far, query, best, best_sq);
}

}  // namespace stackgrasp
