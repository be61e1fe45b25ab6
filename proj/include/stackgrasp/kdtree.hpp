#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "stackgrasp/geometry.hpp"

namespace stackgrasp {

// Static 3-d tree over a point set. Built once, then read-only.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3> &points() const { return points_; }

  // Indices of all points with |p - query| <= radius, ascending.
  std::vector<std::size_t> radius_search(const Vec3 &query, double radius) const;

  // (index, squared distance) of the closest point. Tree must be nonempty.
  std::pair<std::size_t, double> nearest(const Vec3 &query) const;

 private:
  struct Node {
    std::size_t point = 0;
    int axis = 0;
    int left = -1;
    int right = -1;
    Vec3 lo = Vec3::Zero();  // bounds of the subtree
    Vec3 hi = Vec3::Zero();
  };

  int build(std::vector<std::size_t> &order, std::size_t lo, std::size_t hi,
            int depth);
  void radius_search(int node, const Vec3 &query, double radius_sq,
                     std::vector<std::size_t> &out) const;
  void nearest(int node, const Vec3 &query, std::size_t &best,
               double &best_sq) const;
  double box_distance_sq(const Node &n, const Vec3 &query) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace stackgrasp
