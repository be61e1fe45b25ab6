#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stackgrasp/geometry.hpp"
#include "stackgrasp/kdtree.hpp"

namespace stackgrasp {

enum class Direction : std::uint8_t { kPosX, kNegX, kPosY, kNegY, kPosZ, kNegZ };

inline constexpr std::array<Direction, 6> kAllDirections = {
    Direction::kPosX, Direction::kNegX, Direction::kPosY,
    Direction::kNegY, Direction::kPosZ, Direction::kNegZ};

Vec3 unit_vector(Direction d);
std::string_view to_string(Direction d);

class DirectionSet {
 public:
  constexpr DirectionSet() = default;
  constexpr DirectionSet(std::initializer_list<Direction> dirs) {
    for (Direction d : dirs) insert(d);
  }

  constexpr void insert(Direction d) { bits_ |= bit(d); }
  constexpr bool contains(Direction d) const { return (bits_ & bit(d)) != 0; }
  int size() const { return __builtin_popcount(bits_); }
  std::uint8_t bits() const { return bits_; }

  // e.g. "+X,-Y,+Z"
  std::string str() const;

  friend constexpr bool operator==(DirectionSet, DirectionSet) = default;

 private:
  static constexpr std::uint8_t bit(Direction d) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  std::uint8_t bits_ = 0;
};

// Removal rule: at least four free directions, or exactly three consisting
// of +Z, one of +/-X and one of +/-Y.
bool is_graspable(DirectionSet missing);

struct GraspLabel {
  std::size_t object_index = 0;
  bool graspable = false;
  DirectionSet missing_directions;
};

// KD-tree over box centers with the neighbor query radius used by the
// shifted-box test.
class SpatialIndex {
 public:
  SpatialIndex(std::vector<Vec3> centers, double query_radius);

  const std::vector<Vec3> &centers() const { return tree_.points(); }
  double query_radius() const { return query_radius_; }

  std::vector<std::size_t> query(const Vec3 &point, double radius) const {
    return tree_.radius_search(point, radius);
  }
  std::vector<std::size_t> query(const Vec3 &point) const {
    return query(point, query_radius_);
  }

 private:
  KdTree tree_;
  double query_radius_;
};

// Query radius is 1.5x the largest box diagonal in the scene.
SpatialIndex build_index(std::span<const Box3> boxes);

// Directions in which box i, shifted by its own extent along that axis,
// overlaps none of its indexed neighbors.
DirectionSet missing_directions(std::size_t i, std::span<const Box3> boxes,
                                const SpatialIndex &index);

// Labels every object of a scene. Directions are evaluated in the stack frame
// obtained by rotating world coordinates with `stack_alignment`.
std::vector<GraspLabel> label_scene(std::span<const Pose> object_to_world,
                                    const ObjectModel &model,
                                    const Mat3 &stack_alignment = Mat3::Identity());

}  // namespace stackgrasp
