#include "stackgrasp/graspability.hpp"

#include <algorithm>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

Vec3 unit_vector(Direction d) {
  switch (d) {
    case Direction::kPosX: return Vec3::UnitX();
    case Direction::kNegX: return -Vec3::UnitX();
    case Direction::kPosY: return Vec3::UnitY();
    case Direction::kNegY: return -Vec3::UnitY();
    case Direction::kPosZ: return Vec3::UnitZ();
    case Direction::kNegZ: return -Vec3::UnitZ();
  }
  return Vec3::Zero();
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kPosX: return "+X";
    case Direction::kNegX: return "-X";
    case Direction::kPosY: return "+Y";
    case Direction::kNegY: return "-Y";
    case Direction::kPosZ: return "+Z";
    case Direction::kNegZ: return "-Z";
  }
  return "?";
}

std::string DirectionSet::str() const {
  std::string out;
  for (Direction d : kAllDirections) {
    if (!contains(d)) continue;
    if (!out.empty()) out += ',';
    out += to_string(d);
  }
  return out;
}

bool is_graspable(DirectionSet missing) {
  const int n = missing.size();
  if (n >= 4) return true;
  if (n != 3) return false;
  return missing.contains(Direction::kPosZ) &&
         (missing.contains(Direction::kPosX) ||
          missing.contains(Direction::kNegX)) &&
         (missing.contains(Direction::kPosY) ||
          missing.contains(Direction::kNegY));
}

SpatialIndex::SpatialIndex(std::vector<Vec3> centers, double query_radius)
    : tree_(centers), query_radius_(query_radius) {}

SpatialIndex build_index(std::span<const Box3> boxes) {
  if (boxes.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot index an empty box set");
  }
  std::vector<Vec3> centers;
  centers.reserve(boxes.size());
  double max_diagonal = 0.0;
  for (const Box3 &b : boxes) {
    centers.push_back(b.center());
    max_diagonal = std::max(max_diagonal, b.size().norm());
  }
  return SpatialIndex(std::move(centers), 1.5 * max_diagonal);
}

DirectionSet missing_directions(std::size_t i, std::span<const Box3> boxes,
                                const SpatialIndex &index) {
  if (i >= boxes.size()) {
    throw Error(ErrorKind::kInvalidArgument, "object index out of range");
  }
  const Box3 &box = boxes[i];
  const Vec3 size = box.size();
  DirectionSet missing;
  for (Direction d : kAllDirections) {
    const Vec3 offset = size.cwiseProduct(unit_vector(d));
    const Box3 moved = box.shifted(offset);
    bool occupied = false;
    for (std::size_t j : index.query(moved.center())) {
      if (j != i && boxes_overlap(moved, boxes[j])) {
        occupied = true;
        break;
      }
    }
    if (!occupied) missing.insert(d);
  }
  return missing;
}

std::vector<GraspLabel> label_scene(std::span<const Pose> object_to_world,
                                    const ObjectModel &model,
                                    const Mat3 &stack_alignment) {
  std::vector<GraspLabel> labels;
  if (object_to_world.empty()) return labels;
  std::vector<Box3> boxes;
  boxes.reserve(object_to_world.size());
  for (const Pose &p : object_to_world) {
    boxes.push_back(bbox_corners(model, p, stack_alignment));
  }
  const SpatialIndex index = build_index(boxes);
  labels.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const DirectionSet missing = missing_directions(i, boxes, index);
    labels.push_back({i, is_graspable(missing), missing});
  }
  return labels;
}

}  // namespace stackgrasp
