#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace stackgrasp {

class KdTree;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Frame { kWorld, kCamera, kSensor, kObject };

std::string_view to_string(Frame frame);

// Tolerance used when validating rotation matrices handed to Pose.
inline constexpr double kRotationTolerance = 1e-6;

// Largest absolute entry of R^T R - I.
double orthonormality_error(const Mat3 &rotation);

// Closest proper rotation in the Frobenius sense (SVD projection).
Mat3 nearest_rotation(const Mat3 &m);

Mat3 rot_x(double radians);
Mat3 rot_y(double radians);
Mat3 rot_z(double radians);

// Rotation by |axis_angle| radians about axis_angle / |axis_angle|.
Mat3 rotation_from_axis_angle(const Vec3 &axis_angle);

// Rigid transform mapping coordinates expressed in `from` into `to`:
// x_to = R * x_from + t.
class Pose {
 public:
  Pose(Frame from, Frame to);
  Pose(const Mat3 &rotation, const Vec3 &translation, Frame from, Frame to);

  const Mat3 &rotation() const { return rotation_; }
  const Vec3 &translation() const { return translation_; }
  Frame from() const { return from_; }
  Frame to() const { return to_; }

  Pose inverse() const;
  Vec3 operator()(const Vec3 &point) const {
    return rotation_ * point + translation_;
  }

  // Same transform with different frame tags.
  Pose retagged(Frame from, Frame to) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
  Frame from_;
  Frame to_;
};

// a after b. Requires a.from() == b.to(); throws ErrorKind::kFrameMismatch.
Pose compose(const Pose &a, const Pose &b);
inline Pose operator*(const Pose &a, const Pose &b) { return compose(a, b); }

std::vector<Vec3> transform_points(const Pose &pose,
                                   std::span<const Vec3> points);

struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  // Throws ErrorKind::kInvalidArgument when the invariants do not hold.
  void validate() const;
};

// Pinhole projection. std::nullopt signals a point on or behind the image
// plane (z <= 0); that is a regular outcome, not an error.
std::optional<Vec2> project(const CameraIntrinsics &intrinsics,
                            const Vec3 &point_camera);

// Triangle mesh plus sampled surface points of a rigid object.
class ObjectModel {
 public:
  using TriangleIndices = std::array<int, 3>;

  ObjectModel(std::vector<Vec3> surface_points, std::vector<Vec3> vertices,
              std::vector<TriangleIndices> triangles,
              std::vector<Mat3> symmetries);

  // 12-triangle cuboid with `n_points` deterministic surface samples (the 8
  // corners are always included). The origin is either the cuboid center or
  // its minimum corner.
  enum class Origin { kCenter, kMinCorner };
  static ObjectModel cuboid(const Vec3 &size, int n_points = 512,
                            Origin origin = Origin::kCenter);
  static ObjectModel cuboid(const Vec3 &size, int n_points, Origin origin,
                            std::vector<Mat3> symmetries);

  // {I, rotZ(180deg)}
  static std::vector<Mat3> default_symmetries();

  const std::vector<Vec3> &surface_points() const { return surface_points_; }
  const std::vector<Vec3> &vertices() const { return vertices_; }
  const std::vector<TriangleIndices> &triangles() const { return triangles_; }
  const std::vector<Mat3> &symmetries() const { return symmetries_; }
  double diameter() const { return diameter_; }
  // KD-tree over the surface points in the object frame.
  const KdTree &point_index() const { return *point_index_; }

 private:
  std::vector<Vec3> surface_points_;
  std::vector<Vec3> vertices_;
  std::vector<TriangleIndices> triangles_;
  std::vector<Mat3> symmetries_;
  double diameter_ = 0.0;
  std::shared_ptr<const KdTree> point_index_;
};

// Two intervals closer than this are treated as touching, not overlapping.
inline constexpr double kContactTolerance = 1e-9;

// Axis-aligned box. Corners are enumerated with bit k of the corner index
// selecting max (1) or min (0) along axis k.
struct Box3 {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  static Box3 hull(std::span<const Vec3> points);

  std::array<Vec3, 8> corners() const;
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 size() const { return max - min; }
  Box3 shifted(const Vec3 &offset) const { return {min + offset, max + offset}; }
};

// Axis-aligned hull of the model's surface points under an object->world pose.
Box3 bbox_corners(const ObjectModel &model, const Pose &object_to_world);

// Same as bbox_corners but with the hull taken in a frame rotated by
// `alignment` (world -> stack frame).
Box3 bbox_corners(const ObjectModel &model, const Pose &object_to_world,
                  const Mat3 &alignment);

// Positive-volume intersection. Face or edge contact does not count.
bool boxes_overlap(const Box3 &a, const Box3 &b);

}  // namespace stackgrasp
