#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "stackgrasp/geometry.hpp"

namespace stackgrasp {

inline constexpr double kStandardGravity = 9.81;

// Procedural brick stack on a regular grid. Bricks are laid with their
// long axis along world X, layer 0 resting on the z = 0 ground plane.
struct StackSpec {
  std::array<int, 3> grid{3, 3, 3};
  Vec3 brick_size{0.24, 0.115, 0.071};
  // Horizontal clearance between neighboring grid cells. Zero gives a
  // perfectly tight stack where neighbors touch face to face.
  double gap = 0.0;
  double jitter_translation = 0.0;  // std-dev, meters, horizontal only
  double jitter_yaw = 0.0;          // std-dev, radians
  double removal_probability = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Object->world poses of the generated bricks, deterministic in spec.seed.
// Removal proceeds top-down per column so no brick is left floating; at least
// one brick always remains. Throws ErrorKind::kInfeasibleJitter when a brick
// cannot be placed without overlap after 100 resampling attempts.
std::vector<Pose> generate_stack(const StackSpec &spec);

// Camera->world pose on the spherical shell segment around scene_center,
// uniform in volume, looking at the center with a random roll of at most
// `max_roll` radians. Camera axes follow the x-right, y-down, z-forward
// convention.
Pose sample_camera(const Vec3 &scene_center,
                   std::pair<double, double> radius_range,
                   std::pair<double, double> elevation_range,
                   std::uint64_t seed, double max_roll = 15.0 * M_PI / 180.0);

// Identity rotation, 1 cm offset along camera x.
Pose default_imu_extrinsic();

// Accelerometer reading at rest, expressed in the sensor frame.
Vec3 synth_imu(const Pose &camera_to_world, const Pose &camera_to_sensor,
               double noise_std, std::uint64_t seed);

struct SceneGroundTruth {
  std::vector<Pose> object_poses;  // object -> world
  Pose camera_pose{Frame::kCamera, Frame::kWorld};
  CameraIntrinsics intrinsics;
  Vec3 imu_accel{0.0, 0.0, -kStandardGravity};
  Pose imu_extrinsic = default_imu_extrinsic();  // camera -> sensor
  std::vector<bool> graspable;

  Pose object_to_camera(std::size_t i) const;
};

// Hull of the brick boxes; used to aim the camera and to place clutter.
Box3 scene_bounds(const std::vector<Pose> &object_poses,
                  const ObjectModel &model);

}  // namespace stackgrasp
