#include "stackgrasp/scene.hpp"

#include <cmath>

#include <fmt/format.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/random.hpp"

namespace stackgrasp {

namespace {

constexpr int kMaxPlacementAttempts = 100;

Box3 brick_box(const Vec3 &center, double yaw, const Vec3 &size) {
  const double c = std::abs(std::cos(yaw));
  const double s = std::abs(std::sin(yaw));
  const Vec3 half(0.5 * (c * size.x() + s * size.y()),
                  0.5 * (s * size.x() + c * size.y()), 0.5 * size.z());
  return {center - half, center + half};
}

}  // namespace

void StackSpec::validate() const {
  for (int n : grid) {
    if (n < 1) {
      throw Error(ErrorKind::kInvalidArgument, "stack grid counts must be >= 1");
    }
  }
  if (!(brick_size.array() > 0.0).all()) {
    throw Error(ErrorKind::kInvalidArgument, "brick size must be positive");
  }
  if (gap < 0.0 || jitter_translation < 0.0 || jitter_yaw < 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "gap and jitter must be non-negative");
  }
  if (!(removal_probability >= 0.0 && removal_probability <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "removal probability must lie in [0, 1]");
  }
}

std::vector<Pose> generate_stack(const StackSpec &spec) {
  spec.validate();
  const auto [nx, ny, nz] = spec.grid;
  Rng rng(spec.seed);

  std::vector<int> column_height(static_cast<std::size_t>(nx) * ny, nz);
  int total = 0;
  for (int &h : column_height) {
    while (h > 0 && spec.removal_probability > 0.0 &&
           rng.bernoulli(spec.removal_probability)) {
      --h;
    }
    total += h;
  }
  if (total == 0) column_height.front() = 1;

  const double pitch_x = spec.brick_size.x() + spec.gap;
  const double pitch_y = spec.brick_size.y() + spec.gap;
  const bool jittered = spec.jitter_translation > 0.0 || spec.jitter_yaw > 0.0;

  std::vector<Pose> poses;
  std::vector<Box3> boxes;
  for (int iz = 0; iz < nz; ++iz) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        if (column_height[static_cast<std::size_t>(iy) * nx + ix] <= iz) continue;
        const Vec3 cell((ix - 0.5 * (nx - 1)) * pitch_x,
                        (iy - 0.5 * (ny - 1)) * pitch_y,
                        (iz + 0.5) * spec.brick_size.z());
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed;
             ++attempt) {
          Vec3 center = cell;
          double yaw = 0.0;
          if (jittered) {
            center.x() += rng.normal(0.0, spec.jitter_translation);
            center.y() += rng.normal(0.0, spec.jitter_translation);
            yaw = rng.normal(0.0, spec.jitter_yaw);
          }
          const Box3 box = brick_box(center, yaw, spec.brick_size);
          bool clash = false;
          for (const Box3 &other : boxes) {
            if (boxes_overlap(box, other)) {
              clash = true;
              break;
            }
          }
          if (clash) {
            if (!jittered) break;
            continue;
          }
          poses.emplace_back(rot_z(yaw), center, Frame::kObject, Frame::kWorld);
          boxes.push_back(box);
          placed = true;
        }
        if (!placed) {
          throw Error(ErrorKind::kInfeasibleJitter,
                      fmt::format("brick ({}, {}, {}) overlaps its neighbors "
                                  "after {} placement attempts",
                                  ix, iy, iz, kMaxPlacementAttempts));
        }
      }
    }
  }
  return poses;
}

Pose sample_camera(const Vec3 &scene_center,
                   std::pair<double, double> radius_range,
                   std::pair<double, double> elevation_range,
                   std::uint64_t seed, double max_roll) {
  const auto [r_min, r_max] = radius_range;
  const auto [e_min, e_max] = elevation_range;
  if (!(r_min > 0.0 && r_min <= r_max)) {
    throw Error(ErrorKind::kInvalidArgument,
                "camera radius range must satisfy 0 < min <= max");
  }
  if (!(e_min <= e_max && e_min > -M_PI / 2 && e_max < M_PI / 2)) {
    throw Error(ErrorKind::kInvalidArgument,
                "camera elevation range must lie strictly inside (-90, 90) deg");
  }
  Rng rng(seed);
  const double r3_min = r_min * r_min * r_min;
  const double r3_max = r_max * r_max * r_max;
  const double radius = std::cbrt(rng.uniform(r3_min, r3_max));
  const double elevation =
      std::asin(rng.uniform(std::sin(e_min), std::sin(e_max)));
  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  const double roll = rng.uniform(-max_roll, max_roll);

  const Vec3 position =
      scene_center + radius * Vec3(std::cos(elevation) * std::cos(azimuth),
                                   std::cos(elevation) * std::sin(azimuth),
                                   std::sin(elevation));
  const Vec3 forward = (scene_center - position).normalized();
  const Vec3 right = forward.cross(Vec3::UnitZ()).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(r * rot_z(roll), position, Frame::kCamera, Frame::kWorld);
}

Pose default_imu_extrinsic() {
  return Pose(Mat3::Identity(), Vec3(0.01, 0.0, 0.0), Frame::kCamera,
              Frame::kSensor);
}

Vec3 synth_imu(const Pose &camera_to_world, const Pose &camera_to_sensor,
               double noise_std, std::uint64_t seed) {
  if (noise_std < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "IMU noise must be non-negative");
  }
  const Pose world_to_sensor = camera_to_sensor * camera_to_world.inverse();
  Vec3 accel = world_to_sensor.rotation() * Vec3(0.0, 0.0, -kStandardGravity);
  if (noise_std > 0.0) {
    Rng rng(seed);
    for (int k = 0; k < 3; ++k) accel[k] += rng.normal(0.0, noise_std);
  }
  return accel;
}

Pose SceneGroundTruth::object_to_camera(std::size_t i) const {
  return camera_pose.inverse() * object_poses.at(i);
}

Box3 scene_bounds(const std::vector<Pose> &object_poses,
                  const ObjectModel &model) {
  if (object_poses.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "scene has no objects");
  }
  Box3 out = bbox_corners(model, object_poses.front());
  for (const Pose &p : object_poses) {
    const Box3 b = bbox_corners(model, p);
    out.min = out.min.cwiseMin(b.min);
    out.max = out.max.cwiseMax(b.max);
  }
  return out;
}

}  // namespace stackgrasp
