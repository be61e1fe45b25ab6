#include "stackgrasp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/kdtree.hpp"

namespace stackgrasp {

std::string_view to_string(Frame frame) {
  switch (frame) {
    case Frame::kWorld: return "world";
    case Frame::kCamera: return "camera";
    case Frame::kSensor: return "sensor";
    case Frame::kObject: return "object";
  }
  return "unknown";
}

double orthonormality_error(const Mat3 &rotation) {
  return (rotation.transpose() * rotation - Mat3::Identity())
      .cwiseAbs()
      .maxCoeff();
}

Mat3 nearest_rotation(const Mat3 &m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Mat3 rot_x(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitX()).toRotationMatrix();
}

Mat3 rot_y(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitY()).toRotationMatrix();
}

Mat3 rot_z(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 rotation_from_axis_angle(const Vec3 &axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Pose::Pose(Frame from, Frame to)
    : rotation_(Mat3::Identity()),
      translation_(Vec3::Zero()),
      from_(from),
      to_(to) {}

Pose::Pose(const Mat3 &rotation, const Vec3 &translation, Frame from, Frame to)
    : rotation_(rotation), translation_(translation), from_(from), to_(to) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "pose contains non-finite values");
  }
  const double err = orthonormality_error(rotation);
  if (err > kRotationTolerance || rotation.determinant() < 0.0) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("rotation is not a proper rotation "
                            "(orthonormality error {:.3g}, det {:.6f})",
                            err, rotation.determinant()));
  }
}

Pose Pose::inverse() const {
  Pose inv(to_, from_);
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

Pose Pose::retagged(Frame from, Frame to) const {
  Pose p = *this;
  p.from_ = from;
  p.to_ = to;
  return p;
}

Pose compose(const Pose &a, const Pose &b) {
  if (a.from() != b.to()) {
    throw Error(ErrorKind::kFrameMismatch,
                fmt::format("cannot compose {}->{} after {}->{}",
                            to_string(a.from()), to_string(a.to()),
                            to_string(b.from()), to_string(b.to())));
  }
  return Pose(a.rotation() * b.rotation(),
              a.rotation() * b.translation() + a.translation(), b.from(),
              a.to());
}

std::vector<Vec3> transform_points(const Pose &pose,
                                   std::span<const Vec3> points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3 &p : points) out.push_back(pose(p));
  return out;
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw Error(ErrorKind::kInvalidArgument,
                "principal point must lie inside the image");
  }
}

std::optional<Vec2> project(const CameraIntrinsics &k, const Vec3 &p) {
  if (p.z() <= 0.0) return std::nullopt;
  return Vec2(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

namespace {

void validate_symmetries(const std::vector<Mat3> &symmetries) {
  bool has_identity = false;
  for (const Mat3 &s : symmetries) {
    if (orthonormality_error(s) > kRotationTolerance || s.determinant() < 0.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "symmetry transforms must be proper rotations");
    }
    if ((s - Mat3::Identity()).cwiseAbs().maxCoeff() < kRotationTolerance) {
      has_identity = true;
    }
  }
  if (!has_identity) {
    throw Error(ErrorKind::kInvalidArgument,
                "symmetry set must contain the identity");
  }
}

double max_pairwise_distance(const std::vector<Vec3> &points) {
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::max(best, (points[i] - points[j]).squaredNorm());
    }
  }
  return std::sqrt(best);
}

// Portable uniform double in [0, 1) from a 64-bit engine.
double unit_uniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ObjectModel::ObjectModel(std::vector<Vec3> surface_points,
                         std::vector<Vec3> vertices,
                         std::vector<TriangleIndices> triangles,
                         std::vector<Mat3> symmetries)
    : surface_points_(std::move(surface_points)),
      vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      symmetries_(std::move(symmetries)) {
  if (surface_points_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "model has no surface points");
  }
  for (const TriangleIndices &tri : triangles_) {
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "triangle references a missing vertex");
      }
    }
  }
  validate_symmetries(symmetries_);
  diameter_ = max_pairwise_distance(surface_points_);
  point_index_ = std::make_shared<const KdTree>(surface_points_);
}

std::vector<Mat3> ObjectModel::default_symmetries() {
  // Written out so the half turn is exact.
  return {Mat3::Identity(), Vec3(-1.0, -1.0, 1.0).asDiagonal().toDenseMatrix()};
}

ObjectModel ObjectModel::cuboid(const Vec3 &size, int n_points, Origin origin) {
  return cuboid(size, n_points, origin, default_symmetries());
}

ObjectModel ObjectModel::cuboid(const Vec3 &size, int n_points, Origin origin,
                                std::vector<Mat3> symmetries) {
  if (!(size.array() > 0.0).all()) {
    throw Error(ErrorKind::kInvalidArgument, "cuboid size must be positive");
  }
  if (n_points < 8) {
    throw Error(ErrorKind::kInvalidArgument,
                "cuboid needs at least 8 surface points");
  }
  const Vec3 lo = origin == Origin::kCenter ? Vec3(-0.5 * size) : Vec3::Zero();
  const Vec3 hi = lo + size;

  std::vector<Vec3> vertices(8);
  for (int c = 0; c < 8; ++c) {
    vertices[c] = Vec3((c & 1) ? hi.x() : lo.x(), (c & 2) ? hi.y() : lo.y(),
                       (c & 4) ? hi.z() : lo.z());
  }
  // Two triangles per face, outward winding.
  std::vector<TriangleIndices> triangles = {
      {0, 2, 3}, {0, 3, 1},  // -Z
      {4, 5, 7}, {4, 7, 6},  // +Z
      {0, 1, 5}, {0, 5, 4},  // -Y
      {2, 6, 7}, {2, 7, 3},  // +Y
      {0, 4, 6}, {0, 6, 2},  // -X
      {1, 3, 7}, {1, 7, 5},  // +X
  };

  std::vector<Vec3> points(vertices.begin(), vertices.end());
  const double area_xy = size.x() * size.y();
  const double area_xz = size.x() * size.z();
  const double area_yz = size.y() * size.z();
  const double total = 2.0 * (area_xy + area_xz + area_yz);
  std::mt19937_64 rng(0x5eed'b01d'c0ffeeULL);
  while (static_cast<int>(points.size()) < n_points) {
    const double pick = unit_uniform(rng) * total;
    const double a = unit_uniform(rng);
    const double b = unit_uniform(rng);
    const bool upper = unit_uniform(rng) < 0.5;
    Vec3 p;
    if (pick < 2.0 * area_xy) {
      p = Vec3(lo.x() + a * size.x(), lo.y() + b * size.y(),
               upper ? hi.z() : lo.z());
    } else if (pick < 2.0 * (area_xy + area_xz)) {
      p = Vec3(lo.x() + a * size.x(), upper ? hi.y() : lo.y(),
               lo.z() + b * size.z());
    } else {
      p = Vec3(upper ? hi.x() : lo.x(), lo.y() + a * size.y(),
               lo.z() + b * size.z());
    }
    points.push_back(p);
  }
  return ObjectModel(std::move(points), std::move(vertices),
                     std::move(triangles), std::move(symmetries));
}

Box3 Box3::hull(std::span<const Vec3> points) {
  if (points.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "hull of an empty point set");
  }
  Box3 box{points.front(), points.front()};
  for (const Vec3 &p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

std::array<Vec3, 8> Box3::corners() const {
  std::array<Vec3, 8> out;
  for (int c = 0; c < 8; ++c) {
    out[c] = Vec3((c & 1) ? max.x() : min.x(), (c & 2) ? max.y() : min.y(),
                  (c & 4) ? max.z() : min.z());
  }
  return out;
}

Box3 bbox_corners(const ObjectModel &model, const Pose &object_to_world) {
  return bbox_corners(model, object_to_world, Mat3::Identity());
}

Box3 bbox_corners(const ObjectModel &model, const Pose &object_to_world,
                  const Mat3 &alignment) {
  if (object_to_world.from() != Frame::kObject) {
    throw Error(ErrorKind::kFrameMismatch,
                "bbox_corners expects an object->world pose");
  }
  const Mat3 r = alignment * object_to_world.rotation();
  const Vec3 t = alignment * object_to_world.translation();
  const auto &pts = model.surface_points();
  Box3 box{r * pts.front() + t, r * pts.front() + t};
  for (const Vec3 &p : pts) {
    const Vec3 q = r * p + t;
    box.min = box.min.cwiseMin(q);
    box.max = box.max.cwiseMax(q);
  }
  return box;
}

bool boxes_overlap(const Box3 &a, const Box3 &b) {
  for (int axis = 0; axis < 3; ++axis) {
    const double lo = std::max(a.min[axis], b.min[axis]);
    const double hi = std::min(a.max[axis], b.max[axis]);
    if (hi - lo <= kContactTolerance) return false;
  }
  return true;
}

}  // namespace stackgrasp
