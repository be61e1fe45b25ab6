#include "stackgrasp/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

namespace {

constexpr double kNearPlane = 1e-3;

struct ScreenVertex {
  double u, v, inv_z;
};

using ScreenTriangle = std::array<ScreenVertex, 3>;

// Sutherland-Hodgman against z >= kNearPlane; returns 0, 3 or 4 vertices.
int clip_near(const std::array<Vec3, 3> &in, std::array<Vec3, 4> &out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 &a = in[i];
    const Vec3 &b = in[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      out[n++] = a + t * (b - a);
    }
  }
  return n;
}

ScreenVertex to_screen(const CameraIntrinsics &k, const Vec3 &p) {
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy,
          1.0 / p.z()};
}

double edge(const ScreenVertex &a, const ScreenVertex &b, double px,
            double py) {
  return (b.u - a.u) * (py - a.v) - (b.v - a.v) * (px - a.u);
}

}  // namespace

DepthPatch rasterize(const ObjectModel &model, const Pose &object_to_camera,
                     const CameraIntrinsics &intrinsics) {
  if (object_to_camera.from() != Frame::kObject ||
      object_to_camera.to() != Frame::kCamera) {
    throw Error(ErrorKind::kFrameMismatch,
                "rasterize expects an object->camera pose");
  }
  const std::vector<Vec3> verts =
      transform_points(object_to_camera, model.vertices());

  std::vector<ScreenTriangle> tris;
  double u_min = INFINITY, u_max = -INFINITY, v_min = INFINITY, v_max = -INFINITY;
  for (const auto &idx : model.triangles()) {
    std::array<Vec3, 4> poly;
    const int n = clip_near({verts[idx[0]], verts[idx[1]], verts[idx[2]]}, poly);
    for (int i = 1; i + 1 < n; ++i) {
      ScreenTriangle tri = {to_screen(intrinsics, poly[0]),
                            to_screen(intrinsics, poly[i]),
                            to_screen(intrinsics, poly[i + 1])};
      for (const ScreenVertex &s : tri) {
        u_min = std::min(u_min, s.u);
        u_max = std::max(u_max, s.u);
        v_min = std::min(v_min, s.v);
        v_max = std::max(v_max, s.v);
      }
      tris.push_back(tri);
    }
  }

  DepthPatch patch;
  if (tris.empty()) return patch;
  const PixelRect image{0, 0, intrinsics.width, intrinsics.height};
  const auto clamp_px = [](double x) {
    return static_cast<int>(std::clamp(x, -1e7, 1e7));
  };
  const int x0 = clamp_px(std::floor(u_min - 0.5));
  const int x1 = clamp_px(std::ceil(u_max - 0.5));
  const int y0 = clamp_px(std::floor(v_min - 0.5));
  const int y1 = clamp_px(std::ceil(v_max - 0.5));
  patch.roi = intersect({x0, y0, x1 - x0 + 1, y1 - y0 + 1}, image);
  if (patch.roi.empty()) return patch;
  patch.depth.assign(
      static_cast<std::size_t>(patch.roi.width) * patch.roi.height, 0.0f);

  for (const ScreenTriangle &t : tris) {
    const double area = edge(t[0], t[1], t[2].u, t[2].v);
    if (std::abs(area) < 1e-12) continue;
    double tu_min = std::min({t[0].u, t[1].u, t[2].u});
    double tu_max = std::max({t[0].u, t[1].u, t[2].u});
    double tv_min = std::min({t[0].v, t[1].v, t[2].v});
    double tv_max = std::max({t[0].v, t[1].v, t[2].v});
    const PixelRect box = intersect(
        {clamp_px(std::floor(tu_min - 0.5)), clamp_px(std::floor(tv_min - 0.5)),
         clamp_px(std::ceil(tu_max - 0.5)) - clamp_px(std::floor(tu_min - 0.5)) + 1,
         clamp_px(std::ceil(tv_max - 0.5)) - clamp_px(std::floor(tv_min - 0.5)) + 1},
        patch.roi);
    for (int y = box.y; y < box.y + box.height; ++y) {
      const double py = y + 0.5;
      for (int x = box.x; x < box.x + box.width; ++x) {
        const double px = x + 0.5;
        const double w0 = edge(t[1], t[2], px, py) / area;
        const double w1 = edge(t[2], t[0], px, py) / area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double inv_z = w0 * t[0].inv_z + w1 * t[1].inv_z + w2 * t[2].inv_z;
        const float z = static_cast<float>(1.0 / inv_z);
        float &slot = patch.depth[static_cast<std::size_t>(y - patch.roi.y) *
                                      patch.roi.width +
                                  (x - patch.roi.x)];
        if (slot == 0.0f || z < slot) slot = z;
      }
    }
  }
  return patch;
}

Mask render_amodal(const ObjectModel &model, const Pose &object_to_camera,
                   const CameraIntrinsics &intrinsics) {
  const DepthPatch patch = rasterize(model, object_to_camera, intrinsics);
  Mask mask(intrinsics.width, intrinsics.height, patch.roi);
  for (int y = patch.roi.y; y < patch.roi.y + patch.roi.height; ++y) {
    for (int x = patch.roi.x; x < patch.roi.x + patch.roi.width; ++x) {
      if (patch.at(x, y) > 0.0f) mask.set(x, y);
    }
  }
  return mask;
}

Mask RenderedFrame::occupied() const {
  Mask out(width, height, {0, 0, width, height});
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (instance_at(x, y) != kNoInstance) out.set(x, y);
    }
  }
  return out;
}

RenderedFrame render(const SceneGroundTruth &scene, const ObjectModel &model) {
  const CameraIntrinsics &k = scene.intrinsics;
  k.validate();
  if (scene.object_poses.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot render an empty scene");
  }
  RenderedFrame frame;
  frame.width = k.width;
  frame.height = k.height;
  const std::size_t n_pixels = static_cast<std::size_t>(k.width) * k.height;
  frame.depth.assign(n_pixels, 0.0f);
  frame.instance_map.assign(n_pixels, kNoInstance);

  std::vector<DepthPatch> patches;
  patches.reserve(scene.object_poses.size());
  for (std::size_t i = 0; i < scene.object_poses.size(); ++i) {
    DepthPatch patch = rasterize(model, scene.object_to_camera(i), k);
    Mask amodal(k.width, k.height, patch.roi);
    for (int y = patch.roi.y; y < patch.roi.y + patch.roi.height; ++y) {
      for (int x = patch.roi.x; x < patch.roi.x + patch.roi.width; ++x) {
        const float z = patch.at(x, y);
        if (z <= 0.0f) continue;
        amodal.set(x, y);
        const std::size_t p = static_cast<std::size_t>(y) * k.width + x;
        if (frame.instance_map[p] == kNoInstance || z < frame.depth[p]) {
          frame.depth[p] = z;
          frame.instance_map[p] = static_cast<std::int32_t>(i);
        }
      }
    }
    frame.amodal_masks.push_back(std::move(amodal));
    patches.push_back(std::move(patch));
  }

  for (std::size_t i = 0; i < patches.size(); ++i) {
    const PixelRect &roi = patches[i].roi;
    Mask modal(k.width, k.height, roi);
    for (int y = roi.y; y < roi.y + roi.height; ++y) {
      for (int x = roi.x; x < roi.x + roi.width; ++x) {
        if (frame.instance_at(x, y) == static_cast<std::int32_t>(i)) {
          modal.set(x, y);
        }
      }
    }
    frame.modal_masks.push_back(std::move(modal));
  }
  return frame;
}

}  // namespace stackgrasp
