#pragma once

#include <cstdint>
#include <vector>

#include "stackgrasp/geometry.hpp"
#include "stackgrasp/mask.hpp"
#include "stackgrasp/scene.hpp"

namespace stackgrasp {

inline constexpr std::int32_t kNoInstance = -1;

struct RenderedFrame {
  int width = 0;
  int height = 0;
  std::vector<float> depth;                 // meters, 0 = empty, row-major
  std::vector<std::int32_t> instance_map;   // object index or kNoInstance
  std::vector<Mask> modal_masks;
  std::vector<Mask> amodal_masks;

  float depth_at(int x, int y) const {
    return depth[static_cast<std::size_t>(y) * width + x];
  }
  std::int32_t instance_at(int x, int y) const {
    return instance_map[static_cast<std::size_t>(y) * width + x];
  }

  // Pixels covered by any object.
  Mask occupied() const;
};

// Per-object depth patch produced by the rasterizer; depth is 0 where the
// object does not cover the pixel.
struct DepthPatch {
  PixelRect roi;
  std::vector<float> depth;

  float at(int x, int y) const {
    return depth[static_cast<std::size_t>(y - roi.y) * roi.width + (x - roi.x)];
  }
};

// Z-buffered rasterization of the model's mesh under an object->camera pose.
// Pixel (x, y) is sampled at its center (x + 0.5, y + 0.5); triangles are
// clipped against a near plane just in front of the camera.
DepthPatch rasterize(const ObjectModel &model, const Pose &object_to_camera,
                     const CameraIntrinsics &intrinsics);

// Full silhouette of one object rendered alone.
Mask render_amodal(const ObjectModel &model, const Pose &object_to_camera,
                   const CameraIntrinsics &intrinsics);

RenderedFrame render(const SceneGroundTruth &scene, const ObjectModel &model);

}  // namespace stackgrasp
