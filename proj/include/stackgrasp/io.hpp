#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stackgrasp/config.hpp"
#include "stackgrasp/graspability.hpp"
#include "stackgrasp/metrics.hpp"
#include "stackgrasp/render.hpp"
#include "stackgrasp/scene.hpp"

namespace stackgrasp {

// On-disk layout, BOP style, one image per scene:
//
//   <root>/dataset_info.json            manifest (units, splits, model)
//   <root>/config.toml                  the RunConfig that produced it
//   <root>/models/models_info.json
//   <root>/models/obj_000001.ply
//   <root>/<split>/<scene:06d>/scene_camera.json
//   <root>/<split>/<scene:06d>/scene_gt.json
//   <root>/<split>/<scene:06d>/scene_gt_info.json
//   <root>/<split>/<scene:06d>/scene_gt_coco.json
//   <root>/<split>/<scene:06d>/scene_graspable.json
//   <root>/<split>/<scene:06d>/depth/<image:06d>.png
//   <root>/<split>/<scene:06d>/rgb/<image:06d>.png    placeholder
//
// Translations and depth are stored in millimeters, rotations row-major.
struct DatasetLayout {
  std::filesystem::path root;
  std::string split = "test";

  std::filesystem::path scene_dir(int scene_id) const;
};

inline constexpr int kBrickObjectId = 1;

struct WriteOptions {
  bool overwrite = false;
  // Also write mask_visib/ and mask/ PNGs per object.
  bool debug_masks = false;
};

struct SceneRecord {
  SceneGroundTruth scene;
  RenderedFrame frame;
  std::vector<GraspLabel> labels;
};

// Writes one scene into a temporary directory and renames it into place.
// Throws kRefusesOverwrite when the scene exists and overwrite is off,
// kStorage on filesystem failures.
void write_scene(const SceneGroundTruth &scene, const RenderedFrame &frame,
                 std::span<const GraspLabel> labels, const DatasetLayout &layout,
                 int scene_id, int image_id = 0, const WriteOptions &options = {});

// Inverse of write_scene. Depth comes back quantized to 1 mm; the instance
// map is rebuilt from the modal masks. Throws kParse naming file and field.
SceneRecord read_scene(const DatasetLayout &layout, int scene_id, int image_id = 0);

// Ground truth only (no masks or depth); much cheaper than read_scene.
SceneGroundTruth read_scene_ground_truth(const DatasetLayout &layout, int scene_id,
                                         int image_id = 0);

// Graspability flags from scene_graspable.json.
std::vector<GraspLabel> read_labels(const DatasetLayout &layout, int scene_id,
                                    int image_id = 0);
void write_labels(const DatasetLayout &layout, int scene_id, int image_id,
                  std::span<const GraspLabel> labels);

// Scene ids present under root/split, ascending.
std::vector<int> list_scenes(const DatasetLayout &layout);

struct DatasetManifest {
  std::string units = "mm";
  double depth_scale = 1.0;  // depth PNG value * depth_scale = millimeters
  std::vector<std::pair<std::string, int>> splits;
  Vec3 brick_size = Vec3::Zero();  // meters in memory
  int model_points = 0;
};

// Manifest plus config copy plus model files. Written once, after scenes.
void write_manifest(const std::filesystem::path &root, const RunConfig &config,
                    const ObjectModel &model);
DatasetManifest read_manifest(const std::filesystem::path &root);

// 16-bit grayscale PNG of millimeter depths. Throws kStorage when a depth
// does not fit in 16 bits.
void write_depth_png(const std::filesystem::path &path, int width, int height,
                     std::span<const float> depth_m);
std::vector<float> read_depth_png(const std::filesystem::path &path, int &width,
                                  int &height);
void write_mask_png(const std::filesystem::path &path, const Mask &mask);
// Uniform gray 8-bit RGB image for consumers that expect rgb/ files.
void write_placeholder_rgb(const std::filesystem::path &path, int width, int height);

// Labels produced by the `label` command for a whole split.
struct LabelSet {
  std::string split;
  struct Entry {
    ImageKey key;
    std::vector<GraspLabel> labels;
  };
  std::vector<Entry> entries;
};

void write_label_set(const std::filesystem::path &path, const LabelSet &set);
LabelSet read_label_set(const std::filesystem::path &path);

// Report as JSON (machine-readable) and as an aligned text table.
std::string report_json(const EvalReport &report);
std::string report_table(const EvalReport &report);

}  // namespace stackgrasp
