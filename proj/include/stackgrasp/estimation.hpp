#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "stackgrasp/geometry.hpp"
#include "stackgrasp/mask.hpp"
#include "stackgrasp/render.hpp"
#include "stackgrasp/scene.hpp"

namespace stackgrasp {

struct PoseHypothesis {
  Pose pose{Frame::kObject, Frame::kCamera};
  // Detector-style score; used by the confidence baseline.
  double confidence = 0.0;
  // Pose-estimator score, kept as a separate slot.
  double pose_score = 0.0;
  Mask modal_mask;
  int object_class = 1;
  // Set when the modal mask was not supplied and a render was substituted.
  bool mask_missing = false;
  // Ground-truth object this hypothesis was derived from (oracle only),
  // -1 for clutter or externally loaded predictions. Diagnostic.
  int source_object = -1;
};

// confidence = clamp(offset + gain * visibility + N(0, noise_std), 0, 1)
struct ConfidenceModel {
  double offset = 0.2;
  double gain = 0.75;
  double noise_std = 0.05;
};

struct NoiseSpec {
  double rot_std = 0.0;    // radians, angle of a random-axis rotation
  double trans_std = 0.0;  // meters, per axis
  int mask_erosion = 0;    // pixels
  ConfidenceModel confidence;
  double dropout_rate = 0.0;
  double clutter_rate = 0.0;  // expected spurious hypotheses per image

  void validate() const;
  // No pose, mask, dropout or clutter noise and a noiseless confidence model.
  static NoiseSpec zero();
};

// Hypotheses derived from ground truth for every visible, non-dropped object
// (in object order), followed by clutter hypotheses at random poses inside
// the scene bounds. Deterministic in `seed`.
std::vector<PoseHypothesis> oracle_estimate(const SceneGroundTruth &scene,
                                            const RenderedFrame &frame,
                                            const ObjectModel &model,
                                            const NoiseSpec &noise,
                                            std::uint64_t seed);

// One row of a BOP-challenge prediction CSV.
struct PredictionRecord {
  int scene_id = 0;
  int image_id = 0;
  int object_id = 1;
  double score = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation_mm = Vec3::Zero();
  double time = -1.0;
};

// Parses "scene_id,im_id,obj_id,score,R,t,time" with R as 9 space-separated
// row-major values and t in millimeters. Throws ErrorKind::kParse naming the
// file and line.
std::vector<PredictionRecord> read_prediction_csv(const std::filesystem::path &path);
void write_prediction_csv(const std::filesystem::path &path,
                          std::span<const PredictionRecord> records);

// Context needed to substitute a mask when predictions ship without one.
struct MaskFallback {
  const ObjectModel *model = nullptr;
  CameraIntrinsics intrinsics;
};

// Hypotheses of one image. Masks come from "<csv>.masks.json" when it holds
// an entry for the row; otherwise the amodal render of the predicted pose is
// substituted (when a fallback is given) and mask_missing is set.
std::vector<PoseHypothesis> load_predictions(
    const std::filesystem::path &csv_path, int scene_id, int image_id,
    const std::optional<MaskFallback> &fallback = std::nullopt);

struct ImageHypotheses {
  int scene_id = 0;
  int image_id = 0;
  std::vector<PoseHypothesis> hypotheses;
};

// Writes the CSV plus the companion mask file. Confidence goes to the score
// column; translations are written in millimeters.
void write_predictions(const std::filesystem::path &csv_path,
                       std::span<const ImageHypotheses> images);

std::filesystem::path mask_file_for(const std::filesystem::path &csv_path);

// Restricts a substituted mask to pixels occupied by some object in the
// frame; used when predictions carry no segmentation.
Mask restrict_to_occupied(const Mask &mask, const RenderedFrame &frame);

}  // namespace stackgrasp
