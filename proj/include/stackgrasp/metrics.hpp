#pragma once

#include <compare>
#include <span>
#include <string_view>
#include <vector>

#include "stackgrasp/geometry.hpp"

namespace stackgrasp {

// Mean over model points of the distance to the closest ground-truth model
// point (symmetry-tolerant ADD). Nearest neighbors come from a KD-tree over
// the ground-truth-transformed points.
double add_s(const Pose &pred, const Pose &gt, const ObjectModel &model);

// Mean same-point distance (plain ADD).
double add(const Pose &pred, const Pose &gt, const ObjectModel &model);

// Maximum symmetry-aware surface distance in the BOP form:
// min over S of max over x of |pred(x) - gt(S x)|.
double mssd(const Pose &pred, const Pose &gt, const ObjectModel &model);

enum class PoseErrorKind { kAddS, kMssd };

std::string_view to_string(PoseErrorKind kind);
double pose_error(PoseErrorKind kind, const Pose &pred, const Pose &gt,
                  const ObjectModel &model);

struct ErrorThresholds {
  PoseErrorKind kind = PoseErrorKind::kAddS;
  std::vector<double> values;  // meters, strictly increasing, positive

  // 5%, 10%, ..., 50% of the diameter.
  static std::vector<double> default_fractions();
  static ErrorThresholds from_fractions(PoseErrorKind kind,
                                        std::span<const double> fractions,
                                        double diameter);
  void validate() const;
};

struct MatchPair {
  std::size_t prediction = 0;
  std::size_t ground_truth = 0;
  double error = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_predictions;
  std::vector<std::size_t> unmatched_ground_truth;

  double total_cost() const;
};

// Minimum-cost maximal matching on the pose-error cost matrix.
MatchResult match_candidates(std::span<const Pose> predictions,
                             std::span<const Pose> ground_truth,
                             const ObjectModel &model, PoseErrorKind kind);

struct ThresholdCount {
  double threshold = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;

  // 0 when no predictions were made.
  double precision() const;
};

struct PrecisionSummary {
  PoseErrorKind kind = PoseErrorKind::kAddS;
  std::vector<ThresholdCount> per_threshold;
  double ap = 0.0;
  // Set when there were no predictions at all; precision is then reported
  // as 0 by convention.
  bool no_predictions = false;
};

// TP at threshold t: matched pairs with error < t. FP = n_predictions - TP.
std::vector<ThresholdCount> count_hits(const MatchResult &match,
                                       const ErrorThresholds &thresholds,
                                       std::size_t n_predictions);

PrecisionSummary summarize(PoseErrorKind kind, std::vector<ThresholdCount> counts);

PrecisionSummary precision_ap(const MatchResult &match,
                              const ErrorThresholds &thresholds,
                              std::size_t n_predictions);

struct ImageKey {
  int scene_id = 0;
  int image_id = 0;
  friend auto operator<=>(const ImageKey &, const ImageKey &) = default;
};

struct ImageSelection {
  ImageKey key;
  std::vector<Pose> poses;  // object -> camera
};

struct ImageGroundTruth {
  ImageKey key;
  std::vector<Pose> poses;  // object -> camera
  std::vector<bool> graspable;
};

struct EvalConfig {
  std::vector<double> threshold_fractions = ErrorThresholds::default_fractions();
};

struct EvalReport {
  PrecisionSummary add_s;
  PrecisionSummary mssd;
  double ap_add = 0.0;
  double ap_mssd = 0.0;
  double map = 0.0;
  std::size_t images = 0;
  std::size_t predictions = 0;
  std::size_t graspable_ground_truth = 0;
  // Graspable objects left without a prediction (ADD-S matching); reported
  // as a diagnostic only.
  std::size_t unmatched_ground_truth = 0;
};

// Pooled precision over all images. Ground-truth candidates per image are
// the graspable objects. Throws ErrorKind::kMissingGroundTruth when a
// selection refers to an image without ground truth.
EvalReport evaluate_dataset(std::span<const ImageSelection> selections,
                            std::span<const ImageGroundTruth> ground_truth,
                            const ObjectModel &model, const EvalConfig &config = {});

}  // namespace stackgrasp
