#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stackgrasp/estimation.hpp"
#include "stackgrasp/geometry.hpp"

namespace stackgrasp {

enum class FilterOrder { kHeightThenVision, kVisionThenHeight };

struct FilterConfig {
  double epsilon_vis = 0.80;
  int top_k = 1;
  FilterOrder order = FilterOrder::kHeightThenVision;

  void validate() const;
};

// Per-hypothesis quantities the selectors rank on.
struct ScoredCandidate {
  std::size_t hypothesis = 0;  // index into the hypothesis list
  double visibility = 0.0;     // |modal n amodal| / |amodal|
  double height = 0.0;         // meters along the gravity-up axis
  double confidence = 0.0;
  int rank = -1;               // position after filtering
};

// Fraction of the hypothesis' rendered silhouette covered by its modal mask,
// clamped to [0, 1]. Throws ErrorKind::kDegenerateProjection when the pose
// renders to no pixels.
double visibility_ratio(const Mask &modal, const Mask &amodal);
double visibility_ratio(const PoseHypothesis &h, const ObjectModel &model,
                        const CameraIntrinsics &intrinsics);

// Object origin height against gravity: the origin is moved into the sensor
// frame and projected on the up direction -accel / |accel|. Throws
// ErrorKind::kFreeFall when |accel| <= 1 m/s^2.
double gravity_height(const Pose &object_to_camera, const Vec3 &imu_accel,
                      const Pose &camera_to_sensor);

struct ScoringResult {
  std::vector<ScoredCandidate> candidates;
  // Hypotheses whose pose renders to nothing; excluded from `candidates`.
  std::vector<std::size_t> degenerate;
};

ScoringResult score_candidates(std::span<const PoseHypothesis> hypotheses,
                               const ObjectModel &model,
                               const CameraIntrinsics &intrinsics,
                               const Vec3 &imu_accel,
                               const Pose &camera_to_sensor);

// Keeps candidates with visibility >= epsilon_vis, order preserved.
std::vector<ScoredCandidate> vision_filter(std::span<const ScoredCandidate> candidates,
                                           double epsilon_vis);

// Candidates sorted by height, descending; the first min(k, n) survive.
// Heights within 1 nm are treated as equal and fall through to visibility,
// then confidence, then input order.
std::vector<ScoredCandidate> height_filter(std::span<const ScoredCandidate> candidates,
                                           int top_k);

struct FilterResult {
  std::vector<ScoredCandidate> selected;       // G, ranked
  std::vector<ScoredCandidate> after_first;    // output of the first stage
  std::vector<std::size_t> degenerate;
};

// Composed selector: height top-k then vision threshold (default order), or
// the reverse. No backfill: |G| may be smaller than top_k.
FilterResult filter_graspable(std::span<const PoseHypothesis> hypotheses,
                              const FilterConfig &config, const ObjectModel &model,
                              const CameraIntrinsics &intrinsics,
                              const Vec3 &imu_accel, const Pose &camera_to_sensor);

// Same composition over candidates that are already scored.
FilterResult filter_scored(std::span<const ScoredCandidate> candidates,
                           const FilterConfig &config);

enum class BaselineStrategy { kRandom, kMaxConfidence };

// kRandom: uniform k-subset (returned in input order), deterministic in seed.
// kMaxConfidence: top-k by confidence, ties by input order.
std::vector<ScoredCandidate> baseline_select(std::span<const ScoredCandidate> candidates,
                                             BaselineStrategy strategy, int top_k,
                                             std::uint64_t seed = 0);

// All selectors used by the benchmark, under one name.
enum class Selector { kAll, kRandom, kConfidence, kInertial, kVision, kCombined };

std::string_view to_string(Selector s);
// Accepts "all", "random", "confidence", "inertial", "vision", "combined".
Selector parse_selector(std::string_view name);

// kVision returns every vision-filter survivor in input order and kAll every
// candidate; top_k is ignored by both.
std::vector<ScoredCandidate> run_selector(Selector selector,
                                          std::span<const ScoredCandidate> candidates,
                                          const FilterConfig &config,
                                          std::uint64_t seed);

}  // namespace stackgrasp
