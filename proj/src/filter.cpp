#include "stackgrasp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/random.hpp"

namespace stackgrasp {

namespace {

constexpr double kHeightResolution = 1e-9;
constexpr double kMinGravity = 1.0;

long long height_key(double height) {
  return std::llround(height / kHeightResolution);
}

void assign_ranks(std::vector<ScoredCandidate> &list) {
  for (std::size_t i = 0; i < list.size(); ++i) list[i].rank = static_cast<int>(i);
}

// Stable sort by the given key chain; position in the input breaks ties.
template <typename Less>
std::vector<ScoredCandidate> ranked(std::span<const ScoredCandidate> in, Less less) {
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return less(in[a], in[b]);
  });
  std::vector<ScoredCandidate> out;
  out.reserve(in.size());
  for (std::size_t i : order) out.push_back(in[i]);
  return out;
}

void check_top_k(int top_k) {
  if (top_k < 1) throw Error(ErrorKind::kInvalidArgument, "top_k must be >= 1");
}

}  // namespace

void FilterConfig::validate() const {
  if (!(epsilon_vis >= 0.0 && epsilon_vis <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "epsilon_vis must lie in [0, 1]");
  }
  check_top_k(top_k);
}

double visibility_ratio(const Mask &modal, const Mask &amodal) {
  const std::size_t area = amodal.count();
  if (area == 0) {
    throw Error(ErrorKind::kDegenerateProjection,
                "amodal render is empty (object behind the camera or out of frame)");
  }
  const double r =
      static_cast<double>(intersection_count(modal, amodal)) / static_cast<double>(area);
  return std::clamp(r, 0.0, 1.0);
}

double visibility_ratio(const PoseHypothesis &h, const ObjectModel &model,
                        const CameraIntrinsics &intrinsics) {
  return visibility_ratio(h.modal_mask, render_amodal(model, h.pose, intrinsics));
}

double gravity_height(const Pose &object_to_camera, const Vec3 &imu_accel,
                      const Pose &camera_to_sensor) {
  const double g = imu_accel.norm();
  if (!(g > kMinGravity)) {
    throw Error(ErrorKind::kFreeFall,
                fmt::format("accelerometer magnitude {:.3f} m/s^2 carries no gravity "
                            "direction",
                            g));
  }
  if (camera_to_sensor.from() != Frame::kCamera ||
      camera_to_sensor.to() != Frame::kSensor) {
    throw Error(ErrorKind::kFrameMismatch, "IMU extrinsic must map camera -> sensor");
  }
  const Vec3 origin_sensor = camera_to_sensor(object_to_camera.translation());
  const Vec3 up = -imu_accel / g;
  return up.dot(origin_sensor);
}

ScoringResult score_candidates(std::span<const PoseHypothesis> hypotheses,
                               const ObjectModel &model,
                               const CameraIntrinsics &intrinsics,
                               const Vec3 &imu_accel,
                               const Pose &camera_to_sensor) {
  ScoringResult out;
  out.candidates.reserve(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const PoseHypothesis &h = hypotheses[i];
    ScoredCandidate c;
    c.hypothesis = i;
    c.confidence = h.confidence;
    try {
      c.visibility = visibility_ratio(h, model, intrinsics);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kDegenerateProjection) throw;
      out.degenerate.push_back(i);
      continue;
    }
    c.height = gravity_height(h.pose, imu_accel, camera_to_sensor);
    out.candidates.push_back(c);
  }
  return out;
}

std::vector<ScoredCandidate> vision_filter(std::span<const ScoredCandidate> candidates,
                                           double epsilon_vis) {
  std::vector<ScoredCandidate> out;
  for (const ScoredCandidate &c : candidates) {
    if (c.visibility >= epsilon_vis) out.push_back(c);
  }
  return out;
}

std::vector<ScoredCandidate> height_filter(std::span<const ScoredCandidate> candidates,
                                           int top_k) {
  check_top_k(top_k);
  std::vector<ScoredCandidate> out =
      ranked(candidates, [](const ScoredCandidate &a, const ScoredCandidate &b) {
        const long long ha = height_key(a.height), hb = height_key(b.height);
        if (ha != hb) return ha > hb;
        if (a.visibility != b.visibility) return a.visibility > b.visibility;
        return a.confidence > b.confidence;
      });
  if (out.size() > static_cast<std::size_t>(top_k)) out.resize(top_k);
  assign_ranks(out);
  return out;
}

FilterResult filter_scored(std::span<const ScoredCandidate> candidates,
                           const FilterConfig &config) {
  config.validate();
  FilterResult result;
  if (config.order == FilterOrder::kHeightThenVision) {
    result.after_first = height_filter(candidates, config.top_k);
    result.selected = vision_filter(result.after_first, config.epsilon_vis);
  } else {
    result.after_first = vision_filter(candidates, config.epsilon_vis);
    result.selected = height_filter(result.after_first, config.top_k);
  }
  assign_ranks(result.selected);
  return result;
}

FilterResult filter_graspable(std::span<const PoseHypothesis> hypotheses,
                              const FilterConfig &config, const ObjectModel &model,
                              const CameraIntrinsics &intrinsics,
                              const Vec3 &imu_accel, const Pose &camera_to_sensor) {
  config.validate();
  ScoringResult scored =
      score_candidates(hypotheses, model, intrinsics, imu_accel, camera_to_sensor);
  FilterResult result = filter_scored(scored.candidates, config);
  result.degenerate = std::move(scored.degenerate);
  return result;
}

std::vector<ScoredCandidate> baseline_select(std::span<const ScoredCandidate> candidates,
                                             BaselineStrategy strategy, int top_k,
                                             std::uint64_t seed) {
  check_top_k(top_k);
  const std::size_t k = std::min<std::size_t>(top_k, candidates.size());
  std::vector<ScoredCandidate> out;
  if (strategy == BaselineStrategy::kMaxConfidence) {
    out = ranked(candidates, [](const ScoredCandidate &a, const ScoredCandidate &b) {
      return a.confidence > b.confidence;
    });
    out.resize(k);
  } else {
    std::vector<std::size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.index(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i : idx) out.push_back(candidates[i]);
  }
  assign_ranks(out);
  return out;
}

std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::kAll: return "all";
    case Selector::kRandom: return "random";
    case Selector::kConfidence: return "confidence";
    case Selector::kInertial: return "inertial";
    case Selector::kVision: return "vision";
    case Selector::kCombined: return "combined";
  }
  return "?";
}

Selector parse_selector(std::string_view name) {
  for (Selector s : {Selector::kAll, Selector::kRandom, Selector::kConfidence,
                     Selector::kInertial, Selector::kVision, Selector::kCombined}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::kUsage, fmt::format("unknown selection strategy '{}'", name));
}

std::vector<ScoredCandidate> run_selector(Selector selector,
                                          std::span<const ScoredCandidate> candidates,
                                          const FilterConfig &config,
                                          std::uint64_t seed) {
  config.validate();
  switch (selector) {
    case Selector::kAll: {
      std::vector<ScoredCandidate> out(candidates.begin(), candidates.end());
      assign_ranks(out);
      return out;
    }
    case Selector::kRandom:
      return baseline_select(candidates, BaselineStrategy::kRandom, config.top_k, seed);
    case Selector::kConfidence:
      return baseline_select(candidates, BaselineStrategy::kMaxConfidence, config.top_k);
    case Selector::kInertial:
      return height_filter(candidates, config.top_k);
    case Selector::kVision: {
      // Everything that passes the visibility gate; top_k does not apply.
      std::vector<ScoredCandidate> out = vision_filter(candidates, config.epsilon_vis);
      assign_ranks(out);
      return out;
    }
    case Selector::kCombined:
      return filter_scored(candidates, config).selected;
  }
  return {};
}

}  // namespace stackgrasp
