#include "stackgrasp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/hungarian.hpp"
#include "stackgrasp/kdtree.hpp"

namespace stackgrasp {

double add_s(const Pose &pred, const Pose &gt, const ObjectModel &model) {
  // Distances are rigid-invariant, so the query points are moved into the
  // model frame of the ground truth and searched in the model's own tree.
  const Mat3 r = gt.rotation().transpose() * pred.rotation();
  const Vec3 t = gt.rotation().transpose() * (pred.translation() - gt.translation());
  const KdTree &tree = model.point_index();
  double sum = 0.0;
  for (const Vec3 &x : model.surface_points()) {
    sum += std::sqrt(tree.nearest(r * x + t).second);
  }
  return sum / static_cast<double>(model.surface_points().size());
}

double add(const Pose &pred, const Pose &gt, const ObjectModel &model) {
  double sum = 0.0;
  for (const Vec3 &x : model.surface_points()) sum += (pred(x) - gt(x)).norm();
  return sum / static_cast<double>(model.surface_points().size());
}

double mssd(const Pose &pred, const Pose &gt, const ObjectModel &model) {
  const std::vector<Vec3> pred_points = transform_points(pred, model.surface_points());
  double best = std::numeric_limits<double>::infinity();
  for (const Mat3 &sym : model.symmetries()) {
    const Mat3 r = gt.rotation() * sym;
    double worst_sq = 0.0;
    for (std::size_t i = 0; i < pred_points.size(); ++i) {
      const Vec3 q = r * model.surface_points()[i] + gt.translation();
      worst_sq = std::max(worst_sq, (pred_points[i] - q).squaredNorm());
    }
    best = std::min(best, std::sqrt(worst_sq));
  }
  return best;
}

std::string_view to_string(PoseErrorKind kind) {
  return kind == PoseErrorKind::kAddS ? "ADD-S" : "MSSD";
}

double pose_error(PoseErrorKind kind, const Pose &pred, const Pose &gt,
                  const ObjectModel &model) {
  return kind == PoseErrorKind::kAddS ? add_s(pred, gt, model) : mssd(pred, gt, model);
}

std::vector<double> ErrorThresholds::default_fractions() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(i / 20.0);
  return out;
}

ErrorThresholds ErrorThresholds::from_fractions(PoseErrorKind kind,
                                                std::span<const double> fractions,
                                                double diameter) {
  ErrorThresholds t;
  t.kind = kind;
  for (double f : fractions) t.values.push_back(f * diameter);
  t.validate();
  return t;
}

void ErrorThresholds::validate() const {
  if (values.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "threshold list is empty");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || (i > 0 && !(values[i] > values[i - 1]))) {
      throw Error(ErrorKind::kInvalidArgument,
                  "thresholds must be positive and strictly increasing");
    }
  }
}

double MatchResult::total_cost() const {
  double sum = 0.0;
  for (const MatchPair &p : pairs) sum += p.error;
  return sum;
}

MatchResult match_candidates(std::span<const Pose> predictions,
                             std::span<const Pose> ground_truth,
                             const ObjectModel &model, PoseErrorKind kind) {
  Eigen::MatrixXd cost(predictions.size(), ground_truth.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = 0; j < ground_truth.size(); ++j) {
      cost(i, j) = pose_error(kind, predictions[i], ground_truth[j], model);
    }
  }
  const Assignment assignment = solve_assignment(cost);
  MatchResult result;
  std::vector<char> gt_used(ground_truth.size(), 0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int j = assignment.row_to_col[i];
    if (j < 0) {
      result.unmatched_predictions.push_back(i);
      continue;
    }
    gt_used[j] = 1;
    result.pairs.push_back({i, static_cast<std::size_t>(j), cost(i, j)});
  }
  for (std::size_t j = 0; j < ground_truth.size(); ++j) {
    if (!gt_used[j]) result.unmatched_ground_truth.push_back(j);
  }
  return result;
}

double ThresholdCount::precision() const {
  const std::size_t n = true_positives + false_positives;
  return n == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(n);
}

std::vector<ThresholdCount> count_hits(const MatchResult &match,
                                       const ErrorThresholds &thresholds,
                                       std::size_t n_predictions) {
  thresholds.validate();
  if (match.pairs.size() > n_predictions) {
    throw Error(ErrorKind::kInvalidArgument, "more matched pairs than predictions");
  }
  std::vector<ThresholdCount> out;
  for (double t : thresholds.values) {
    ThresholdCount c;
    c.threshold = t;
    for (const MatchPair &p : match.pairs) {
      if (p.error < t) ++c.true_positives;
    }
    c.false_positives = n_predictions - c.true_positives;
    out.push_back(c);
  }
  return out;
}

PrecisionSummary summarize(PoseErrorKind kind, std::vector<ThresholdCount> counts) {
  PrecisionSummary s;
  s.kind = kind;
  s.per_threshold = std::move(counts);
  s.no_predictions = true;
  double sum = 0.0;
  for (const ThresholdCount &c : s.per_threshold) {
    if (c.true_positives + c.false_positives > 0) s.no_predictions = false;
    sum += c.precision();
  }
  s.ap = s.per_threshold.empty() ? 0.0 : sum / static_cast<double>(s.per_threshold.size());
  return s;
}

PrecisionSummary precision_ap(const MatchResult &match,
                              const ErrorThresholds &thresholds,
                              std::size_t n_predictions) {
  return summarize(thresholds.kind, count_hits(match, thresholds, n_predictions));
}

EvalReport evaluate_dataset(std::span<const ImageSelection> selections,
                            std::span<const ImageGroundTruth> ground_truth,
                            const ObjectModel &model, const EvalConfig &config) {
  std::map<ImageKey, const ImageGroundTruth *> by_key;
  EvalReport report;
  for (const ImageGroundTruth &gt : ground_truth) {
    if (gt.poses.size() != gt.graspable.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "ground truth needs one graspability flag per object");
    }
    if (!by_key.emplace(gt.key, &gt).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("duplicate ground truth for scene {} image {}",
                              gt.key.scene_id, gt.key.image_id));
    }
    report.graspable_ground_truth +=
        static_cast<std::size_t>(std::count(gt.graspable.begin(), gt.graspable.end(), true));
  }

  const ErrorThresholds add_t = ErrorThresholds::from_fractions(
      PoseErrorKind::kAddS, config.threshold_fractions, model.diameter());
  const ErrorThresholds mssd_t = ErrorThresholds::from_fractions(
      PoseErrorKind::kMssd, config.threshold_fractions, model.diameter());
  std::vector<ThresholdCount> add_counts(add_t.values.size());
  std::vector<ThresholdCount> mssd_counts(mssd_t.values.size());
  for (std::size_t i = 0; i < add_t.values.size(); ++i) {
    add_counts[i].threshold = add_t.values[i];
    mssd_counts[i].threshold = mssd_t.values[i];
  }
  const auto pool = [](std::vector<ThresholdCount> &acc,
                       const std::vector<ThresholdCount> &part) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i].true_positives += part[i].true_positives;
      acc[i].false_positives += part[i].false_positives;
    }
  };

  std::size_t matched_gt = 0;
  for (const ImageSelection &sel : selections) {
    auto it = by_key.find(sel.key);
    if (it == by_key.end()) {
      throw Error(ErrorKind::kMissingGroundTruth,
                  fmt::format("no ground truth for scene {} image {}", sel.key.scene_id,
                              sel.key.image_id));
    }
    ++report.images;
    const ImageGroundTruth &gt = *it->second;
    std::vector<Pose> candidates;
    for (std::size_t j = 0; j < gt.poses.size(); ++j) {
      if (gt.graspable[j]) candidates.push_back(gt.poses[j]);
    }
    const std::size_t n = sel.poses.size();
    report.predictions += n;
    const MatchResult add_match =
        match_candidates(sel.poses, candidates, model, PoseErrorKind::kAddS);
    const MatchResult mssd_match =
        match_candidates(sel.poses, candidates, model, PoseErrorKind::kMssd);
    matched_gt += add_match.pairs.size();
    pool(add_counts, count_hits(add_match, add_t, n));
    pool(mssd_counts, count_hits(mssd_match, mssd_t, n));
  }

  report.add_s = summarize(PoseErrorKind::kAddS, std::move(add_counts));
  report.mssd = summarize(PoseErrorKind::kMssd, std::move(mssd_counts));
  report.ap_add = report.add_s.ap;
  report.ap_mssd = report.mssd.ap;
  report.map = 0.5 * (report.ap_add + report.ap_mssd);
  report.unmatched_ground_truth = report.graspable_ground_truth - matched_gt;
  return report;
}

}  // namespace stackgrasp
