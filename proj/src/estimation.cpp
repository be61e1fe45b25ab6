#include "stackgrasp/estimation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "json_util.hpp"
#include "stackgrasp/error.hpp"
#include "stackgrasp/random.hpp"

namespace stackgrasp {

namespace {

constexpr std::uint64_t kClutterStream = 0xc1077e7ULL;

Mat3 random_small_rotation(Rng &rng, double angle_std) {
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  while (axis.squaredNorm() < 1e-12) axis = Vec3(rng.normal(), rng.normal(), rng.normal());
  const double angle = rng.normal(0.0, angle_std);
  return rotation_from_axis_angle(axis.normalized() * angle);
}

double draw_confidence(const ConfidenceModel &model, double visibility, Rng &rng) {
  double c = model.offset + model.gain * visibility;
  if (model.noise_std > 0.0) c += rng.normal(0.0, model.noise_std);
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace

void NoiseSpec::validate() const {
  if (rot_std < 0.0 || trans_std < 0.0 || confidence.noise_std < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "noise std-devs must be non-negative");
  }
  if (mask_erosion < 0) {
    throw Error(ErrorKind::kInvalidArgument, "mask erosion must be non-negative");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate <= 1.0) ||
      !(clutter_rate >= 0.0 && clutter_rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "noise rates must lie in [0, 1]");
  }
}

NoiseSpec NoiseSpec::zero() {
  NoiseSpec spec;
  spec.confidence.noise_std = 0.0;
  return spec;
}

std::vector<PoseHypothesis> oracle_estimate(const SceneGroundTruth &scene,
                                            const RenderedFrame &frame,
                                            const ObjectModel &model,
                                            const NoiseSpec &noise,
                                            std::uint64_t seed) {
  noise.validate();
  const std::size_t n = scene.object_poses.size();
  if (frame.modal_masks.size() != n || frame.amodal_masks.size() != n) {
    throw Error(ErrorKind::kInvalidArgument,
                "rendered frame does not match the scene's object count");
  }
  std::vector<PoseHypothesis> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Mask &modal = frame.modal_masks[i];
    const std::size_t visible = modal.count();
    if (visible == 0) continue;
    // One stream per object keeps the other objects' draws stable when a
    // single noise knob changes.
    Rng rng(mix_seed(seed, i));
    if (rng.bernoulli(noise.dropout_rate)) continue;

    const Pose truth = scene.object_to_camera(i);
    Mat3 rotation = truth.rotation();
    Vec3 translation = truth.translation();
    if (noise.rot_std > 0.0) rotation = rotation * random_small_rotation(rng, noise.rot_std);
    if (noise.trans_std > 0.0) {
      for (int k = 0; k < 3; ++k) translation[k] += rng.normal(0.0, noise.trans_std);
    }
    const double visibility =
        static_cast<double>(visible) / static_cast<double>(frame.amodal_masks[i].count());

    PoseHypothesis h;
    h.pose = Pose(rotation, translation, Frame::kObject, Frame::kCamera);
    h.confidence = draw_confidence(noise.confidence, visibility, rng);
    h.pose_score = h.confidence;
    h.modal_mask = modal.eroded(noise.mask_erosion);
    h.source_object = static_cast<int>(i);
    out.push_back(std::move(h));
  }

  if (noise.clutter_rate > 0.0) {
    Rng rng(mix_seed(seed, kClutterStream));
    const int count = rng.poisson(noise.clutter_rate);
    if (count > 0) {
      const Box3 bounds = scene_bounds(scene.object_poses, model);
      const Mask occupied = frame.occupied();
      const Pose world_to_camera = scene.camera_pose.inverse();
      for (int c = 0; c < count; ++c) {
        const Vec3 position(rng.uniform(bounds.min.x(), bounds.max.x()),
                            rng.uniform(bounds.min.y(), bounds.max.y()),
                            rng.uniform(bounds.min.z(), bounds.max.z()));
        const double yaw = rng.uniform(0.0, 2.0 * M_PI);
        const double fake_visibility = rng.uniform(0.0, 0.5);
        const Pose object_to_world(rot_z(yaw), position, Frame::kObject, Frame::kWorld);
        const Pose object_to_camera = world_to_camera * object_to_world;
        Mask fake = render_amodal(model, object_to_camera, scene.intrinsics)
                        .intersected(occupied)
                        .eroded(noise.mask_erosion);
        const double confidence =
            draw_confidence(noise.confidence, fake_visibility, rng);
        if (fake.empty()) continue;
        PoseHypothesis h;
        h.pose = object_to_camera;
        h.confidence = confidence;
        h.pose_score = confidence;
        h.modal_mask = std::move(fake);
        out.push_back(std::move(h));
      }
    }
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string &token, const std::string &where) {
  const std::string t = trim(token);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: '{}' is not a number", where, t));
  }
  return v;
}

int parse_int(const std::string &token, const std::string &where) {
  const std::string t = trim(token);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: '{}' is not an integer", where, t));
  }
  return v;
}

std::vector<double> parse_vector(const std::string &token, std::size_t expected,
                                 const std::string &where, const char *name) {
  std::vector<double> values;
  std::istringstream in(token);
  std::string part;
  while (in >> part) values.push_back(parse_double(part, where));
  if (values.size() != expected) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: {} has {} values, expected {}", where, name,
                            values.size(), expected));
  }
  return values;
}

}  // namespace

std::vector<PredictionRecord> read_prediction_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kParse, fmt::format("{}: cannot open file", path.string()));
  }
  std::vector<PredictionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("scene_id", 0) == 0) continue;  // header
    const std::string where = fmt::format("{}:{}", path.string(), line_no);
    const std::vector<std::string> cols = split(t, ',');
    if (cols.size() != 7) {
      throw Error(ErrorKind::kParse,
                  fmt::format("{}: expected 7 columns, found {}", where, cols.size()));
    }
    PredictionRecord r;
    r.scene_id = parse_int(cols[0], where);
    r.image_id = parse_int(cols[1], where);
    r.object_id = parse_int(cols[2], where);
    r.score = parse_double(cols[3], where);
    const std::vector<double> rot = parse_vector(cols[4], 9, where, "rotation");
    const std::vector<double> trans = parse_vector(cols[5], 3, where, "translation");
    r.time = parse_double(cols[6], where);
    for (int i = 0; i < 9; ++i) r.rotation(i / 3, i % 3) = rot[i];
    r.translation_mm = Vec3(trans[0], trans[1], trans[2]);
    const double err = orthonormality_error(r.rotation);
    if (err > kRotationTolerance) {
      if (err > 1e-2 || r.rotation.determinant() <= 0.0) {
        throw Error(ErrorKind::kParse,
                    fmt::format("{}: rotation is not a proper rotation", where));
      }
      r.rotation = nearest_rotation(r.rotation);
    }
    records.push_back(r);
  }
  return records;
}

void write_prediction_csv(const std::filesystem::path &path,
                          std::span<const PredictionRecord> records) {
  std::string text = "scene_id,im_id,obj_id,score,R,t,time\n";
  for (const PredictionRecord &r : records) {
    const Mat3 &m = r.rotation;
    text += fmt::format("{},{},{},{},{} {} {} {} {} {} {} {} {},{} {} {},{}\n",
                        r.scene_id, r.image_id, r.object_id, r.score, m(0, 0),
                        m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0),
                        m(2, 1), m(2, 2), r.translation_mm.x(),
                        r.translation_mm.y(), r.translation_mm.z(), r.time);
  }
  detail::write_text_atomic(path, text);
}

std::filesystem::path mask_file_for(const std::filesystem::path &csv_path) {
  std::filesystem::path p = csv_path;
  p += ".masks.json";
  return p;
}

std::vector<PoseHypothesis> load_predictions(
    const std::filesystem::path &csv_path, int scene_id, int image_id,
    const std::optional<MaskFallback> &fallback) {
  const std::vector<PredictionRecord> records = read_prediction_csv(csv_path);

  std::map<std::size_t, RunLengthMask> masks;
  const std::filesystem::path mask_path = mask_file_for(csv_path);
  if (std::filesystem::exists(mask_path)) {
    const detail::json doc = detail::read_json_file(mask_path);
    const detail::json &list = detail::member(doc, "masks", mask_path.string());
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string where = fmt::format("{}:masks[{}]", mask_path.string(), k);
      if (detail::field<int>(list[k], "scene_id", where) != scene_id ||
          detail::field<int>(list[k], "im_id", where) != image_id) {
        continue;
      }
      const int row = detail::field<int>(list[k], "row", where);
      masks[static_cast<std::size_t>(row)] = detail::rle_from_json(
          detail::member(list[k], "segmentation", where), where + ".segmentation");
    }
  }

  std::vector<PoseHypothesis> out;
  for (std::size_t row = 0; row < records.size(); ++row) {
    const PredictionRecord &r = records[row];
    if (r.scene_id != scene_id || r.image_id != image_id) continue;
    PoseHypothesis h;
    h.pose = Pose(r.rotation, r.translation_mm / 1000.0, Frame::kObject, Frame::kCamera);
    h.confidence = r.score;
    h.pose_score = r.score;
    h.object_class = r.object_id;
    if (auto it = masks.find(row); it != masks.end()) {
      h.modal_mask = decode_rle(it->second);
    } else {
      h.mask_missing = true;
      if (fallback && fallback->model != nullptr) {
        h.modal_mask = render_amodal(*fallback->model, h.pose, fallback->intrinsics);
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

void write_predictions(const std::filesystem::path &csv_path,
                       std::span<const ImageHypotheses> images) {
  std::vector<PredictionRecord> records;
  detail::json masks = detail::json::array();
  for (const ImageHypotheses &image : images) {
    for (const PoseHypothesis &h : image.hypotheses) {
      PredictionRecord r;
      r.scene_id = image.scene_id;
      r.image_id = image.image_id;
      r.object_id = h.object_class;
      r.score = h.confidence;
      r.rotation = h.pose.rotation();
      r.translation_mm = h.pose.translation() * 1000.0;
      if (!h.mask_missing && h.modal_mask.image_width() > 0) {
        masks.push_back({{"scene_id", image.scene_id},
                         {"im_id", image.image_id},
                         {"row", records.size()},
                         {"segmentation", detail::rle_to_json(encode_rle(h.modal_mask))}});
      }
      records.push_back(r);
    }
  }
  write_prediction_csv(csv_path, records);
  detail::write_text_atomic(mask_file_for(csv_path),
                            detail::json{{"masks", masks}}.dump() + "\n");
}

Mask restrict_to_occupied(const Mask &mask, const RenderedFrame &frame) {
  return mask.intersected(frame.occupied());
}

}  // namespace stackgrasp
