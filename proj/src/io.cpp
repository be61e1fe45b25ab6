#include "stackgrasp/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <fmt/format.h>

#include "json_util.hpp"
#include "stackgrasp/error.hpp"

namespace stackgrasp {

namespace fs = std::filesystem;
using detail::json;

namespace {

constexpr double kMillimeters = 1000.0;

json rotation_json(const Mat3 &r) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.push_back(r(i, j) + 0.0);  // + 0.0 drops -0
  }
  return out;
}

json translation_mm_json(const Vec3 &t) {
  const Vec3 mm = t * kMillimeters;
  return json::array({mm.x() + 0.0, mm.y() + 0.0, mm.z() + 0.0});
}

Mat3 rotation_from_json(const json &j, const std::string &where) {
  const std::vector<double> v = detail::number_array(j, 9, where);
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r(i, k) = v[3 * i + k];
  }
  return r;
}

Vec3 translation_from_json(const json &j, const std::string &where) {
  const std::vector<double> v = detail::number_array(j, 3, where);
  return Vec3(v[0], v[1], v[2]) / kMillimeters;
}

Pose pose_from_json(const json &rot, const json &trans, Frame from, Frame to,
                    const std::string &where) {
  try {
    return Pose(rotation_from_json(rot, where), translation_from_json(trans, where), from, to);
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::kParse) throw;
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", where, e.what()));
  }
}

std::string image_file(int image_id) { return fmt::format("{:06d}.png", image_id); }

const json &image_entry(const json &doc, int image_id, const fs::path &path) {
  return detail::member(doc, std::to_string(image_id), path.string());
}

json bbox_json(const PixelRect &r) { return json::array({r.x, r.y, r.width, r.height}); }

void write_json(const fs::path &path, const json &j) {
  detail::write_text_atomic(path, j.dump(2) + "\n");
}

json labels_json(std::span<const GraspLabel> labels) {
  json out = json::array();
  for (const GraspLabel &l : labels) {
    json dirs = json::array();
    for (Direction d : kAllDirections) {
      if (l.missing_directions.contains(d)) dirs.push_back(std::string(to_string(d)));
    }
    out.push_back({{"obj_idx", l.object_index},
                   {"graspable", l.graspable},
                   {"missing_directions", dirs}});
  }
  return out;
}

std::vector<GraspLabel> labels_from_json(const json &list, const std::string &where) {
  if (!list.is_array()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: expected an array", where));
  }
  std::vector<GraspLabel> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = fmt::format("{}[{}]", where, i);
    GraspLabel l;
    const int idx = detail::field<int>(list[i], "obj_idx", at);
    if (idx != static_cast<int>(i)) {
      throw Error(ErrorKind::kParse, fmt::format("{}.obj_idx: expected {}", at, i));
    }
    l.object_index = i;
    l.graspable = detail::field<bool>(list[i], "graspable", at);
    const json &dirs = detail::member(list[i], "missing_directions", at);
    if (!dirs.is_array()) {
      throw Error(ErrorKind::kParse, fmt::format("{}.missing_directions: expected an array", at));
    }
    for (const json &d : dirs) {
      const auto it = std::find_if(kAllDirections.begin(), kAllDirections.end(),
                                   [&](Direction dir) {
                                     return d.is_string() && d.get<std::string>() == to_string(dir);
                                   });
      if (it == kAllDirections.end()) {
        throw Error(ErrorKind::kParse,
                    fmt::format("{}.missing_directions: unknown direction {}", at, d.dump()));
      }
      l.missing_directions.insert(*it);
    }
    out.push_back(l);
  }
  return out;
}

json camera_json(const SceneGroundTruth &scene) {
  const CameraIntrinsics &k = scene.intrinsics;
  const Pose w2c = scene.camera_pose.inverse();
  const Pose &c2s = scene.imu_extrinsic;
  return {{"cam_K", {k.fx, 0.0, k.cx, 0.0, k.fy, k.cy, 0.0, 0.0, 1.0}},
          {"width", k.width},
          {"height", k.height},
          {"depth_scale", 1.0},
          {"cam_R_w2c", rotation_json(w2c.rotation())},
          {"cam_t_w2c", translation_mm_json(w2c.translation())},
          {"imu_accel", {scene.imu_accel.x(), scene.imu_accel.y(), scene.imu_accel.z()}},
          {"imu_R_c2s", rotation_json(c2s.rotation())},
          {"imu_t_c2s", translation_mm_json(c2s.translation())}};
}

void read_camera(const json &cam, SceneGroundTruth &scene, const std::string &where) {
  const std::vector<double> k = detail::number_array(detail::member(cam, "cam_K", where), 9,
                                                     where + ".cam_K");
  if (k[1] != 0.0 || k[3] != 0.0 || k[6] != 0.0 || k[7] != 0.0 || k[8] != 1.0) {
    throw Error(ErrorKind::kParse, fmt::format("{}.cam_K: unsupported skew or layout", where));
  }
  scene.intrinsics.fx = k[0];
  scene.intrinsics.cx = k[2];
  scene.intrinsics.fy = k[4];
  scene.intrinsics.cy = k[5];
  scene.intrinsics.width = detail::field<int>(cam, "width", where);
  scene.intrinsics.height = detail::field<int>(cam, "height", where);
  try {
    scene.intrinsics.validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", where, e.what()));
  }
  if (detail::field<double>(cam, "depth_scale", where) != 1.0) {
    throw Error(ErrorKind::kParse, fmt::format("{}.depth_scale: only 1.0 is supported", where));
  }
  const Pose w2c =
      pose_from_json(detail::member(cam, "cam_R_w2c", where), detail::member(cam, "cam_t_w2c", where),
                     Frame::kWorld, Frame::kCamera, where + ".cam_R_w2c");
  scene.camera_pose = w2c.inverse();
  const std::vector<double> a =
      detail::number_array(detail::member(cam, "imu_accel", where), 3, where + ".imu_accel");
  scene.imu_accel = Vec3(a[0], a[1], a[2]);
  scene.imu_extrinsic =
      pose_from_json(detail::member(cam, "imu_R_c2s", where), detail::member(cam, "imu_t_c2s", where),
                     Frame::kCamera, Frame::kSensor, where + ".imu_R_c2s");
}

json coco_json(const RenderedFrame &frame, int image_id) {
  json annotations = json::array();
  for (std::size_t i = 0; i < frame.modal_masks.size(); ++i) {
    const Mask &modal = frame.modal_masks[i];
    const Mask &amodal = frame.amodal_masks[i];
    annotations.push_back({{"id", i + 1},
                           {"image_id", image_id},
                           {"category_id", kBrickObjectId},
                           {"inst_id", i},
                           {"iscrowd", 0},
                           {"area", modal.count()},
                           {"bbox", bbox_json(modal.bounds())},
                           {"segmentation", detail::rle_to_json(encode_rle(modal))},
                           {"amodal_area", amodal.count()},
                           {"amodal_bbox", bbox_json(amodal.bounds())},
                           {"amodal_segmentation", detail::rle_to_json(encode_rle(amodal))}});
  }
  return {{"info", {{"description", "procedural brick stacks"}}},
          {"images", json::array({{{"id", image_id},
                                   {"file_name", "depth/" + image_file(image_id)},
                                   {"width", frame.width},
                                   {"height", frame.height}}})},
          {"categories", json::array({{{"id", kBrickObjectId}, {"name", "brick"}}})},
          {"annotations", annotations}};
}

void check_consistent(const SceneGroundTruth &scene, const RenderedFrame &frame,
                      std::span<const GraspLabel> labels) {
  const std::size_t n = scene.object_poses.size();
  if (frame.modal_masks.size() != n || frame.amodal_masks.size() != n || labels.size() != n) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("object counts disagree: {} poses, {} modal, {} amodal, {} labels", n,
                            frame.modal_masks.size(), frame.amodal_masks.size(), labels.size()));
  }
  if (frame.width != scene.intrinsics.width || frame.height != scene.intrinsics.height) {
    throw Error(ErrorKind::kInvalidArgument, "frame size does not match the intrinsics");
  }
}

void write_scene_files(const fs::path &dir, const SceneGroundTruth &scene,
                       const RenderedFrame &frame, std::span<const GraspLabel> labels,
                       int image_id, const WriteOptions &options) {
  const std::string key = std::to_string(image_id);
  fs::create_directories(dir / "depth");
  fs::create_directories(dir / "rgb");

  write_json(dir / "scene_camera.json", json{{key, camera_json(scene)}});

  json gt = json::array();
  json info = json::array();
  for (std::size_t i = 0; i < scene.object_poses.size(); ++i) {
    const Pose o2c = scene.object_to_camera(i);
    gt.push_back({{"cam_R_m2c", rotation_json(o2c.rotation())},
                  {"cam_t_m2c", translation_mm_json(o2c.translation())},
                  {"obj_id", kBrickObjectId}});
    const std::size_t all = frame.amodal_masks[i].count();
    const std::size_t visib = frame.modal_masks[i].count();
    info.push_back({{"bbox_obj", bbox_json(frame.amodal_masks[i].bounds())},
                    {"bbox_visib", bbox_json(frame.modal_masks[i].bounds())},
                    {"px_count_all", all},
                    {"px_count_visib", visib},
                    {"visib_fract", all == 0 ? 0.0 : static_cast<double>(visib) / all}});
  }
  write_json(dir / "scene_gt.json", json{{key, gt}});
  write_json(dir / "scene_gt_info.json", json{{key, info}});
  write_json(dir / "scene_graspable.json", json{{key, labels_json(labels)}});
  write_json(dir / "scene_gt_coco.json", coco_json(frame, image_id));

  write_depth_png(dir / "depth" / image_file(image_id), frame.width, frame.height, frame.depth);
  write_placeholder_rgb(dir / "rgb" / image_file(image_id), frame.width, frame.height);

  if (options.debug_masks) {
    fs::create_directories(dir / "mask");
    fs::create_directories(dir / "mask_visib");
    for (std::size_t i = 0; i < frame.modal_masks.size(); ++i) {
      const std::string name = fmt::format("{:06d}_{:06d}.png", image_id, i);
      write_mask_png(dir / "mask" / name, frame.amodal_masks[i]);
      write_mask_png(dir / "mask_visib" / name, frame.modal_masks[i]);
    }
  }
}

bool all_digits(const std::string &s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

fs::path DatasetLayout::scene_dir(int scene_id) const {
  return root / split / fmt::format("{:06d}", scene_id);
}

void write_scene(const SceneGroundTruth &scene, const RenderedFrame &frame,
                 std::span<const GraspLabel> labels, const DatasetLayout &layout, int scene_id,
                 int image_id, const WriteOptions &options) {
  check_consistent(scene, frame, labels);
  const fs::path target = layout.scene_dir(scene_id);
  std::error_code ec;
  if (fs::exists(target) && !options.overwrite) {
    throw Error(ErrorKind::kRefusesOverwrite,
                fmt::format("{}: scene exists; pass overwrite to replace it", target.string()));
  }
  fs::path staging = target;
  staging += ".tmp";
  fs::remove_all(staging, ec);
  try {
    fs::create_directories(staging);
    write_scene_files(staging, scene, frame, labels, image_id, options);
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(staging, target);
  } catch (const fs::filesystem_error &e) {
    fs::remove_all(staging, ec);
    throw Error(ErrorKind::kStorage, fmt::format("{}: {}", target.string(), e.what()));
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

SceneGroundTruth read_scene_ground_truth(const DatasetLayout &layout, int scene_id,
                                         int image_id) {
  const fs::path dir = layout.scene_dir(scene_id);
  SceneGroundTruth scene;

  const fs::path cam_path = dir / "scene_camera.json";
  const json cam_doc = detail::read_json_file(cam_path);
  read_camera(image_entry(cam_doc, image_id, cam_path), scene,
              fmt::format("{}:{}", cam_path.string(), image_id));

  const fs::path gt_path = dir / "scene_gt.json";
  const json gt_doc = detail::read_json_file(gt_path);
  const json &gt = image_entry(gt_doc, image_id, gt_path);
  const std::string gt_where = fmt::format("{}:{}", gt_path.string(), image_id);
  if (!gt.is_array()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: expected an array", gt_where));
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const std::string at = fmt::format("{}[{}]", gt_where, i);
    const Pose o2c =
        pose_from_json(detail::member(gt[i], "cam_R_m2c", at), detail::member(gt[i], "cam_t_m2c", at),
                       Frame::kObject, Frame::kCamera, at);
    scene.object_poses.push_back(scene.camera_pose * o2c);
  }

  const std::vector<GraspLabel> labels = read_labels(layout, scene_id, image_id);
  if (labels.size() != scene.object_poses.size()) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: {} graspability flags for {} objects",
                            (dir / "scene_graspable.json").string(), labels.size(),
                            scene.object_poses.size()));
  }
  for (const GraspLabel &l : labels) scene.graspable.push_back(l.graspable);
  return scene;
}

std::vector<GraspLabel> read_labels(const DatasetLayout &layout, int scene_id, int image_id) {
  const fs::path path = layout.scene_dir(scene_id) / "scene_graspable.json";
  const json doc = detail::read_json_file(path);
  return labels_from_json(image_entry(doc, image_id, path),
                          fmt::format("{}:{}", path.string(), image_id));
}

void write_labels(const DatasetLayout &layout, int scene_id, int image_id,
                  std::span<const GraspLabel> labels) {
  write_json(layout.scene_dir(scene_id) / "scene_graspable.json",
             json{{std::to_string(image_id), labels_json(labels)}});
}

SceneRecord read_scene(const DatasetLayout &layout, int scene_id, int image_id) {
  SceneRecord rec;
  rec.scene = read_scene_ground_truth(layout, scene_id, image_id);
  rec.labels = read_labels(layout, scene_id, image_id);
  const fs::path dir = layout.scene_dir(scene_id);
  const std::size_t n = rec.scene.object_poses.size();
  const int width = rec.scene.intrinsics.width;
  const int height = rec.scene.intrinsics.height;

  const fs::path coco_path = dir / "scene_gt_coco.json";
  const json coco = detail::read_json_file(coco_path);
  const json &anns = detail::member(coco, "annotations", coco_path.string());
  std::vector<const json *> by_instance(n, nullptr);
  if (!anns.is_array()) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}.annotations: expected an array", coco_path.string()));
  }
  for (std::size_t a = 0; a < anns.size(); ++a) {
    const std::string at = fmt::format("{}.annotations[{}]", coco_path.string(), a);
    if (detail::field<int>(anns[a], "image_id", at) != image_id) continue;
    const int inst = detail::field<int>(anns[a], "inst_id", at);
    if (inst < 0 || static_cast<std::size_t>(inst) >= n || by_instance[inst]) {
      throw Error(ErrorKind::kParse, fmt::format("{}.inst_id: invalid or duplicate", at));
    }
    by_instance[inst] = &anns[a];
  }

  rec.frame.width = width;
  rec.frame.height = height;
  rec.frame.instance_map.assign(static_cast<std::size_t>(width) * height, kNoInstance);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string at = fmt::format("{}: object {}", coco_path.string(), i);
    if (!by_instance[i]) {
      throw Error(ErrorKind::kParse, fmt::format("{}: missing mask annotation", at));
    }
    const RunLengthMask modal =
        detail::rle_from_json(detail::member(*by_instance[i], "segmentation", at), at + ".segmentation");
    const RunLengthMask amodal = detail::rle_from_json(
        detail::member(*by_instance[i], "amodal_segmentation", at), at + ".amodal_segmentation");
    if (modal.width != width || modal.height != height || amodal.width != width ||
        amodal.height != height) {
      throw Error(ErrorKind::kParse, fmt::format("{}: mask size differs from the image", at));
    }
    rec.frame.modal_masks.push_back(decode_rle(modal));
    rec.frame.amodal_masks.push_back(decode_rle(amodal));
    const Mask &m = rec.frame.modal_masks.back();
    const PixelRect r = m.roi();
    for (int y = r.y; y < r.y + r.height; ++y) {
      for (int x = r.x; x < r.x + r.width; ++x) {
        if (!m.at(x, y)) continue;
        std::int32_t &slot = rec.frame.instance_map[static_cast<std::size_t>(y) * width + x];
        if (slot != kNoInstance) {
          throw Error(ErrorKind::kParse, fmt::format("{}: modal masks overlap", at));
        }
        slot = static_cast<std::int32_t>(i);
      }
    }
  }

  int dw = 0, dh = 0;
  const fs::path depth_path = dir / "depth" / image_file(image_id);
  rec.frame.depth = read_depth_png(depth_path, dw, dh);
  if (dw != width || dh != height) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: depth image is {}x{}, expected {}x{}", depth_path.string(), dw,
                            dh, width, height));
  }
  return rec;
}

std::vector<int> list_scenes(const DatasetLayout &layout) {
  const fs::path dir = layout.root / layout.split;
  std::vector<int> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const fs::directory_entry &e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_directory() && all_digits(name)) out.push_back(std::stoi(name));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_manifest(const fs::path &root, const RunConfig &config, const ObjectModel &model) {
  fs::create_directories(root / "models");
  const Vec3 size = config.stack.brick_size;
  write_json(root / "dataset_info.json",
             json{{"units", "mm"},
                  {"depth_scale", 1.0},
                  {"splits",
                   {{"train", config.splits.train},
                    {"val", config.splits.val},
                    {"test", config.splits.test}}},
                  {"object_id", kBrickObjectId},
                  {"model", "models/obj_000001.ply"},
                  {"brick_size_mm", translation_mm_json(size)},
                  {"model_points", config.model_points},
                  {"config", "config.toml"}});
  detail::write_text_atomic(root / "config.toml", config.to_text());

  Box3 box = Box3::hull(model.vertices());
  json syms = json::array();
  for (const Mat3 &s : model.symmetries()) {
    if (s.isIdentity(0.0)) continue;
    json m = json::array();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m.push_back(s(i, j));
      m.push_back(0.0);
    }
    for (double v : {0.0, 0.0, 0.0, 1.0}) m.push_back(v);
    syms.push_back(m);
  }
  write_json(root / "models" / "models_info.json",
             json{{std::to_string(kBrickObjectId),
                   {{"diameter", model.diameter() * kMillimeters},
                    {"min_x", box.min.x() * kMillimeters},
                    {"min_y", box.min.y() * kMillimeters},
                    {"min_z", box.min.z() * kMillimeters},
                    {"size_x", box.size().x() * kMillimeters},
                    {"size_y", box.size().y() * kMillimeters},
                    {"size_z", box.size().z() * kMillimeters},
                    {"symmetries_discrete", syms}}}});

  std::string ply = fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\n"
      "property float z\nelement face {}\nproperty list uchar int vertex_indices\nend_header\n",
      model.vertices().size(), model.triangles().size());
  for (const Vec3 &v : model.vertices()) {
    ply += fmt::format("{} {} {}\n", v.x() * kMillimeters, v.y() * kMillimeters,
                       v.z() * kMillimeters);
  }
  for (const auto &t : model.triangles()) ply += fmt::format("3 {} {} {}\n", t[0], t[1], t[2]);
  detail::write_text_atomic(root / "models" / "obj_000001.ply", ply);
}

DatasetManifest read_manifest(const fs::path &root) {
  const fs::path path = root / "dataset_info.json";
  const json doc = detail::read_json_file(path);
  const std::string where = path.string();
  DatasetManifest m;
  m.units = detail::field<std::string>(doc, "units", where);
  if (m.units != "mm") {
    throw Error(ErrorKind::kParse, fmt::format("{}.units: expected \"mm\"", where));
  }
  m.depth_scale = detail::field<double>(doc, "depth_scale", where);
  const json &splits = detail::member(doc, "splits", where);
  for (const char *name : {"train", "val", "test"}) {
    m.splits.emplace_back(name, detail::field<int>(splits, name, where + ".splits"));
  }
  m.brick_size = translation_from_json(detail::member(doc, "brick_size_mm", where),
                                       where + ".brick_size_mm");
  m.model_points = detail::field<int>(doc, "model_points", where);
  return m;
}

void write_label_set(const fs::path &path, const LabelSet &set) {
  json images = json::array();
  for (const LabelSet::Entry &e : set.entries) {
    images.push_back({{"scene_id", e.key.scene_id},
                      {"im_id", e.key.image_id},
                      {"labels", labels_json(e.labels)}});
  }
  write_json(path, json{{"split", set.split}, {"images", images}});
}

LabelSet read_label_set(const fs::path &path) {
  const json doc = detail::read_json_file(path);
  const std::string where = path.string();
  LabelSet set;
  set.split = detail::field<std::string>(doc, "split", where);
  const json &images = detail::member(doc, "images", where);
  if (!images.is_array()) {
    throw Error(ErrorKind::kParse, fmt::format("{}.images: expected an array", where));
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string at = fmt::format("{}.images[{}]", where, i);
    LabelSet::Entry e;
    e.key.scene_id = detail::field<int>(images[i], "scene_id", at);
    e.key.image_id = detail::field<int>(images[i], "im_id", at);
    e.labels = labels_from_json(detail::member(images[i], "labels", at), at + ".labels");
    set.entries.push_back(std::move(e));
  }
  return set;
}

std::string report_json(const EvalReport &report) {
  json rows = json::array();
  for (std::size_t i = 0; i < report.add_s.per_threshold.size(); ++i) {
    const ThresholdCount &a = report.add_s.per_threshold[i];
    const ThresholdCount &m = report.mssd.per_threshold[i];
    rows.push_back({{"threshold_m", a.threshold},
                    {"add_s_tp", a.true_positives},
                    {"add_s_fp", a.false_positives},
                    {"add_s_precision", a.precision()},
                    {"mssd_tp", m.true_positives},
                    {"mssd_fp", m.false_positives},
                    {"mssd_precision", m.precision()}});
  }
  const json doc{{"ap_add", report.ap_add},
                 {"ap_mssd", report.ap_mssd},
                 {"map", report.map},
                 {"images", report.images},
                 {"predictions", report.predictions},
                 {"no_predictions", report.add_s.no_predictions},
                 {"graspable_ground_truth", report.graspable_ground_truth},
                 {"unmatched_ground_truth", report.unmatched_ground_truth},
                 {"per_threshold", rows}};
  return doc.dump(2) + "\n";
}

std::string report_table(const EvalReport &report) {
  std::string out = fmt::format("{:>12} {:>10} {:>10}\n", "threshold_m", "P(ADD-S)", "P(MSSD)");
  for (std::size_t i = 0; i < report.add_s.per_threshold.size(); ++i) {
    out += fmt::format("{:>12.4f} {:>10.4f} {:>10.4f}\n", report.add_s.per_threshold[i].threshold,
                       report.add_s.per_threshold[i].precision(),
                       report.mssd.per_threshold[i].precision());
  }
  out += fmt::format("AP_ADD {:.4f}  AP_MSSD {:.4f}  mAP {:.4f}\n", report.ap_add,
                     report.ap_mssd, report.map);
  out += fmt::format("images {}  predictions {}  graspable {}  unmatched {}\n", report.images,
                     report.predictions, report.graspable_ground_truth,
                     report.unmatched_ground_truth);
  if (report.add_s.no_predictions) out += "note: no predictions; precision reported as 0\n";
  return out;
}

}  // namespace stackgrasp
