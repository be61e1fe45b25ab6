#include "stackgrasp/pipeline.hpp"

#include <map>

#include <fmt/format.h>
#include <json.hpp>

#include "stackgrasp/error.hpp"
#include "stackgrasp/graspability.hpp"
#include "stackgrasp/random.hpp"
#include "stackgrasp/render.hpp"

namespace stackgrasp {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Independent streams below the scene seed.
enum Stream : std::uint64_t {
  kStackStream = 1,
  kCameraStream = 2,
  kImuStream = 3,
  kEstimateStream = 4,
  kSelectStream = 5,
};

std::uint64_t split_index(std::string_view split) {
  if (split == "train") return 0;
  if (split == "val") return 1;
  if (split == "test") return 2;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown split '{}'", split));
}

int split_size(const RunConfig &config, std::string_view split) {
  switch (split_index(split)) {
    case 0: return config.splits.train;
    case 1: return config.splits.val;
    default: return config.splits.test;
  }
}

std::vector<Pose> selected_poses(std::span<const PoseHypothesis> hyps,
                                 std::span<const ScoredCandidate> chosen) {
  std::vector<Pose> out;
  out.reserve(chosen.size());
  for (const ScoredCandidate &c : chosen) out.push_back(hyps[c.hypothesis].pose);
  return out;
}

ImageGroundTruth ground_truth_of(const SceneGroundTruth &scene, ImageKey key) {
  ImageGroundTruth gt;
  gt.key = key;
  for (std::size_t i = 0; i < scene.object_poses.size(); ++i) {
    gt.poses.push_back(scene.object_to_camera(i));
  }
  gt.graspable = scene.graspable;
  return gt;
}

}  // namespace

ObjectModel make_model(const RunConfig &config) {
  return ObjectModel::cuboid(config.stack.brick_size, config.model_points);
}

std::uint64_t scene_seed(const RunConfig &config, std::string_view split, int scene_id) {
  if (scene_id < 0) throw Error(ErrorKind::kInvalidArgument, "scene id must be non-negative");
  return mix_seed(config.seed, (split_index(split) << 32) | static_cast<std::uint64_t>(scene_id));
}

SceneRecord generate_scene(const RunConfig &config, const ObjectModel &model,
                           std::string_view split, int scene_id) {
  const std::uint64_t seed = scene_seed(config, split, scene_id);
  Rng rng(seed);
  StackSpec spec = config.stack;
  if (!rng.bernoulli(config.irregular_fraction)) spec.removal_probability = 0.0;
  spec.seed = mix_seed(seed, kStackStream);

  SceneRecord rec;
  SceneGroundTruth &scene = rec.scene;
  scene.object_poses = generate_stack(spec);
  const Box3 bounds = scene_bounds(scene.object_poses, model);
  const CameraConfig &cam = config.camera;
  scene.camera_pose = sample_camera(
      bounds.center(), {cam.radius_min, cam.radius_max},
      {cam.elevation_min_deg * kDeg, cam.elevation_max_deg * kDeg},
      mix_seed(seed, kCameraStream), cam.roll_max_deg * kDeg);
  scene.intrinsics = cam.intrinsics;
  scene.imu_extrinsic =
      Pose(Mat3::Identity(), config.imu.extrinsic_translation, Frame::kCamera, Frame::kSensor);
  scene.imu_accel = synth_imu(scene.camera_pose, scene.imu_extrinsic, config.imu.noise_std,
                              mix_seed(seed, kImuStream));
  rec.labels = label_scene(scene.object_poses, model);
  for (const GraspLabel &l : rec.labels) scene.graspable.push_back(l.graspable);
  rec.frame = render(scene, model);
  return rec;
}

void generate_dataset(const RunConfig &config, const fs::path &root,
                      const GenerateOptions &options) {
  config.validate();
  if (fs::exists(root / "dataset_info.json") && !options.overwrite) {
    throw Error(ErrorKind::kRefusesOverwrite,
                fmt::format("{}: dataset exists; pass --force to replace it", root.string()));
  }
  const ObjectModel model = make_model(config);
  WriteOptions write;
  write.overwrite = options.overwrite;
  write.debug_masks = options.debug_masks;
  for (const char *split : {"train", "val", "test"}) {
    const DatasetLayout layout{root, split};
    parallel_map<int>(split_size(config, split), options.threads, [&](int id) {
      const SceneRecord rec = generate_scene(config, model, split, id);
      write_scene(rec.scene, rec.frame, rec.labels, layout, id, 0, write);
      return id;
    });
  }
  write_manifest(root, config, model);
}

RunConfig dataset_config(const fs::path &root) {
  read_manifest(root);
  return RunConfig::from_file(root / "config.toml");
}

LabelSet label_dataset(const fs::path &root, const std::string &split, unsigned threads) {
  const RunConfig config = dataset_config(root);
  const ObjectModel model = make_model(config);
  const DatasetLayout layout{root, split};
  const std::vector<int> ids = list_scenes(layout);
  LabelSet set;
  set.split = split;
  const auto entries = parallel_map<LabelSet::Entry>(
      static_cast<int>(ids.size()), threads, [&](int k) {
        const SceneGroundTruth gt = read_scene_ground_truth(layout, ids[k]);
        return LabelSet::Entry{{ids[k], 0}, label_scene(gt.object_poses, model)};
      });
  set.entries.assign(entries.begin(), entries.end());
  return set;
}

std::vector<PoseHypothesis> scene_hypotheses(const RunConfig &config, const ObjectModel &model,
                                             const SceneRecord &record, std::string_view split,
                                             int scene_id,
                                             const std::optional<fs::path> &predictions) {
  if (!predictions) {
    return oracle_estimate(record.scene, record.frame, model, config.noise,
                           mix_seed(scene_seed(config, split, scene_id), kEstimateStream));
  }
  std::vector<PoseHypothesis> hyps = load_predictions(
      *predictions, scene_id, 0, MaskFallback{&model, record.scene.intrinsics});
  for (PoseHypothesis &h : hyps) {
    if (h.mask_missing) h.modal_mask = restrict_to_occupied(h.modal_mask, record.frame);
  }
  return hyps;
}

std::vector<ImageHypotheses> select_dataset(const RunConfig &config, const fs::path &root,
                                            const std::string &split, const SelectionRun &run) {
  run.filter.validate();
  const ObjectModel model = make_model(config);
  const DatasetLayout layout{root, split};
  const std::vector<int> ids = list_scenes(layout);
  return parallel_map<ImageHypotheses>(static_cast<int>(ids.size()), run.threads, [&](int k) {
    const int id = ids[k];
    const SceneRecord rec = read_scene(layout, id);
    const std::vector<PoseHypothesis> hyps =
        scene_hypotheses(config, model, rec, split, id, run.predictions);
    const ScoringResult scored =
        score_candidates(hyps, model, rec.scene.intrinsics, rec.scene.imu_accel,
                         rec.scene.imu_extrinsic);
    const std::vector<ScoredCandidate> chosen =
        run_selector(run.selector, scored.candidates, run.filter,
                     mix_seed(scene_seed(config, split, id), kSelectStream));
    ImageHypotheses out{id, 0, {}};
    for (const ScoredCandidate &c : chosen) out.hypotheses.push_back(hyps[c.hypothesis]);
    return out;
  });
}

std::vector<ImageGroundTruth> dataset_ground_truth(const fs::path &root, const std::string &split,
                                                   const LabelSet *labels) {
  const DatasetLayout layout{root, split};
  std::map<ImageKey, const LabelSet::Entry *> by_key;
  if (labels) {
    for (const LabelSet::Entry &e : labels->entries) by_key[e.key] = &e;
  }
  std::vector<ImageGroundTruth> out;
  for (int id : list_scenes(layout)) {
    const ImageKey key{id, 0};
    ImageGroundTruth gt = ground_truth_of(read_scene_ground_truth(layout, id), key);
    if (labels) {
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        throw Error(ErrorKind::kMissingGroundTruth,
                    fmt::format("label file has no entry for scene {} image 0", id));
      }
      if (it->second->labels.size() != gt.poses.size()) {
        throw Error(ErrorKind::kParse,
                    fmt::format("label file: scene {} has {} labels for {} objects", id,
                                it->second->labels.size(), gt.poses.size()));
      }
      for (std::size_t i = 0; i < gt.poses.size(); ++i) {
        gt.graspable[i] = it->second->labels[i].graspable;
      }
    }
    out.push_back(std::move(gt));
  }
  return out;
}

std::vector<ImageSelection> read_selections(const fs::path &csv_path) {
  std::map<ImageKey, ImageSelection> grouped;
  for (const PredictionRecord &r : read_prediction_csv(csv_path)) {
    const ImageKey key{r.scene_id, r.image_id};
    ImageSelection &sel = grouped[key];
    sel.key = key;
    sel.poses.emplace_back(r.rotation, r.translation_mm / 1000.0, Frame::kObject, Frame::kCamera);
  }
  std::vector<ImageSelection> out;
  for (auto &[key, sel] : grouped) out.push_back(std::move(sel));
  return out;
}

BenchmarkResult run_benchmark(const RunConfig &config, const BenchmarkConfig &bench) {
  config.validate();
  if (bench.scenes < 0) throw Error(ErrorKind::kInvalidArgument, "scene count is negative");
  if (bench.selectors.empty() || bench.top_ks.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "benchmark needs selectors and top_k values");
  }
  const ObjectModel model = make_model(config);
  std::vector<FilterConfig> filters;
  for (int k : bench.top_ks) {
    FilterConfig f = config.filter;
    f.top_k = k;
    f.validate();
    filters.push_back(f);
  }
  const std::size_t n_rows = bench.selectors.size() * filters.size();

  struct PerScene {
    ImageGroundTruth gt;
    std::vector<std::vector<Pose>> selections;  // one per row
    std::size_t degenerate = 0;
  };
  const auto scenes = parallel_map<PerScene>(bench.scenes, bench.threads, [&](int id) {
    const SceneRecord rec = generate_scene(config, model, bench.split, id);
    const std::vector<PoseHypothesis> hyps =
        scene_hypotheses(config, model, rec, bench.split, id, std::nullopt);
    const ScoringResult scored = score_candidates(hyps, model, rec.scene.intrinsics,
                                                  rec.scene.imu_accel, rec.scene.imu_extrinsic);
    PerScene out;
    out.gt = ground_truth_of(rec.scene, {id, 0});
    out.degenerate = scored.degenerate.size();
    const std::uint64_t select_seed =
        mix_seed(scene_seed(config, bench.split, id), kSelectStream);
    for (Selector s : bench.selectors) {
      for (const FilterConfig &f : filters) {
        out.selections.push_back(
            selected_poses(hyps, run_selector(s, scored.candidates, f, select_seed)));
      }
    }
    return out;
  });

  BenchmarkResult result;
  result.seed = config.seed;
  result.scenes = bench.scenes;
  std::vector<ImageGroundTruth> gts;
  for (const PerScene &s : scenes) {
    gts.push_back(s.gt);
    result.degenerate += s.degenerate;
  }
  for (std::size_t row = 0; row < n_rows; ++row) {
    std::vector<ImageSelection> sels;
    for (const PerScene &s : scenes) sels.push_back({s.gt.key, s.selections[row]});
    BenchmarkRow r;
    r.selector = bench.selectors[row / filters.size()];
    r.top_k = filters[row % filters.size()].top_k;
    r.report = evaluate_dataset(sels, gts, model, config.eval);
    result.rows.push_back(std::move(r));
  }
  return result;
}

std::string benchmark_table(const BenchmarkResult &result) {
  std::string out = fmt::format("seed {}  scenes {}\n", result.seed, result.scenes);
  out += fmt::format("{:<12} {:>5} {:>8} {:>8} {:>8} {:>11}\n", "strategy", "top_k", "AP_ADD",
                     "AP_MSSD", "mAP", "predictions");
  for (const BenchmarkRow &r : result.rows) {
    const bool uncapped = r.selector == Selector::kAll || r.selector == Selector::kVision;
    const std::string k = uncapped ? "-" : std::to_string(r.top_k);
    out += fmt::format("{:<12} {:>5} {:>8.4f} {:>8.4f} {:>8.4f} {:>11}\n", to_string(r.selector),
                       k, r.report.ap_add, r.report.ap_mssd, r.report.map, r.report.predictions);
  }
  return out;
}

std::string benchmark_json(const BenchmarkResult &result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchmarkRow &r : result.rows) {
    rows.push_back({{"strategy", std::string(to_string(r.selector))},
                    {"top_k", r.top_k},
                    {"ap_add", r.report.ap_add},
                    {"ap_mssd", r.report.ap_mssd},
                    {"map", r.report.map},
                    {"images", r.report.images},
                    {"predictions", r.report.predictions},
                    {"graspable_ground_truth", r.report.graspable_ground_truth},
                    {"unmatched_ground_truth", r.report.unmatched_ground_truth}});
  }
  const nlohmann::json doc{{"seed", result.seed},
                           {"scenes", result.scenes},
                           {"degenerate_hypotheses", result.degenerate},
                           {"rows", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace stackgrasp
