#include <filesystem>

#include <doctest.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/io.hpp"
#include "stackgrasp/pipeline.hpp"
#include "support.hpp"

using namespace stackgrasp;
namespace fs = std::filesystem;
using test::max_abs;

namespace {

ErrorKind kind_of(const std::function<void()> &fn, std::string *message = nullptr) {
  try {
    fn();
  } catch (const Error &e) {
    if (message) *message = e.what();
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kInvalidArgument;
}

struct Written {
  test::TempDir dir;
  RunConfig config;
  ObjectModel model;
  SceneRecord rec;
  DatasetLayout layout;

  Written() : model(make_model(config)) {
    config.seed = 11;
    config.irregular_fraction = 0.0;  // full 27-brick grid
    model = make_model(config);
    rec = generate_scene(config, model, "test", 4);
    layout = {dir.path(), "test"};
    write_scene(rec.scene, rec.frame, rec.labels, layout, 4);
  }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config text round-trips") {
  RunConfig c;
  c.seed = 1234567890123ull;
  c.splits = {5, 2, 3};
  c.stack.grid = {2, 4, 1};
  c.stack.gap = 0.003;
  c.camera.intrinsics.width = 800;
  c.noise.trans_std = 0.0125;
  c.filter.top_k = 3;
  c.filter.order = FilterOrder::kVisionThenHeight;
  c.eval.threshold_fractions = {0.1, 0.2};
  const std::string text = c.to_text();
  const RunConfig back = RunConfig::from_text(text);
  CHECK(back.to_text() == text);
  CHECK(back.seed == c.seed);
  CHECK(back.stack.grid == c.stack.grid);
  CHECK(back.noise.trans_std == c.noise.trans_std);
  CHECK(back.filter.order == FilterOrder::kVisionThenHeight);
  CHECK(RunConfig::from_text(RunConfig{}.to_text()).to_text() == RunConfig{}.to_text());
}

TEST_CASE("config grammar") {
  const RunConfig c = RunConfig::from_text(
      "# comment\n"
      "seed = 9   # trailing comment\n"
      "stack.gap = 0.001\n"
      "[filter]\n"
      "top_k = 2\n"
      "order = \"vision_then_height\"\n");
  CHECK(c.seed == 9);
  CHECK(c.stack.gap == 0.001);
  CHECK(c.filter.top_k == 2);
  CHECK(c.filter.order == FilterOrder::kVisionThenHeight);

  std::string msg;
  CHECK(kind_of([] { (void)RunConfig::from_text("[stack]\nbogus = 1\n", "a.toml"); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("stack.bogus") != std::string::npos);
  CHECK(kind_of([] { (void)RunConfig::from_text("seed = 1\nseed = 2\n", "b.toml"); }, &msg) ==
        ErrorKind::kParse);
  CHECK(msg.find("duplicate key 'seed'") != std::string::npos);
  CHECK(msg.find("b.toml") != std::string::npos);
  CHECK(kind_of([] { (void)RunConfig::from_text("[stack\n"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_text("seed 3\n"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_text("[stack]\ngrid = [3, 3]\n"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_text("[stack]\ngrid = [3, 3.5, 3]\n"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_text("[filter]\norder = \"sideways\"\n"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_text("[camera]\nradius_min = 3\n"); }) ==
        ErrorKind::kParse);
  CHECK(kind_of([] { (void)RunConfig::from_file("/nonexistent/run.toml"); }) ==
        ErrorKind::kParse);
}

TEST_CASE("scene round-trip") {
  const Written w;
  const SceneRecord back = read_scene(w.layout, 4);
  const SceneRecord &rec = w.rec;
  REQUIRE(back.scene.object_poses.size() == 27);
  for (std::size_t i = 0; i < 27; ++i) {
    CHECK(max_abs(back.scene.object_poses[i].translation() -
                  rec.scene.object_poses[i].translation()) < 1e-6);
    CHECK(max_abs(back.scene.object_poses[i].rotation() - rec.scene.object_poses[i].rotation()) <
          1e-9);
    CHECK(back.frame.modal_masks[i] == rec.frame.modal_masks[i]);
    CHECK(back.frame.amodal_masks[i] == rec.frame.amodal_masks[i]);
    CHECK(back.labels[i].graspable == rec.labels[i].graspable);
    CHECK(back.scene.graspable[i] == rec.scene.graspable[i]);
  }
  CHECK(max_abs(back.scene.camera_pose.translation() - rec.scene.camera_pose.translation()) <
        1e-6);
  CHECK(max_abs(back.scene.camera_pose.rotation() - rec.scene.camera_pose.rotation()) < 1e-9);
  CHECK(max_abs(back.scene.imu_accel - rec.scene.imu_accel) < 1e-9);
  CHECK(back.scene.intrinsics.fx == rec.scene.intrinsics.fx);
  CHECK(back.scene.intrinsics.width == rec.scene.intrinsics.width);
  CHECK(back.frame.instance_map == rec.frame.instance_map);
  REQUIRE(back.frame.depth.size() == rec.frame.depth.size());
  for (std::size_t p = 0; p < back.frame.depth.size(); ++p) {
    CHECK(std::abs(back.frame.depth[p] - rec.frame.depth[p]) <= 0.0005f + 1e-6f);
  }

  const std::string coco = test::slurp(w.layout.scene_dir(4) / "scene_gt_coco.json");
  std::size_t modal = 0, amodal = 0;
  for (std::size_t at = coco.find("\"segmentation\""); at != std::string::npos;
       at = coco.find("\"segmentation\"", at + 1)) {
    ++modal;
  }
  for (std::size_t at = coco.find("\"amodal_segmentation\""); at != std::string::npos;
       at = coco.find("\"amodal_segmentation\"", at + 1)) {
    ++amodal;
  }
  CHECK(modal == 27);
  CHECK(amodal == 27);
}

TEST_CASE("ground truth only read matches the full read") {
  const Written w;
  const SceneGroundTruth gt = read_scene_ground_truth(w.layout, 4);
  const SceneRecord full = read_scene(w.layout, 4);
  REQUIRE(gt.object_poses.size() == full.scene.object_poses.size());
  for (std::size_t i = 0; i < gt.object_poses.size(); ++i) {
    CHECK(gt.object_poses[i].translation() == full.scene.object_poses[i].translation());
  }
  CHECK(list_scenes(w.layout) == std::vector<int>{4});
  CHECK(list_scenes({w.dir.path(), "train"}).empty());
}

TEST_CASE("writing refuses to overwrite") {
  const Written w;
  CHECK(kind_of([&] {
          write_scene(w.rec.scene, w.rec.frame, w.rec.labels, w.layout, 4);
        }) == ErrorKind::kRefusesOverwrite);
  WriteOptions opts;
  opts.overwrite = true;
  opts.debug_masks = true;
  write_scene(w.rec.scene, w.rec.frame, w.rec.labels, w.layout, 4, 0, opts);
  CHECK(fs::exists(w.layout.scene_dir(4) / "mask_visib"));
  CHECK(read_scene(w.layout, 4).scene.object_poses.size() == 27);
}

TEST_CASE("damaged files are parse errors naming the file") {
  const Written w;
  const fs::path dir = w.layout.scene_dir(4);
  std::string msg;

  SUBCASE("missing mask annotations") {
    fs::remove(dir / "scene_gt_coco.json");
    CHECK(kind_of([&] { (void)read_scene(w.layout, 4); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("scene_gt_coco.json") != std::string::npos);
  }
  SUBCASE("truncated ground truth") {
    const std::string text = test::slurp(dir / "scene_gt.json");
    test::spit(dir / "scene_gt.json", text.substr(0, text.size() / 2));
    CHECK(kind_of([&] { (void)read_scene(w.layout, 4); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("scene_gt.json") != std::string::npos);
    CHECK(msg.find("byte offset") != std::string::npos);
  }
  SUBCASE("missing depth") {
    fs::remove(dir / "depth" / "000000.png");
    CHECK(kind_of([&] { (void)read_scene(w.layout, 4); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("000000.png") != std::string::npos);
  }
  SUBCASE("wrong field type") {
    test::spit(dir / "scene_graspable.json", "{\"0\": [{\"obj_id\": 1, \"graspable\": 3}]}");
    CHECK(kind_of([&] { (void)read_labels(w.layout, 4); }, &msg) == ErrorKind::kParse);
    CHECK(msg.find("scene_graspable.json") != std::string::npos);
  }
}

TEST_CASE("depth PNG stores millimeters") {
  const test::TempDir dir;
  const auto path = dir / "d.png";
  const std::vector<float> depth{2.0f, 0.0f, 2.0004f, 2.0006f, 65.535f, 0.001f};
  write_depth_png(path, 3, 2, depth);
  const std::string bytes = test::slurp(path);
  REQUIRE(bytes.size() > 26);
  CHECK(bytes.substr(1, 3) == "PNG");
  CHECK(static_cast<int>(bytes[24]) == 16);  // bit depth
  CHECK(static_cast<int>(bytes[25]) == 0);   // grayscale
  int w = 0, h = 0;
  const std::vector<float> back = read_depth_png(path, w, h);
  CHECK(w == 3);
  CHECK(h == 2);
  REQUIRE(back.size() == 6);
  CHECK(back[0] * 1000.0f == 2000.0f);
  CHECK(back[1] == 0.0f);
  CHECK(back[2] * 1000.0f == 2000.0f);
  CHECK(back[3] * 1000.0f == doctest::Approx(2001.0));
  CHECK(back[4] * 1000.0f == doctest::Approx(65535.0));
  CHECK(back[5] * 1000.0f == doctest::Approx(1.0));

  const std::vector<float> far{65.6f};
  CHECK(kind_of([&] { write_depth_png(dir / "far.png", 1, 1, far); }) == ErrorKind::kStorage);
  test::spit(dir / "junk.png", "not a png");
  std::string msg;
  CHECK(kind_of([&] { (void)read_depth_png(dir / "junk.png", w, h); }, &msg) == ErrorKind::kParse);
  CHECK(msg.find("Not a PNG file") != std::string::npos);
}

TEST_CASE("label set round-trip") {
  LabelSet set;
  set.split = "val";
  for (int s = 0; s < 3; ++s) {
    LabelSet::Entry e;
    e.key = {s, 0};
    for (std::size_t i = 0; i < 4; ++i) {
      GraspLabel l;
      l.object_index = i;
      l.graspable = (i + s) % 2 == 0;
      l.missing_directions = l.graspable
                                 ? DirectionSet{Direction::kPosZ, Direction::kNegX, Direction::kPosY}
                                 : DirectionSet{Direction::kPosZ};
      e.labels.push_back(l);
    }
    set.entries.push_back(e);
  }
  const test::TempDir dir;
  write_label_set(dir / "labels.json", set);
  const LabelSet back = read_label_set(dir / "labels.json");
  CHECK(back.split == "val");
  REQUIRE(back.entries.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(back.entries[s].key == set.entries[s].key);
    REQUIRE(back.entries[s].labels.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(back.entries[s].labels[i].graspable == set.entries[s].labels[i].graspable);
      CHECK(back.entries[s].labels[i].missing_directions ==
            set.entries[s].labels[i].missing_directions);
    }
  }
  write_label_set(dir / "again.json", back);
  CHECK(test::slurp(dir / "again.json") == test::slurp(dir / "labels.json"));
}

TEST_CASE("manifest round-trip") {
  RunConfig c;
  c.splits = {4, 1, 2};
  c.model_points = 64;
  const ObjectModel model = make_model(c);
  const test::TempDir dir;
  write_manifest(dir.path(), c, model);
  const DatasetManifest m = read_manifest(dir.path());
  CHECK(m.units == "mm");
  CHECK(m.depth_scale == 1.0);
  CHECK(m.model_points == 64);
  CHECK(max_abs(m.brick_size - c.stack.brick_size) < 1e-12);
  CHECK(m.splits.size() == 3);
  CHECK(fs::exists(dir / "models" / "obj_000001.ply"));
  CHECK(fs::exists(dir / "models" / "models_info.json"));
  CHECK(dataset_config(dir.path()).to_text() == c.to_text());
  CHECK(kind_of([&] { (void)read_manifest(dir / "nowhere"); }) == ErrorKind::kParse);
}

}  // TEST_SUITE
