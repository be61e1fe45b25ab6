#include <cmath>

#include <doctest.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/estimation.hpp"
#include "stackgrasp/metrics.hpp"
#include "stackgrasp/pipeline.hpp"
#include "support.hpp"

using namespace stackgrasp;
using test::max_abs;

namespace {

struct Fixture {
  RunConfig config;
  ObjectModel model;
  std::vector<SceneRecord> scenes;

  explicit Fixture(int n, std::uint64_t seed = 5) : model(make_model(config)) {
    config.seed = seed;
    for (int id = 0; id < n; ++id) scenes.push_back(generate_scene(config, model, "test", id));
  }
};

std::string error_message(const std::function<void()> &fn, ErrorKind expected) {
  try {
    fn();
  } catch (const Error &e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("no error raised");
  return {};
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("zero noise reproduces ground truth") {
  const Fixture fx(10);
  for (const SceneRecord &rec : fx.scenes) {
    const auto hyps = oracle_estimate(rec.scene, rec.frame, fx.model, NoiseSpec::zero(), 1);
    std::size_t visible = 0;
    for (const Mask &m : rec.frame.modal_masks) visible += m.empty() ? 0 : 1;
    REQUIRE(hyps.size() == visible);
    for (const PoseHypothesis &h : hyps) {
      REQUIRE(h.source_object >= 0);
      const Pose gt = rec.scene.object_to_camera(static_cast<std::size_t>(h.source_object));
      CHECK(h.pose.rotation() == gt.rotation());
      CHECK(h.pose.translation() == gt.translation());
      CHECK(h.modal_mask == rec.frame.modal_masks[static_cast<std::size_t>(h.source_object)]);
      CHECK(add_s(h.pose, gt, fx.model) < 1e-9);
      CHECK(h.confidence >= 0.0);
      CHECK(h.confidence <= 1.0);
    }
  }
}

TEST_CASE("full dropout yields nothing") {
  const Fixture fx(5);
  NoiseSpec noise = NoiseSpec::zero();
  noise.dropout_rate = 1.0;
  for (const SceneRecord &rec : fx.scenes) {
    CHECK(oracle_estimate(rec.scene, rec.frame, fx.model, noise, 2).empty());
  }
}

TEST_CASE("translation noise has the requested spread") {
  const Fixture fx(60);
  NoiseSpec noise = NoiseSpec::zero();
  noise.trans_std = 0.005;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t s = 0; s < fx.scenes.size(); ++s) {
    const SceneRecord &rec = fx.scenes[s];
    for (const PoseHypothesis &h : oracle_estimate(rec.scene, rec.frame, fx.model, noise, s)) {
      const Vec3 err =
          h.pose.translation() -
          rec.scene.object_to_camera(static_cast<std::size_t>(h.source_object)).translation();
      sum_sq += err.squaredNorm();
      n += 3;
    }
  }
  REQUIRE(n >= 3000);
  const double std_dev = std::sqrt(sum_sq / static_cast<double>(n));
  INFO("empirical std " << std_dev << " over " << n / 3 << " objects");
  CHECK(std::abs(std_dev - 0.005) < 0.0005);
}

TEST_CASE("estimates are seeded") {
  const Fixture fx(3);
  const NoiseSpec noise = RunConfig::default_noise();
  for (const SceneRecord &rec : fx.scenes) {
    const auto a = oracle_estimate(rec.scene, rec.frame, fx.model, noise, 77);
    const auto b = oracle_estimate(rec.scene, rec.frame, fx.model, noise, 77);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].pose.rotation() == b[i].pose.rotation());
      CHECK(a[i].pose.translation() == b[i].pose.translation());
      CHECK(a[i].confidence == b[i].confidence);
      CHECK(a[i].modal_mask == b[i].modal_mask);
    }
  }
}

TEST_CASE("clutter hypotheses are flagged as unrelated") {
  const Fixture fx(20);
  NoiseSpec noise = NoiseSpec::zero();
  noise.clutter_rate = 1.0;
  std::size_t clutter = 0;
  for (std::size_t s = 0; s < fx.scenes.size(); ++s) {
    const SceneRecord &rec = fx.scenes[s];
    for (const PoseHypothesis &h : oracle_estimate(rec.scene, rec.frame, fx.model, noise, s)) {
      if (h.source_object >= 0) continue;
      ++clutter;
      CHECK_FALSE(h.modal_mask.empty());
      CHECK(h.modal_mask.is_subset_of(rec.frame.occupied()));
    }
  }
  CHECK(clutter > 0);
}

TEST_CASE("noise spec validation") {
  NoiseSpec n;
  n.dropout_rate = 1.5;
  CHECK_THROWS_AS(n.validate(), Error);
  n = {};
  n.rot_std = -1;
  CHECK_THROWS_AS(n.validate(), Error);
}

TEST_CASE("prediction CSV parsing") {
  const test::TempDir dir;
  const auto path = dir / "preds.csv";
  test::spit(path,
             "scene_id,im_id,obj_id,score,R,t,time\n"
             "3,0,1,0.75,1 0 0 0 1 0 0 0 1,10 -20 1000,0.5\n");
  const auto hyps = load_predictions(path, 3, 0);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].confidence == 0.75);
  CHECK(max_abs(hyps[0].pose.translation() - Vec3(0.01, -0.02, 1.0)) < 1e-15);
  CHECK(hyps[0].mask_missing);
  CHECK(load_predictions(path, 4, 0).empty());

  test::spit(path, "");
  CHECK(load_predictions(path, 3, 0).empty());

  test::spit(path,
             "scene_id,im_id,obj_id,score,R,t,time\n"
             "3,0,1,0.75,1 0 0 0 1 0 0 0 1,10 -20 1000,0.5\n"
             "3,0,1,0.75,1 0 0 0 1 0 0 0,10 -20 1000,0.5\n");
  const std::string msg =
      error_message([&] { (void)load_predictions(path, 3, 0); }, ErrorKind::kParse);
  CHECK(msg.find("preds.csv:3") != std::string::npos);
  CHECK(msg.find("rotation") != std::string::npos);

  test::spit(path, "3,0,1,0.75,2 0 0 0 1 0 0 0 1,10 -20 1000,0.5\n");
  CHECK_THROWS_AS(read_prediction_csv(path), Error);
  test::spit(path, "3,0,1,high,1 0 0 0 1 0 0 0 1,10 -20 1000,0.5\n");
  CHECK_THROWS_AS(read_prediction_csv(path), Error);
  CHECK_THROWS_AS(read_prediction_csv(dir / "missing.csv"), Error);
}

TEST_CASE("slightly non-orthonormal rotations are projected") {
  const test::TempDir dir;
  const auto path = dir / "preds.csv";
  test::spit(path, "1,0,1,0.5,1.00001 0 0 0 1 0 0 0 1,0 0 1000,-1\n");
  const auto rec = read_prediction_csv(path);
  REQUIRE(rec.size() == 1);
  CHECK(orthonormality_error(rec[0].rotation) < 1e-12);
}

TEST_CASE("predictions round-trip through CSV and mask file") {
  const Fixture fx(4);
  const test::TempDir dir;
  const auto path = dir / "out.csv";
  std::vector<ImageHypotheses> images;
  for (std::size_t s = 0; s < fx.scenes.size(); ++s) {
    images.push_back({static_cast<int>(s), 0,
                      oracle_estimate(fx.scenes[s].scene, fx.scenes[s].frame, fx.model,
                                      RunConfig::default_noise(), s)});
  }
  write_predictions(path, images);
  for (const ImageHypotheses &img : images) {
    const auto back = load_predictions(path, img.scene_id, img.image_id);
    REQUIRE(back.size() == img.hypotheses.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      const PoseHypothesis &a = img.hypotheses[i];
      const PoseHypothesis &b = back[i];
      CHECK(max_abs(a.pose.rotation() - b.pose.rotation()) < 1e-9);
      CHECK(max_abs(a.pose.translation() - b.pose.translation()) < 1e-9);
      CHECK(std::abs(a.confidence - b.confidence) < 1e-9);
      CHECK(b.object_class == a.object_class);
      CHECK_FALSE(b.mask_missing);
      CHECK(b.modal_mask == a.modal_mask);
    }
  }
  // Second write of what was read back is byte-identical.
  const std::string first = test::slurp(path);
  std::vector<ImageHypotheses> again;
  for (const ImageHypotheses &img : images) {
    again.push_back({img.scene_id, img.image_id, load_predictions(path, img.scene_id, img.image_id)});
  }
  const auto path2 = dir / "again.csv";
  write_predictions(path2, again);
  CHECK(test::slurp(path2) == first);
  CHECK(test::slurp(mask_file_for(path2)) == test::slurp(mask_file_for(path)));
}

TEST_CASE("missing masks fall back to the amodal render") {
  const Fixture fx(1);
  const test::TempDir dir;
  const auto path = dir / "nomask.csv";
  const Pose gt = fx.scenes[0].scene.object_to_camera(0);
  PredictionRecord r;
  r.rotation = gt.rotation();
  r.translation_mm = gt.translation() * 1000.0;
  write_prediction_csv(path, std::vector<PredictionRecord>{r});
  const auto hyps =
      load_predictions(path, 0, 0, MaskFallback{&fx.model, fx.scenes[0].scene.intrinsics});
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].mask_missing);
  CHECK(hyps[0].modal_mask == fx.scenes[0].frame.amodal_masks[0]);
}

}  // TEST_SUITE
