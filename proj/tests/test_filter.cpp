#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <doctest.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/filter.hpp"
#include "stackgrasp/metrics.hpp"
#include "stackgrasp/pipeline.hpp"
#include "support.hpp"

using namespace stackgrasp;

namespace {

ScoredCandidate cand(std::size_t i, double height, double visibility, double confidence = 0.5) {
  ScoredCandidate c;
  c.hypothesis = i;
  c.height = height;
  c.visibility = visibility;
  c.confidence = confidence;
  return c;
}

std::vector<std::size_t> ids(const std::vector<ScoredCandidate> &list) {
  std::vector<std::size_t> out;
  for (const ScoredCandidate &c : list) out.push_back(c.hypothesis);
  return out;
}

Mask square(int x0, int y0, int side) {
  Mask m(100, 100, {0, 0, 100, 100});
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) m.set(x, y);
  }
  return m;
}

struct ScoredScene {
  SceneRecord record;
  std::vector<PoseHypothesis> hyps;
  ScoringResult scored;
};

ScoredScene scored_scene(const RunConfig &config, const ObjectModel &model, int id,
                         const NoiseSpec &noise) {
  ScoredScene s{generate_scene(config, model, "test", id), {}, {}};
  s.hyps = oracle_estimate(s.record.scene, s.record.frame, model, noise, static_cast<std::uint64_t>(id));
  s.scored = score_candidates(s.hyps, model, s.record.scene.intrinsics, s.record.scene.imu_accel,
                              s.record.scene.imu_extrinsic);
  return s;
}

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("visibility ratio examples") {
  const Mask amodal = square(10, 10, 20);
  CHECK(visibility_ratio(amodal, amodal) == 1.0);
  CHECK(visibility_ratio(Mask(100, 100), amodal) == 0.0);
  // 1000 px amodal, 800 px modal subset.
  Mask a(100, 100, {0, 0, 100, 100}), m(100, 100, {0, 0, 100, 100});
  for (int i = 0; i < 1000; ++i) {
    a.set(i % 100, i / 100);
    if (i < 800) m.set(i % 100, i / 100);
  }
  CHECK(visibility_ratio(m, a) == 0.8);
  // Modal pixels outside the silhouette do not count.
  CHECK(visibility_ratio(square(0, 0, 60), amodal) == 1.0);
  CHECK(visibility_ratio(square(20, 10, 20), amodal) == 0.5);
  try {
    (void)visibility_ratio(amodal, Mask(100, 100));
    FAIL("expected DegenerateProjection");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDegenerateProjection);
  }
}

TEST_CASE("visibility of a pose behind the camera is degenerate") {
  const ObjectModel m = ObjectModel::cuboid(Vec3(0.24, 0.115, 0.071), 64);
  PoseHypothesis h;
  h.pose = Pose(Mat3::Identity(), Vec3(0, 0, -2), Frame::kObject, Frame::kCamera);
  h.modal_mask = Mask(640, 480);
  CHECK_THROWS_AS(visibility_ratio(h, m, CameraIntrinsics{}), Error);
  const std::vector<PoseHypothesis> hyps{h};
  const ScoringResult r = score_candidates(hyps, m, CameraIntrinsics{}, Vec3(0, 0, -9.81),
                                           default_imu_extrinsic());
  CHECK(r.candidates.empty());
  CHECK(r.degenerate == std::vector<std::size_t>{0});
}

TEST_CASE("vision filter threshold") {
  const std::vector<ScoredCandidate> c{cand(0, 0, 0.9), cand(1, 0, 0.79), cand(2, 0, 0.81)};
  CHECK(ids(vision_filter(c, 0.80)) == std::vector<std::size_t>{0, 2});
  CHECK(vision_filter(c, 0.0).size() == 3);
  const std::vector<ScoredCandidate> full{cand(0, 0, 1.0), cand(1, 0, 0.5)};
  CHECK(vision_filter(full, std::nextafter(1.0, 2.0)).empty());
  const std::vector<ScoredCandidate> edge{cand(0, 0, 0.80), cand(1, 0, 0.799)};
  CHECK(ids(vision_filter(edge, 0.80)) == std::vector<std::size_t>{0});
}

TEST_CASE("gravity height examples") {
  const Pose id_ext(Frame::kCamera, Frame::kSensor);
  const auto at = [](const Vec3 &t) { return Pose(Mat3::Identity(), t, Frame::kObject, Frame::kCamera); };
  CHECK(gravity_height(at(Vec3(0, 0, 2)), Vec3(0, 0, -9.81), id_ext) == doctest::Approx(2.0));
  CHECK(gravity_height(at(Vec3(5, 7, 2)), Vec3(0, 0, -9.81), id_ext) == doctest::Approx(2.0));
  // Sensor rolled 180 degrees about X sees gravity along +Z.
  const Vec3 rolled = rot_x(M_PI).transpose() * Vec3(0, 0, -9.81);
  CHECK(std::abs(rolled.z() - 9.81) < 1e-12);
  CHECK(gravity_height(at(Vec3(0, 0, 2)), rolled, id_ext) == doctest::Approx(-2.0));
  // The extrinsic offset moves the origin before projection.
  const Pose shifted(Mat3::Identity(), Vec3(0, 0, 0.5), Frame::kCamera, Frame::kSensor);
  CHECK(gravity_height(at(Vec3(0, 0, 2)), Vec3(0, 0, -9.81), shifted) == doctest::Approx(2.5));
  try {
    (void)gravity_height(at(Vec3(0, 0, 2)), Vec3(0, 0, -0.5), id_ext);
    FAIL("expected FreeFall");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kFreeFall);
  }
}

TEST_CASE("height filter examples") {
  const std::vector<ScoredCandidate> c{cand(0, 0.1, 1), cand(1, 0.9, 1), cand(2, 0.5, 1)};
  CHECK(ids(height_filter(c, 1)) == std::vector<std::size_t>{1});
  CHECK(ids(height_filter(c, 5)) == std::vector<std::size_t>{1, 2, 0});
  const std::vector<ScoredCandidate> tied{cand(0, 0.5, 0.7), cand(1, 0.5, 0.9), cand(2, 0.5, 0.8)};
  CHECK(ids(height_filter(tied, 1)) == std::vector<std::size_t>{1});
  const std::vector<ScoredCandidate> conf{cand(0, 0.5, 0.9, 0.1), cand(1, 0.5, 0.9, 0.3)};
  CHECK(ids(height_filter(conf, 2)) == std::vector<std::size_t>{1, 0});
  const std::vector<ScoredCandidate> same{cand(0, 0.5, 0.9), cand(1, 0.5, 0.9)};
  CHECK(ids(height_filter(same, 2)) == std::vector<std::size_t>{0, 1});
  // Sub-nanometer differences are ties.
  const std::vector<ScoredCandidate> noise{cand(0, 0.5, 0.8), cand(1, 0.5 + 1e-13, 0.7)};
  CHECK(ids(height_filter(noise, 1)) == std::vector<std::size_t>{0});
  const auto ranked = height_filter(c, 3);
  for (std::size_t i = 0; i < ranked.size(); ++i) CHECK(ranked[i].rank == static_cast<int>(i));
  CHECK_THROWS_AS(height_filter(c, 0), Error);
}

TEST_CASE("composed filter examples") {
  FilterConfig config;
  CHECK(filter_scored(std::vector<ScoredCandidate>{}, config).selected.empty());
  const std::vector<ScoredCandidate> dim{cand(0, 0.9, 0.5), cand(1, 0.4, 0.6)};
  config.top_k = 2;
  CHECK(filter_scored(dim, config).selected.empty());
  // No backfill: the highest fails the vision test and nothing replaces it.
  const std::vector<ScoredCandidate> mixed{cand(0, 0.9, 0.5), cand(1, 0.4, 0.95)};
  config.top_k = 1;
  CHECK(filter_scored(mixed, config).selected.empty());
  config.order = FilterOrder::kVisionThenHeight;
  CHECK(ids(filter_scored(mixed, config).selected) == std::vector<std::size_t>{1});
  config.epsilon_vis = 1.5;
  CHECK_THROWS_AS(filter_scored(mixed, config), Error);
}

TEST_CASE("baseline selectors") {
  std::vector<ScoredCandidate> c;
  const double scores[] = {.2, .9, .4, .9, .1};
  for (std::size_t i = 0; i < 5; ++i) c.push_back(cand(i, 0, 1, scores[i]));
  CHECK(ids(baseline_select(c, BaselineStrategy::kMaxConfidence, 1)) == std::vector<std::size_t>{1});
  CHECK(ids(baseline_select(c, BaselineStrategy::kMaxConfidence, 3)) ==
        std::vector<std::size_t>{1, 3, 2});
  CHECK(baseline_select(c, BaselineStrategy::kMaxConfidence, 9).size() == 5);
  CHECK(ids(baseline_select(c, BaselineStrategy::kRandom, 2, 17)) ==
        ids(baseline_select(c, BaselineStrategy::kRandom, 2, 17)));
  CHECK(baseline_select(c, BaselineStrategy::kRandom, 7, 1).size() == 5);

  // Every index is reachable and roughly equally likely.
  std::array<int, 5> hits{};
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    ++hits[baseline_select(c, BaselineStrategy::kRandom, 1, seed)[0].hypothesis];
  }
  for (int h : hits) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("selector names") {
  for (Selector s : {Selector::kAll, Selector::kRandom, Selector::kConfidence, Selector::kInertial,
                     Selector::kVision, Selector::kCombined}) {
    CHECK(parse_selector(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_selector("best"), Error);
}

TEST_CASE("vision-only selection is the whole vision-filtered set") {
  std::vector<ScoredCandidate> c(6);
  const double vis[] = {0.9, 0.5, 0.8, 1.0, 0.799, 0.85};
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i].hypothesis = i;
    c[i].visibility = vis[i];
  }
  FilterConfig f;
  f.top_k = 1;
  const auto out = run_selector(Selector::kVision, c, f, 0);
  std::vector<std::size_t> ids;
  for (const ScoredCandidate &s : out) ids.push_back(s.hypothesis);
  CHECK(ids == std::vector<std::size_t>{0, 2, 3, 5});
  CHECK(run_selector(Selector::kAll, c, f, 0).size() == 6);
}

TEST_CASE("height selection ignores the IMU magnitude") {
  RunConfig config;
  config.seed = 31;
  const ObjectModel model = make_model(config);
  Rng rng(32);
  for (int id = 0; id < 100; ++id) {
    const ScoredScene s = scored_scene(config, model, id, config.noise);
    const SceneGroundTruth &g = s.record.scene;
    // Any scale that keeps gravity above the free-fall floor.
    const double scale = std::exp(rng.uniform(-2, 3));
    const ScoringResult scaled =
        score_candidates(s.hyps, model, g.intrinsics, g.imu_accel * scale, g.imu_extrinsic);
    for (int k : {1, 2, 3, 100}) {
      CHECK(ids(height_filter(s.scored.candidates, k)) == ids(height_filter(scaled.candidates, k)));
    }
  }
}

TEST_CASE("containment, monotonicity in k and rigid invariance") {
  RunConfig config;
  config.seed = 33;
  const ObjectModel model = make_model(config);
  Rng rng(34);
  for (int id = 0; id < 60; ++id) {
    const ScoredScene s = scored_scene(config, model, id, config.noise);
    const auto &all = s.scored.candidates;
    std::set<std::size_t> pi;
    for (const ScoredCandidate &c : all) pi.insert(c.hypothesis);

    FilterConfig fc;
    fc.epsilon_vis = rng.uniform(0.5, 0.95);
    std::vector<std::size_t> previous;
    for (int k = 1; k <= 12; ++k) {
      fc.top_k = k;
      const FilterResult r = filter_scored(all, fc);
      const auto gh = ids(r.after_first);
      const std::set<std::size_t> gh_set(gh.begin(), gh.end());
      for (const ScoredCandidate &c : r.selected) {
        CHECK(gh_set.count(c.hypothesis) == 1);
        CHECK(c.visibility >= fc.epsilon_vis);
      }
      for (std::size_t h : gh) CHECK(pi.count(h) == 1);
      CHECK(r.selected.size() <= static_cast<std::size_t>(k));
      // The k selection is a prefix of the k + 1 selection.
      const auto now = ids(height_filter(all, k));
      CHECK(std::equal(previous.begin(), previous.end(), now.begin()));
      previous = now;
    }

    // Move the camera rigidly; the sensor moves with it.
    const Pose d = test::random_pose(rng, Frame::kCamera, Frame::kCamera, 2.0);
    const Pose ext(Frame::kCamera, Frame::kSensor);
    const Vec3 accel = s.record.scene.imu_accel;
    std::vector<ScoredCandidate> moved = all;
    std::vector<ScoredCandidate> before = all;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const Pose &p = s.hyps[all[i].hypothesis].pose;
      before[i].height = gravity_height(p, accel, ext);
      moved[i].height = gravity_height(d * p, d.rotation() * accel, ext);
    }
    for (int k : {1, 2, 3}) {
      fc.top_k = k;
      CHECK(ids(filter_scored(before, fc).selected) == ids(filter_scored(moved, fc).selected));
    }
  }
}

TEST_CASE("zero-noise selection lands on the top layer with exact poses") {
  RunConfig config;
  config.seed = 35;
  config.irregular_fraction = 0.0;
  const ObjectModel model = make_model(config);
  for (int id = 0; id < 30; ++id) {
    const ScoredScene s = scored_scene(config, model, id, NoiseSpec::zero());
    FilterConfig fc;
    const FilterResult r = filter_graspable(s.hyps, fc, model, s.record.scene.intrinsics,
                                            s.record.scene.imu_accel, s.record.scene.imu_extrinsic);
    for (const ScoredCandidate &c : r.selected) {
      const PoseHypothesis &h = s.hyps[c.hypothesis];
      REQUIRE(h.source_object >= 0);
      const std::size_t obj = static_cast<std::size_t>(h.source_object);
      CHECK(add_s(h.pose, s.record.scene.object_to_camera(obj), model) < 1e-9);
      // Full grid: the top layer sits at z = 2.5 brick heights.
      CHECK(s.record.scene.object_poses[obj].translation().z() ==
            doctest::Approx(2.5 * config.stack.brick_size.z()));
    }
  }
}

// Known limitation of the declared tie-break chain: all bricks of a full top
// layer share one height, so visibility decides. Seen almost along a stack
// axis, the middle brick of the near edge shows no side faces and is fully
// visible, while the graspable corner bricks lose a few percent to their
// partly hidden outer faces. The middle brick has only two free directions.
TEST_CASE("axis-aligned view prefers the fully visible edge brick") {
  StackSpec spec = RunConfig::default_stack();
  spec.removal_probability = 0.0;
  const ObjectModel model = ObjectModel::cuboid(spec.brick_size, 512);
  SceneGroundTruth scene;
  scene.object_poses = generate_stack(spec);
  const Box3 bounds = scene_bounds(scene.object_poses, model);
  // Camera on the -Y side, 40 degrees up, looking at the stack center.
  const double elev = 40 * M_PI / 180, dist = 1.5;
  const Vec3 pos = bounds.center() + dist * Vec3(0, -std::cos(elev), std::sin(elev));
  const Vec3 fwd = (bounds.center() - pos).normalized();
  const Vec3 right = fwd.cross(Vec3::UnitZ()).normalized();
  Mat3 rot;
  rot << right, fwd.cross(right), fwd;
  scene.camera_pose = Pose(rot, pos, Frame::kCamera, Frame::kWorld);
  scene.imu_extrinsic = default_imu_extrinsic();
  scene.imu_accel = synth_imu(scene.camera_pose, scene.imu_extrinsic, 0.0, 0);
  const auto labels = label_scene(scene.object_poses, model);
  const RenderedFrame frame = render(scene, model);
  const auto hyps = oracle_estimate(scene, frame, model, NoiseSpec::zero(), 0);
  const FilterResult r = filter_graspable(hyps, FilterConfig{}, model, scene.intrinsics,
                                          scene.imu_accel, scene.imu_extrinsic);
  REQUIRE(r.selected.size() == 1);
  const std::size_t obj = static_cast<std::size_t>(hyps[r.selected[0].hypothesis].source_object);
  const Vec3 t = scene.object_poses[obj].translation();
  CHECK(std::abs(t.x()) < 1e-9);
  CHECK(t.y() < 0);
  CHECK(r.selected[0].visibility == 1.0);
  CHECK_FALSE(labels[obj].graspable);
}

}  // TEST_SUITE
