#include <algorithm>

#include <doctest.h>

#include "oracles.hpp"
#include "stackgrasp/graspability.hpp"
#include "stackgrasp/kdtree.hpp"
#include "stackgrasp/scene.hpp"
#include "support.hpp"

using namespace stackgrasp;

namespace {

const Vec3 kBrick(0.24, 0.115, 0.071);

std::vector<Box3> unit_grid(int n) {
  std::vector<Box3> boxes;
  for (int z = 0; z < n; ++z) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const Vec3 lo(x, y, z);
        boxes.push_back({lo, lo + Vec3::Ones()});
      }
    }
  }
  return boxes;
}

unsigned bits_of(DirectionSet s) {
  unsigned out = 0;
  for (int d = 0; d < 6; ++d) {
    if (s.contains(kAllDirections[d])) out |= 1u << d;
  }
  return out;
}

std::vector<unsigned> oracle_missing(const std::vector<Pose> &poses, const Vec3 &size) {
  std::vector<oracle::Interval3> hulls;
  for (const Pose &p : poses) hulls.push_back(oracle::cuboid_hull(size, p.rotation(), p.translation()));
  return oracle::missing_directions(hulls, kContactTolerance);
}

Pose at(const Vec3 &t) { return Pose(Mat3::Identity(), t, Frame::kObject, Frame::kWorld); }

}  // namespace

TEST_SUITE("graspability") {

TEST_CASE("removal rule over every direction subset") {
  for (unsigned bits = 0; bits < 64; ++bits) {
    DirectionSet s;
    for (int d = 0; d < 6; ++d) {
      if (bits & (1u << d)) s.insert(kAllDirections[d]);
    }
    CHECK(is_graspable(s) == oracle::graspable(bits));
    if (is_graspable(s)) CHECK(s.size() >= 3);
    if (s.size() >= 4) CHECK(is_graspable(s));
  }
  CHECK(is_graspable({Direction::kPosZ, Direction::kNegX, Direction::kPosY}));
  CHECK_FALSE(is_graspable({Direction::kPosZ, Direction::kNegX, Direction::kPosX}));
  CHECK_FALSE(is_graspable({Direction::kNegZ, Direction::kNegX, Direction::kPosY}));
}

TEST_CASE("spatial index queries") {
  const std::vector<Box3> one{{Vec3::Zero(), Vec3::Ones()}};
  const SpatialIndex single = build_index(one);
  CHECK(single.query(Vec3::Constant(0.5)) == std::vector<std::size_t>{0});
  CHECK(single.query(Vec3::Constant(100.0)).empty());

  const std::vector<Box3> grid = unit_grid(3);
  const SpatialIndex index = build_index(grid);
  const Vec3 center = grid[13].center();
  const auto hits = index.query(center, 1.0 + 1e-6);
  CHECK(hits.size() == 7);
  std::vector<std::size_t> scan;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if ((grid[i].center() - center).norm() <= 1.0 + 1e-6) scan.push_back(i);
  }
  CHECK(hits == scan);
  CHECK(index.query_radius() == doctest::Approx(1.5 * std::sqrt(3.0)));
}

TEST_CASE("radius search equals a linear scan") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> pts;
    const int n = 1 + static_cast<int>(rng.index(300));
    for (int i = 0; i < n; ++i) pts.push_back(test::random_vec(rng, 1.0));
    const KdTree tree(pts);
    for (int q = 0; q < 20; ++q) {
      const Vec3 p = test::random_vec(rng, 1.2);
      const double r = rng.uniform(0, 0.8);
      std::vector<std::size_t> scan;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if ((pts[i] - p).norm() <= r) scan.push_back(i);
      }
      CHECK(tree.radius_search(p, r) == scan);
      std::size_t best = 0;
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if ((pts[i] - p).squaredNorm() < (pts[best] - p).squaredNorm()) best = i;
      }
      CHECK(tree.nearest(p).first == best);
    }
  }
}

TEST_CASE("missing directions examples") {
  const std::vector<Box3> one{{Vec3::Zero(), Vec3::Ones()}};
  CHECK(missing_directions(0, one, build_index(one)).size() == 6);

  const std::vector<Box3> grid = unit_grid(3);
  const SpatialIndex index = build_index(grid);
  CHECK(missing_directions(13, grid, index).size() == 0);
  // Top layer corner at (0, 0, 2).
  const DirectionSet corner = missing_directions(18, grid, index);
  CHECK(corner == DirectionSet{Direction::kPosZ, Direction::kNegX, Direction::kNegY});
  // Top layer, middle of the -Y edge.
  CHECK(missing_directions(19, grid, index) == DirectionSet{Direction::kPosZ, Direction::kNegY});
}

TEST_CASE("3x3x3 grid labels") {
  StackSpec spec;
  spec.brick_size = kBrick;
  const std::vector<Pose> poses = generate_stack(spec);
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  const auto labels = label_scene(poses, m);
  const auto expected = oracle_missing(poses, kBrick);
  int graspable = 0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(labels[i].object_index == i);
    CHECK(bits_of(labels[i].missing_directions) == expected[i]);
    CHECK(labels[i].graspable == oracle::graspable(expected[i]));
    if (labels[i].graspable) {
      ++graspable;
      // Only the four top corners qualify in a full grid.
      CHECK(poses[i].translation().z() > 2 * kBrick.z());
      CHECK(std::abs(poses[i].translation().x()) > 0.1);
      CHECK(std::abs(poses[i].translation().y()) > 0.1);
    }
  }
  CHECK(graspable == 4);
  // Bottom center brick.
  CHECK_FALSE(labels[4].graspable);
}

TEST_CASE("two bricks side by side") {
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  const std::vector<Pose> poses{at(Vec3(0, 0, kBrick.z() / 2)), at(Vec3(kBrick.x(), 0, kBrick.z() / 2))};
  const auto labels = label_scene(poses, m);
  for (const GraspLabel &l : labels) {
    CHECK(l.graspable);
    CHECK(l.missing_directions.size() == 5);
  }
  CHECK_FALSE(labels[0].missing_directions.contains(Direction::kPosX));
  CHECK_FALSE(labels[1].missing_directions.contains(Direction::kNegX));
  CHECK(label_scene(std::vector<Pose>{poses[0]}, m)[0].graspable);
}

TEST_CASE("labeler agrees with the brute-force oracle on random stacks") {
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  Rng rng(22);
  std::size_t bricks = 0;
  for (int trial = 0; trial < 150; ++trial) {
    StackSpec spec;
    spec.brick_size = kBrick;
    spec.grid = {1 + static_cast<int>(rng.index(4)), 1 + static_cast<int>(rng.index(4)),
                 1 + static_cast<int>(rng.index(4))};
    spec.removal_probability = rng.uniform(0, 0.6);
    spec.seed = rng.next();
    const auto poses = generate_stack(spec);
    const auto labels = label_scene(poses, m);
    const auto expected = oracle_missing(poses, kBrick);
    for (std::size_t i = 0; i < poses.size(); ++i) {
      CHECK(bits_of(labels[i].missing_directions) == expected[i]);
      CHECK(labels[i].graspable == oracle::graspable(expected[i]));
    }
    bricks += poses.size();
  }
  CHECK(bricks > 1000);
}

TEST_CASE("removing a brick never makes another one ungraspable") {
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    StackSpec spec;
    spec.brick_size = kBrick;
    spec.grid = {3, 3, 3};
    spec.removal_probability = rng.uniform(0, 0.5);
    spec.seed = rng.next();
    std::vector<Pose> poses = generate_stack(spec);
    auto before = label_scene(poses, m);
    while (poses.size() > 1) {
      const std::size_t gone = rng.index(poses.size());
      poses.erase(poses.begin() + static_cast<std::ptrdiff_t>(gone));
      before.erase(before.begin() + static_cast<std::ptrdiff_t>(gone));
      const auto after = label_scene(poses, m);
      for (std::size_t i = 0; i < poses.size(); ++i) {
        if (before[i].graspable) CHECK(after[i].graspable);
      }
      before = after;
    }
  }
}

TEST_CASE("small jitter leaves labels unchanged") {
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    StackSpec spec;
    spec.brick_size = kBrick;
    spec.grid = {3, 3, 3};
    spec.gap = 0.02;
    spec.removal_probability = rng.uniform(0, 0.5);
    spec.seed = rng.next();
    const auto reference = label_scene(generate_stack(spec), m);
    spec.jitter_translation = 0.002;
    const auto jittered_poses = generate_stack(spec);
    REQUIRE(jittered_poses.size() == reference.size());
    const auto jittered = label_scene(jittered_poses, m);
    for (std::size_t i = 0; i < reference.size(); ++i) {
      CHECK(jittered[i].graspable == reference[i].graspable);
      CHECK(jittered[i].missing_directions == reference[i].missing_directions);
    }
  }
}

TEST_CASE("labels are invariant to a global yaw and shift in the stack frame") {
  const ObjectModel m = ObjectModel::cuboid(kBrick, 64);
  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    StackSpec spec;
    spec.brick_size = kBrick;
    spec.grid = {3, 3, 3};
    spec.removal_probability = rng.uniform(0, 0.5);
    spec.seed = rng.next();
    const auto poses = generate_stack(spec);
    const auto reference = label_scene(poses, m);
    const double yaw = rng.uniform(-M_PI, M_PI);
    const Pose g(rot_z(yaw), test::random_vec(rng, 5.0), Frame::kWorld, Frame::kWorld);
    std::vector<Pose> moved;
    for (const Pose &p : poses) moved.push_back(g * p);
    const auto labels = label_scene(moved, m, rot_z(yaw).transpose());
    for (std::size_t i = 0; i < poses.size(); ++i) {
      CHECK(labels[i].graspable == reference[i].graspable);
      CHECK(labels[i].missing_directions == reference[i].missing_directions);
    }
  }
}

}  // TEST_SUITE
