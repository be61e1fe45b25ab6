#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "stackgrasp/estimation.hpp"
#include "stackgrasp/filter.hpp"
#include "stackgrasp/metrics.hpp"
#include "stackgrasp/scene.hpp"

namespace stackgrasp {

// Flat key tree: "section.key" -> raw value text.
//
//   # comment
//   seed = 7
//   [stack]
//   grid = [3, 3, 3]
//   removal_probability = 0.3
//
// Values are numbers, true/false, double-quoted strings or bracketed lists
// of numbers. Keys may also be written fully qualified ("stack.gap = 0").
// Every file in this grammar is also valid TOML.
using KeyTree = std::map<std::string, std::string>;

KeyTree parse_key_tree(const std::string &text, const std::string &source = "<config>");

struct SplitSizes {
  int train = 10000;
  int val = 1000;
  int test = 1000;
};

struct CameraConfig {
  double radius_min = 1.0;
  double radius_max = 2.5;
  double elevation_min_deg = 10.0;
  double elevation_max_deg = 70.0;
  double roll_max_deg = 15.0;
  CameraIntrinsics intrinsics;
};

struct ImuConfig {
  double noise_std = 0.0;
  Vec3 extrinsic_translation{0.01, 0.0, 0.0};
};

// Everything needed to reproduce a run from one seed.
struct RunConfig {
  std::uint64_t seed = 0;
  SplitSizes splits;
  StackSpec stack = default_stack();  // stack.seed is replaced per scene
  // Share of scenes built with column removal; the rest are full grids.
  double irregular_fraction = 0.5;
  CameraConfig camera;
  ImuConfig imu;
  int model_points = 512;
  NoiseSpec noise = default_noise();
  FilterConfig filter;
  EvalConfig eval;

  // 3x3x3 grid, removal probability 0.3 for irregular scenes.
  static StackSpec default_stack();
  // rot 2 deg, trans 5 mm, erosion 2 px, dropout 0.05, clutter 0.5/image.
  static NoiseSpec default_noise();

  void validate() const;
  std::string to_text() const;
  static RunConfig from_text(const std::string &text,
                             const std::string &source = "<config>");
  static RunConfig from_file(const std::filesystem::path &path);
};

}  // namespace stackgrasp
