#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "stackgrasp/config.hpp"
#include "stackgrasp/estimation.hpp"
#include "stackgrasp/filter.hpp"
#include "stackgrasp/io.hpp"
#include "stackgrasp/metrics.hpp"

namespace stackgrasp {

ObjectModel make_model(const RunConfig &config);

// Master seed of one scene; every random draw of the scene derives from it.
std::uint64_t scene_seed(const RunConfig &config, std::string_view split, int scene_id);

// Stack, camera, IMU reading, labels and render of one scene.
SceneRecord generate_scene(const RunConfig &config, const ObjectModel &model,
                           std::string_view split, int scene_id);

// Scene id -> result, in parallel over `threads` workers (0 = hardware
// concurrency). Output order is by scene id whatever the thread count.
template <typename T>
std::vector<T> parallel_map(int count, unsigned threads, const std::function<T(int)> &fn) {
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(std::max(count, 0)));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(count, 1)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  const auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> guard(failure_lock);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (std::thread &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(slots.size());
  for (std::optional<T> &s : slots) out.push_back(std::move(*s));
  return out;
}

struct GenerateOptions {
  bool overwrite = false;
  bool debug_masks = false;
  unsigned threads = 0;
};

// All three splits plus the manifest. The manifest is written last, so a
// directory without one is an incomplete dataset.
void generate_dataset(const RunConfig &config, const std::filesystem::path &root,
                      const GenerateOptions &options = {});

// Config stored with a dataset.
RunConfig dataset_config(const std::filesystem::path &root);

// Recomputes graspability from the stored poses.
LabelSet label_dataset(const std::filesystem::path &root, const std::string &split,
                       unsigned threads = 0);

struct SelectionRun {
  Selector selector = Selector::kCombined;
  FilterConfig filter;
  // External predictions in BOP CSV form; the oracle estimator is used when
  // unset.
  std::optional<std::filesystem::path> predictions;
  unsigned threads = 0;
};

// Hypotheses for one scene from the oracle (seeded per scene) or from a
// prediction file.
std::vector<PoseHypothesis> scene_hypotheses(const RunConfig &config, const ObjectModel &model,
                                             const SceneRecord &record, std::string_view split,
                                             int scene_id,
                                             const std::optional<std::filesystem::path> &predictions);

// Runs the selector over every scene of a split and returns the kept
// hypotheses in rank order.
std::vector<ImageHypotheses> select_dataset(const RunConfig &config,
                                            const std::filesystem::path &root,
                                            const std::string &split, const SelectionRun &run);

// Ground truth of a split; graspability comes from `labels` when given.
std::vector<ImageGroundTruth> dataset_ground_truth(const std::filesystem::path &root,
                                                   const std::string &split,
                                                   const LabelSet *labels = nullptr);

// Groups the rows of a selection CSV per image.
std::vector<ImageSelection> read_selections(const std::filesystem::path &csv_path);

struct BenchmarkConfig {
  std::vector<Selector> selectors{Selector::kAll, Selector::kRandom, Selector::kConfidence,
                                  Selector::kInertial, Selector::kVision, Selector::kCombined};
  std::vector<int> top_ks{1};
  int scenes = 100;
  std::string split = "test";
  unsigned threads = 0;
};

struct BenchmarkRow {
  Selector selector = Selector::kAll;
  int top_k = 1;
  EvalReport report;
};

struct BenchmarkResult {
  std::uint64_t seed = 0;
  int scenes = 0;
  std::vector<BenchmarkRow> rows;
  // Hypotheses whose pose rendered to nothing, summed over scenes.
  std::size_t degenerate = 0;
};

// In-memory sweep: scenes are generated, estimated, filtered and scored
// without touching the disk.
BenchmarkResult run_benchmark(const RunConfig &config, const BenchmarkConfig &bench);

std::string benchmark_table(const BenchmarkResult &result);
std::string benchmark_json(const BenchmarkResult &result);

}  // namespace stackgrasp
