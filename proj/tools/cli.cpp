#include "cli.hpp"

#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stackgrasp/error.hpp"
#include "stackgrasp/pipeline.hpp"

namespace stackgrasp::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App *cmd, Common &c, const std::string &out_help) {
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--config", c.config, "Run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, out_help)->required();
  cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
}

RunConfig load_config(const Common &c, const std::string &dataset = {}) {
  RunConfig config;
  if (!c.config.empty()) {
    config = RunConfig::from_file(c.config);
  } else if (!dataset.empty()) {
    config = dataset_config(dataset);
  }
  if (c.seed) config.seed = *c.seed;
  return config;
}

std::vector<std::string> split_list(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

FilterOrder parse_order(const std::string &name) {
  if (name == "height_then_vision") return FilterOrder::kHeightThenVision;
  if (name == "vision_then_height") return FilterOrder::kVisionThenHeight;
  throw Error(ErrorKind::kUsage, fmt::format("--order: unknown order '{}'", name));
}

// Removes an output that did not exist before the command if the command
// fails part way.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path path) : path_(std::move(path)), existed_(fs::exists(path_)) {}
  ~OutputGuard() {
    if (!committed_ && !existed_) {
      std::error_code ec;
      fs::remove_all(path_, ec);
    }
  }
  void commit() { committed_ = true; }

 private:
  fs::path path_;
  bool existed_;
  bool committed_ = false;
};

void write_file(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) {
    throw Error(ErrorKind::kStorage, fmt::format("{}: cannot write", path.string()));
  }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Procedural brick-stack dataset generation and grasp candidate selection"};
  app.name(args.empty() ? "stackgrasp" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  Common common;

  // generate
  CLI::App *gen = app.add_subcommand("generate", "Generate a dataset from a run configuration");
  add_common(gen, common, "Dataset root directory");
  bool force = false, debug_masks = false;
  std::optional<int> n_train, n_val, n_test;
  gen->add_flag("--force", force, "Replace existing scenes");
  gen->add_flag("--debug-masks", debug_masks, "Also write per-object mask PNGs");
  gen->add_option("--train", n_train, "Override the train split size")->check(CLI::NonNegativeNumber);
  gen->add_option("--val", n_val, "Override the val split size")->check(CLI::NonNegativeNumber);
  gen->add_option("--test", n_test, "Override the test split size")->check(CLI::NonNegativeNumber);

  // label
  CLI::App *lab = app.add_subcommand("label", "Compute graspability labels for a dataset split");
  add_common(lab, common, "Label file (JSON)");
  std::string dataset, split = "test";
  lab->add_option("--dataset", dataset, "Dataset root")->required()->check(CLI::ExistingDirectory);
  lab->add_option("--split", split, "Split to label")->check(CLI::IsMember({"train", "val", "test"}));

  // filter
  CLI::App *fil = app.add_subcommand("filter", "Select graspable candidates per image");
  add_common(fil, common, "Selection CSV (BOP format)");
  std::string strategy = "combined", order, predictions;
  std::optional<int> top_k;
  std::optional<double> epsilon;
  fil->add_option("--dataset", dataset, "Dataset root")->required()->check(CLI::ExistingDirectory);
  fil->add_option("--split", split, "Split to filter")->check(CLI::IsMember({"train", "val", "test"}));
  fil->add_option("--strategy", strategy,
                  "all, random, confidence, inertial, vision or combined");
  fil->add_option("--top-k", top_k, "Candidates kept by the height stage")->check(CLI::PositiveNumber);
  fil->add_option("--epsilon", epsilon, "Visibility threshold");
  fil->add_option("--order", order, "height_then_vision or vision_then_height");
  fil->add_option("--predictions", predictions, "Prediction CSV; the oracle is used when absent")
      ->check(CLI::ExistingFile);

  // evaluate
  CLI::App *ev = app.add_subcommand("evaluate", "Score selections against ground truth");
  add_common(ev, common, "Report file (JSON)");
  std::string selections, labels;
  ev->add_option("--dataset", dataset, "Dataset root")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--split", split, "Split to evaluate")->check(CLI::IsMember({"train", "val", "test"}));
  ev->add_option("--selections", selections, "Selection CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--labels", labels, "Label file from `label`; defaults to the stored flags")
      ->check(CLI::ExistingFile);

  // benchmark
  CLI::App *bench = app.add_subcommand("benchmark", "Sweep strategies and top_k on fresh scenes");
  add_common(bench, common, "Report file (JSON)");
  std::string strategies = "all,random,confidence,inertial,vision,combined";
  std::string top_ks = "1";
  std::optional<int> scenes;
  bench->add_option("--strategies", strategies, "Comma-separated strategies");
  bench->add_option("--top-k", top_ks, "Comma-separated top_k values");
  bench->add_option("--scenes", scenes, "Number of scenes (default: test split size)")
      ->check(CLI::NonNegativeNumber);

  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError &e) {
    err << "error[UsageError]: " << e.what() << "\n";
    return kUsageFailure;
  }

  std::optional<OutputGuard> guard;
  try {
    guard.emplace(common.out);
    if (gen->parsed()) {
      RunConfig config = load_config(common);
      if (n_train) config.splits.train = *n_train;
      if (n_val) config.splits.val = *n_val;
      if (n_test) config.splits.test = *n_test;
      generate_dataset(config, common.out, {force, debug_masks, common.threads});
      out << fmt::format("wrote {} train, {} val, {} test scenes to {}\n", config.splits.train,
                         config.splits.val, config.splits.test, common.out);
    } else if (lab->parsed()) {
      const LabelSet set = label_dataset(dataset, split, common.threads);
      std::size_t objects = 0, graspable = 0, changed = 0;
      const DatasetLayout layout{dataset, split};
      for (const LabelSet::Entry &e : set.entries) {
        const std::vector<GraspLabel> stored = read_labels(layout, e.key.scene_id);
        for (std::size_t i = 0; i < e.labels.size(); ++i) {
          ++objects;
          graspable += e.labels[i].graspable ? 1 : 0;
          if (i >= stored.size() || stored[i].graspable != e.labels[i].graspable) ++changed;
        }
      }
      write_label_set(common.out, set);
      out << fmt::format("{} images, {} objects, {} graspable, {} differ from stored labels\n",
                         set.entries.size(), objects, graspable, changed);
    } else if (fil->parsed()) {
      const RunConfig config = load_config(common, dataset);
      SelectionRun run;
      run.selector = parse_selector(strategy);
      run.filter = config.filter;
      if (top_k) run.filter.top_k = *top_k;
      if (epsilon) run.filter.epsilon_vis = *epsilon;
      if (!order.empty()) run.filter.order = parse_order(order);
      if (!predictions.empty()) run.predictions = fs::path(predictions);
      run.threads = common.threads;
      const std::vector<ImageHypotheses> chosen = select_dataset(config, dataset, split, run);
      std::size_t total = 0;
      for (const ImageHypotheses &img : chosen) total += img.hypotheses.size();
      write_predictions(common.out, chosen);
      out << fmt::format("{}: {} candidates over {} images\n", strategy, total, chosen.size());
    } else if (ev->parsed()) {
      const RunConfig config = load_config(common, dataset);
      std::optional<LabelSet> label_set;
      if (!labels.empty()) label_set = read_label_set(labels);
      const std::vector<ImageGroundTruth> gt =
          dataset_ground_truth(dataset, split, label_set ? &*label_set : nullptr);
      const std::vector<ImageSelection> sel = read_selections(selections);
      const EvalReport report = evaluate_dataset(sel, gt, make_model(config), config.eval);
      write_file(common.out, report_json(report));
      out << report_table(report);
    } else if (bench->parsed()) {
      const RunConfig config = load_config(common);
      BenchmarkConfig bc;
      bc.selectors.clear();
      for (const std::string &s : split_list(strategies)) bc.selectors.push_back(parse_selector(s));
      bc.top_ks.clear();
      for (const std::string &k : split_list(top_ks)) {
        try {
          std::size_t used = 0;
          bc.top_ks.push_back(std::stoi(k, &used));
          if (used != k.size()) throw std::invalid_argument(k);
        } catch (const std::logic_error &) {
          throw Error(ErrorKind::kUsage, fmt::format("--top-k: '{}' is not an integer", k));
        }
      }
      bc.scenes = scenes.value_or(config.splits.test);
      bc.threads = common.threads;
      const BenchmarkResult result = run_benchmark(config, bc);
      write_file(common.out, benchmark_json(result));
      out << benchmark_table(result);
    }
    guard->commit();
    return kOk;
  } catch (const Error &e) {
    err << fmt::format("error[{}]: {}\n", to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::kUsage ? kUsageFailure : kFailure;
  } catch (const std::exception &e) {
    err << fmt::format("error[Internal]: {}\n", e.what());
    return kFailure;
  }
}

}  // namespace stackgrasp::cli
