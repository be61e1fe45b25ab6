#include "stackgrasp/config.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(const std::string &key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return key.front() != '.' && key.back() != '.';
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string &line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class Reader {
 public:
  Reader(const KeyTree &tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  bool has(const std::string &key) const { return tree_.count(key) != 0; }

  double number(const std::string &key, double fallback) {
    if (!has(key)) return fallback;
    return parse_number(key, take(key));
  }

  int integer(const std::string &key, int fallback) {
    const double v = number(key, fallback);
    if (v != static_cast<int>(v)) fail(key, "expected an integer");
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer(const std::string &key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const std::string raw = take(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) {
      fail(key, "expected a non-negative integer");
    }
    return v;
  }

  std::string string(const std::string &key, const std::string &fallback) {
    if (!has(key)) return fallback;
    const std::string raw = take(key);
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
      fail(key, "expected a double-quoted string");
    }
    return raw.substr(1, raw.size() - 2);
  }

  std::vector<double> list(const std::string &key, const std::vector<double> &fallback) {
    if (!has(key)) return fallback;
    const std::string raw = take(key);
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
      fail(key, "expected a bracketed list");
    }
    std::vector<double> out;
    std::stringstream in(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(parse_number(key, item));
    }
    return out;
  }

  Vec3 vec3(const std::string &key, const Vec3 &fallback) {
    const std::vector<double> v = list(key, {fallback.x(), fallback.y(), fallback.z()});
    if (v.size() != 3) fail(key, "expected three values");
    return {v[0], v[1], v[2]};
  }

  void reject_unused() const {
    for (const auto &[key, value] : tree_) {
      if (!used_.count(key)) fail(key, "unknown key");
    }
  }

 private:
  std::string take(const std::string &key) {
    used_.insert(key);
    return tree_.at(key);
  }

  double parse_number(const std::string &key, const std::string &raw) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
      fail(key, fmt::format("'{}' is not a number", raw));
    }
    return v;
  }

  [[noreturn]] void fail(const std::string &key, const std::string &what) const {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}: {}", source_, key, what));
  }

  const KeyTree &tree_;
  std::string source_;
  std::set<std::string> used_;
};

std::string fmt_list(const std::vector<double> &v) {
  return fmt::format("[{}]", fmt::join(v, ", "));
}

std::string fmt_vec3(const Vec3 &v) { return fmt_list({v.x(), v.y(), v.z()}); }

}  // namespace

KeyTree parse_key_tree(const std::string &text, const std::string &source) {
  KeyTree tree;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    const std::string where = fmt::format("{}:{}", source, line_no);
    if (t.front() == '[' && t.find('=') == std::string::npos) {
      if (t.back() != ']') {
        throw Error(ErrorKind::kParse, fmt::format("{}: unterminated section header", where));
      }
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_key(section)) {
        throw Error(ErrorKind::kParse, fmt::format("{}: invalid section name", where));
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, fmt::format("{}: expected 'key = value'", where));
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key) || value.empty()) {
      throw Error(ErrorKind::kParse, fmt::format("{}: malformed assignment", where));
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (!tree.emplace(full, value).second) {
      throw Error(ErrorKind::kParse, fmt::format("{}: duplicate key '{}'", where, full));
    }
  }
  return tree;
}

StackSpec RunConfig::default_stack() {
  StackSpec s;
  s.removal_probability = 0.3;
  return s;
}

NoiseSpec RunConfig::default_noise() {
  NoiseSpec n;
  n.rot_std = 2.0 * M_PI / 180.0;
  n.trans_std = 0.005;
  n.mask_erosion = 2;
  n.dropout_rate = 0.05;
  n.clutter_rate = 0.5;
  return n;
}

void RunConfig::validate() const {
  if (splits.train < 0 || splits.val < 0 || splits.test < 0) {
    throw Error(ErrorKind::kInvalidArgument, "split sizes must be non-negative");
  }
  stack.validate();
  if (!(irregular_fraction >= 0.0 && irregular_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "irregular_fraction must lie in [0, 1]");
  }
  if (!(camera.radius_min > 0.0 && camera.radius_min <= camera.radius_max)) {
    throw Error(ErrorKind::kInvalidArgument, "camera radius range is invalid");
  }
  if (!(camera.elevation_min_deg <= camera.elevation_max_deg &&
        camera.elevation_min_deg > -90.0 && camera.elevation_max_deg < 90.0)) {
    throw Error(ErrorKind::kInvalidArgument, "camera elevation range is invalid");
  }
  camera.intrinsics.validate();
  if (imu.noise_std < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "IMU noise must be non-negative");
  }
  if (model_points < 8) {
    throw Error(ErrorKind::kInvalidArgument, "model needs at least 8 points");
  }
  noise.validate();
  filter.validate();
  ErrorThresholds::from_fractions(PoseErrorKind::kAddS, eval.threshold_fractions, 1.0);
}

std::string RunConfig::to_text() const {
  const CameraIntrinsics &k = camera.intrinsics;
  std::string out;
  out += fmt::format("seed = {}\n", seed);
  out += fmt::format("\n[splits]\ntrain = {}\nval = {}\ntest = {}\n", splits.train,
                     splits.val, splits.test);
  out += fmt::format(
      "\n[stack]\ngrid = [{}, {}, {}]\nbrick_size = {}\ngap = {}\n"
      "jitter_translation = {}\njitter_yaw = {}\nremoval_probability = {}\n"
      "irregular_fraction = {}\n",
      stack.grid[0], stack.grid[1], stack.grid[2], fmt_vec3(stack.brick_size), stack.gap,
      stack.jitter_translation, stack.jitter_yaw, stack.removal_probability,
      irregular_fraction);
  out += fmt::format(
      "\n[camera]\nradius_min = {}\nradius_max = {}\nelevation_min_deg = {}\n"
      "elevation_max_deg = {}\nroll_max_deg = {}\nfx = {}\nfy = {}\ncx = {}\ncy = {}\n"
      "width = {}\nheight = {}\n",
      camera.radius_min, camera.radius_max, camera.elevation_min_deg,
      camera.elevation_max_deg, camera.roll_max_deg, k.fx, k.fy, k.cx, k.cy, k.width,
      k.height);
  out += fmt::format("\n[imu]\nnoise_std = {}\nextrinsic_translation = {}\n",
                     imu.noise_std, fmt_vec3(imu.extrinsic_translation));
  out += fmt::format("\n[model]\npoints = {}\n", model_points);
  out += fmt::format(
      "\n[noise]\nrot_std = {}\ntrans_std = {}\nmask_erosion = {}\n"
      "confidence_offset = {}\nconfidence_gain = {}\nconfidence_noise = {}\n"
      "dropout_rate = {}\nclutter_rate = {}\n",
      noise.rot_std, noise.trans_std, noise.mask_erosion, noise.confidence.offset,
      noise.confidence.gain, noise.confidence.noise_std, noise.dropout_rate,
      noise.clutter_rate);
  out += fmt::format(
      "\n[filter]\nepsilon_vis = {}\ntop_k = {}\norder = \"{}\"\n", filter.epsilon_vis,
      filter.top_k,
      filter.order == FilterOrder::kHeightThenVision ? "height_then_vision"
                                                     : "vision_then_height");
  out += fmt::format("\n[eval]\nthreshold_fractions = {}\n",
                     fmt_list(eval.threshold_fractions));
  return out;
}

RunConfig RunConfig::from_text(const std::string &text, const std::string &source) {
  const KeyTree tree = parse_key_tree(text, source);
  Reader r(tree, source);
  RunConfig c;
  c.seed = r.unsigned_integer("seed", c.seed);

  c.splits.train = r.integer("splits.train", c.splits.train);
  c.splits.val = r.integer("splits.val", c.splits.val);
  c.splits.test = r.integer("splits.test", c.splits.test);

  const std::vector<double> grid = r.list(
      "stack.grid", {double(c.stack.grid[0]), double(c.stack.grid[1]), double(c.stack.grid[2])});
  if (grid.size() != 3) {
    throw Error(ErrorKind::kParse, fmt::format("{}: stack.grid: expected three values", source));
  }
  for (int i = 0; i < 3; ++i) {
    if (grid[i] != std::floor(grid[i]) || grid[i] < 1 || grid[i] > 1e6) {
      throw Error(ErrorKind::kParse,
                  fmt::format("{}: stack.grid: counts must be positive integers", source));
    }
    c.stack.grid[i] = static_cast<int>(grid[i]);
  }
  c.stack.brick_size = r.vec3("stack.brick_size", c.stack.brick_size);
  c.stack.gap = r.number("stack.gap", c.stack.gap);
  c.stack.jitter_translation = r.number("stack.jitter_translation", c.stack.jitter_translation);
  c.stack.jitter_yaw = r.number("stack.jitter_yaw", c.stack.jitter_yaw);
  c.stack.removal_probability =
      r.number("stack.removal_probability", c.stack.removal_probability);
  c.irregular_fraction = r.number("stack.irregular_fraction", c.irregular_fraction);

  c.camera.radius_min = r.number("camera.radius_min", c.camera.radius_min);
  c.camera.radius_max = r.number("camera.radius_max", c.camera.radius_max);
  c.camera.elevation_min_deg = r.number("camera.elevation_min_deg", c.camera.elevation_min_deg);
  c.camera.elevation_max_deg = r.number("camera.elevation_max_deg", c.camera.elevation_max_deg);
  c.camera.roll_max_deg = r.number("camera.roll_max_deg", c.camera.roll_max_deg);
  CameraIntrinsics &k = c.camera.intrinsics;
  k.fx = r.number("camera.fx", k.fx);
  k.fy = r.number("camera.fy", k.fy);
  k.cx = r.number("camera.cx", k.cx);
  k.cy = r.number("camera.cy", k.cy);
  k.width = r.integer("camera.width", k.width);
  k.height = r.integer("camera.height", k.height);

  c.imu.noise_std = r.number("imu.noise_std", c.imu.noise_std);
  c.imu.extrinsic_translation = r.vec3("imu.extrinsic_translation", c.imu.extrinsic_translation);

  c.model_points = r.integer("model.points", c.model_points);

  NoiseSpec &n = c.noise;
  n.rot_std = r.number("noise.rot_std", n.rot_std);
  n.trans_std = r.number("noise.trans_std", n.trans_std);
  n.mask_erosion = r.integer("noise.mask_erosion", n.mask_erosion);
  n.confidence.offset = r.number("noise.confidence_offset", n.confidence.offset);
  n.confidence.gain = r.number("noise.confidence_gain", n.confidence.gain);
  n.confidence.noise_std = r.number("noise.confidence_noise", n.confidence.noise_std);
  n.dropout_rate = r.number("noise.dropout_rate", n.dropout_rate);
  n.clutter_rate = r.number("noise.clutter_rate", n.clutter_rate);

  c.filter.epsilon_vis = r.number("filter.epsilon_vis", c.filter.epsilon_vis);
  c.filter.top_k = r.integer("filter.top_k", c.filter.top_k);
  const std::string order = r.string("filter.order", "height_then_vision");
  if (order == "height_then_vision") {
    c.filter.order = FilterOrder::kHeightThenVision;
  } else if (order == "vision_then_height") {
    c.filter.order = FilterOrder::kVisionThenHeight;
  } else {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: filter.order: unknown order '{}'", source, order));
  }
  c.eval.threshold_fractions =
      r.list("eval.threshold_fractions", c.eval.threshold_fractions);

  r.reject_unused();
  try {
    c.validate();
  } catch (const Error &e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", source, e.what()));
  }
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kParse, fmt::format("{}: cannot open config file", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str(), path.string());
}

}  // namespace stackgrasp
