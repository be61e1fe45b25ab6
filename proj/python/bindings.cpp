#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "stackgrasp/error.hpp"
#include "stackgrasp/graspability.hpp"
#include "stackgrasp/hungarian.hpp"
#include "stackgrasp/pipeline.hpp"

namespace py = pybind11;
using namespace stackgrasp;

namespace {

using Matrix4 = Eigen::Matrix4d;
using Image8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Matrix4 to_matrix(const Pose &p) {
  Matrix4 m = Matrix4::Identity();
  m.topLeftCorner<3, 3>() = p.rotation();
  m.topRightCorner<3, 1>() = p.translation();
  return m;
}

Pose to_pose(const Matrix4 &m, Frame from, Frame to) {
  return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>(), from, to);
}

std::vector<Pose> to_poses(const std::vector<Matrix4> &ms, Frame from, Frame to) {
  std::vector<Pose> out;
  for (const Matrix4 &m : ms) out.push_back(to_pose(m, from, to));
  return out;
}

Mask to_mask(const Image8 &img) {
  if (img.ndim() != 2) throw py::value_error("mask must be a 2-D array");
  const int h = static_cast<int>(img.shape(0));
  const int w = static_cast<int>(img.shape(1));
  std::vector<std::uint8_t> pixels(img.data(), img.data() + img.size());
  for (std::uint8_t &p : pixels) p = p ? 1 : 0;
  return Mask::from_dense(w, h, pixels);
}

py::array_t<bool> to_array(const Mask &m) {
  py::array_t<bool> out({m.image_height(), m.image_width()});
  const std::vector<std::uint8_t> dense = m.dense();
  bool *dst = out.mutable_data();
  for (std::size_t i = 0; i < dense.size(); ++i) dst[i] = dense[i] != 0;
  return out;
}

std::vector<std::string> direction_names(const DirectionSet &s) {
  std::vector<std::string> out;
  for (Direction d : kAllDirections) {
    if (s.contains(d)) out.emplace_back(to_string(d));
  }
  return out;
}

Direction parse_direction(const std::string &name) {
  for (Direction d : kAllDirections) {
    if (to_string(d) == name) return d;
  }
  throw py::value_error("unknown direction '" + name + "'");
}

RunConfig config_from(const std::string &text) {
  return text.empty() ? RunConfig{} : RunConfig::from_text(text, "<python>");
}

py::dict scene_dict(const SceneRecord &rec) {
  py::dict d;
  std::vector<Matrix4> poses;
  for (const Pose &p : rec.scene.object_poses) poses.push_back(to_matrix(p));
  d["object_to_world"] = poses;
  d["camera_to_world"] = to_matrix(rec.scene.camera_pose);
  d["imu_accel"] = rec.scene.imu_accel;
  d["imu_extrinsic"] = to_matrix(rec.scene.imu_extrinsic);
  const CameraIntrinsics &k = rec.scene.intrinsics;
  d["intrinsics"] = py::dict(py::arg("fx") = k.fx, py::arg("fy") = k.fy, py::arg("cx") = k.cx,
                             py::arg("cy") = k.cy, py::arg("width") = k.width,
                             py::arg("height") = k.height);
  std::vector<bool> graspable;
  for (const GraspLabel &l : rec.labels) graspable.push_back(l.graspable);
  d["graspable"] = graspable;
  py::array_t<float> depth({rec.frame.height, rec.frame.width});
  std::copy(rec.frame.depth.begin(), rec.frame.depth.end(), depth.mutable_data());
  d["depth"] = depth;
  py::list modal, amodal;
  for (const Mask &m : rec.frame.modal_masks) modal.append(to_array(m));
  for (const Mask &m : rec.frame.amodal_masks) amodal.append(to_array(m));
  d["modal_masks"] = modal;
  d["amodal_masks"] = amodal;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Brick-stack scene generation, graspability labels and candidate selection";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("default_config", [] { return RunConfig{}.to_text(); },
        "Default run configuration as text");

  m.def(
      "generate_stack",
      [](std::array<int, 3> grid, const Vec3 &brick_size, double removal_probability,
         std::uint64_t seed, double gap) {
        StackSpec spec;
        spec.grid = grid;
        spec.brick_size = brick_size;
        spec.removal_probability = removal_probability;
        spec.seed = seed;
        spec.gap = gap;
        std::vector<Matrix4> out;
        for (const Pose &p : generate_stack(spec)) out.push_back(to_matrix(p));
        return out;
      },
      py::arg("grid") = std::array<int, 3>{3, 3, 3},
      py::arg("brick_size") = Vec3(0.24, 0.115, 0.071), py::arg("removal_probability") = 0.0,
      py::arg("seed") = 0, py::arg("gap") = 0.0,
      "Object-to-world 4x4 poses of a procedural stack");

  m.def(
      "label_stack",
      [](const std::vector<Matrix4> &poses, const Vec3 &brick_size) {
        const ObjectModel model = ObjectModel::cuboid(brick_size, 8);
        std::vector<std::pair<bool, std::vector<std::string>>> out;
        for (const GraspLabel &l : label_scene(to_poses(poses, Frame::kObject, Frame::kWorld),
                                               model)) {
          out.emplace_back(l.graspable, direction_names(l.missing_directions));
        }
        return out;
      },
      py::arg("poses"), py::arg("brick_size") = Vec3(0.24, 0.115, 0.071),
      "(graspable, missing directions) per brick");

  m.def(
      "is_graspable",
      [](const std::vector<std::string> &missing) {
        DirectionSet s;
        for (const std::string &name : missing) s.insert(parse_direction(name));
        return is_graspable(s);
      },
      py::arg("missing"));

  m.def(
      "add_s",
      [](const Matrix4 &pred, const Matrix4 &gt, const Vec3 &brick_size, int n_points) {
        return add_s(to_pose(pred, Frame::kObject, Frame::kCamera),
                     to_pose(gt, Frame::kObject, Frame::kCamera),
                     ObjectModel::cuboid(brick_size, n_points));
      },
      py::arg("pred"), py::arg("gt"), py::arg("brick_size") = Vec3(0.24, 0.115, 0.071),
      py::arg("n_points") = 512);

  m.def(
      "mssd",
      [](const Matrix4 &pred, const Matrix4 &gt, const Vec3 &brick_size, int n_points,
         bool symmetric) {
        const ObjectModel model =
            symmetric ? ObjectModel::cuboid(brick_size, n_points)
                      : ObjectModel::cuboid(brick_size, n_points, ObjectModel::Origin::kCenter,
                                            {Mat3::Identity()});
        return mssd(to_pose(pred, Frame::kObject, Frame::kCamera),
                    to_pose(gt, Frame::kObject, Frame::kCamera), model);
      },
      py::arg("pred"), py::arg("gt"), py::arg("brick_size") = Vec3(0.24, 0.115, 0.071),
      py::arg("n_points") = 512, py::arg("symmetric") = true);

  m.def(
      "solve_assignment",
      [](const Eigen::MatrixXd &cost) {
        const Assignment a = solve_assignment(cost);
        return py::make_tuple(a.row_to_col, a.total_cost);
      },
      py::arg("cost"), "Minimum-cost matching: (row_to_col, total_cost); -1 = unassigned");

  m.def(
      "visibility_ratio",
      [](const Image8 &modal, const Image8 &amodal) {
        return visibility_ratio(to_mask(modal), to_mask(amodal));
      },
      py::arg("modal"), py::arg("amodal"));

  m.def(
      "gravity_height",
      [](const Matrix4 &object_to_camera, const Vec3 &imu_accel,
         const std::optional<Matrix4> &camera_to_sensor) {
        const Pose ext = camera_to_sensor
                             ? to_pose(*camera_to_sensor, Frame::kCamera, Frame::kSensor)
                             : Pose(Frame::kCamera, Frame::kSensor);
        return gravity_height(to_pose(object_to_camera, Frame::kObject, Frame::kCamera),
                              imu_accel, ext);
      },
      py::arg("object_to_camera"), py::arg("imu_accel"), py::arg("camera_to_sensor") = py::none());

  m.def(
      "generate_scene",
      [](const std::string &config_text, const std::string &split, int scene_id) {
        const RunConfig config = config_from(config_text);
        return scene_dict(generate_scene(config, make_model(config), split, scene_id));
      },
      py::arg("config") = "", py::arg("split") = "test", py::arg("scene_id") = 0,
      "One scene as a dict of poses, labels, depth and masks");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "stackgrasp");
        std::ostringstream out, err;
        int status = 0;
        {
          py::gil_scoped_release release;
          status = cli::run(args, out, err);
        }
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Runs one command line; returns (status, stdout, stderr)");
}
