#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "deltaf/least_distance.hpp"
#include "deltaf/least_norm.hpp"
#include "deltaf/se3.hpp"
#include "deltaf/sweep.hpp"
#include "deltaf/trajectory.hpp"

namespace py = pybind11;
using namespace deltaf;

namespace {

PyObject* error_type = nullptr;

se3::Pose pose_from(const Eigen::Matrix4d& m) {
  if (!m.row(3).isApprox(Eigen::RowVector4d(0, 0, 0, 1), 1e-12))
    throw Error(ErrorCode::kInvalidArgument, "last row of a pose matrix must be [0, 0, 0, 1]");
  return se3::Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

std::vector<Eigen::Matrix4d> pose_matrices(const traj::Trajectory& t) {
  std::vector<Eigen::Matrix4d> out;
  for (const auto& p : traj::chain_all(t)) out.push_back(p.matrix());
  return out;
}

py::dict sweep_columns(const bench::SweepResult& r) {
  const auto n = static_cast<py::ssize_t>(r.rows.size());
  Eigen::VectorXi l(n), rr(n);
  Eigen::VectorXd df(n), f(n), rel(n), tp(n), ts(n);
  py::list status;
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& row = r.rows[static_cast<std::size_t>(i)];
    l(i) = row.l;
    rr(i) = row.r;
    df(i) = row.delta_f;
    f(i) = row.f_real;
    rel(i) = row.rel_error;
    tp(i) = row.t_predict;
    ts(i) = row.t_solve;
    status.append(row.status);
  }
  py::dict d;
  d["l"] = l;
  d["r"] = rr;
  d["delta_f"] = df;
  d["f_real"] = f;
  d["rel_error"] = rel;
  d["t_predict"] = tp;
  d["t_solve"] = ts;
  d["status"] = status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-form cost change of added constraints in least-squares problems";

  error_type = PyErr_NewException("deltaf._core.Error", PyExc_RuntimeError, nullptr);
  m.add_object("Error", py::handle(error_type));
  // args = (code name, message)
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error_type, py::make_tuple(std::string(to_string(e.code())), e.what()).ptr());
    }
  });

  py::class_<PhaseSolution>(m, "PhaseSolution")
      .def_readonly("x_star", &PhaseSolution::x_star)
      .def_readonly("cov", &PhaseSolution::cov)
      .def_readonly("f_star", &PhaseSolution::f_star);

  m.def(
      "solve_least_norm",
      [](const DenseMatrix& a, const DenseVector& b) { return solve_least_norm({a, b}); }, py::arg("A"),
      py::arg("b"), "min |x|^2 subject to A x = b.");
  m.def(
      "predict_delta_f", [](const PhaseSolution& s, const DenseMatrix& a2, const DenseVector& b2) {
        return predict_delta_f(s, a2, b2);
      },
      py::arg("solution"), py::arg("A2"), py::arg("b2"));
  m.def(
      "solve_stacked",
      [](const DenseMatrix& a1, const DenseVector& b1, const DenseMatrix& a2, const DenseVector& b2) {
        return solve_stacked({a1, b1}, a2, b2);
      },
      py::arg("A1"), py::arg("b1"), py::arg("A2"), py::arg("b2"));

  m.def(
      "solve_least_distance",
      [](const DenseMatrix& h_mat, const DenseMatrix& sigma, const DenseVector& h, const DenseMatrix& a1,
         const DenseVector& b1) { return solve_ld({h_mat, sigma, h, a1, b1}); },
      py::arg("H"), py::arg("Sigma"), py::arg("h"), py::arg("A1"), py::arg("b1"),
      "min |H x - h|^2 weighted by Sigma^-1, subject to A1 x = b1.");
  m.def(
      "predict_delta_f_ld", [](const PhaseSolution& s, const DenseMatrix& a2, const DenseVector& b2) {
        return predict_delta_f_ld(s, a2, b2);
      },
      py::arg("solution"), py::arg("A2"), py::arg("b2"));

  auto se3m = m.def_submodule("se3", "SE(3) with twists ordered (rho, phi)");
  se3m.def(
      "exp", [](const se3::Vector6d& xi) { return se3::exp(se3::Twist(xi)).matrix(); }, py::arg("xi"));
  se3m.def(
      "log", [](const Eigen::Matrix4d& t) { return se3::log(pose_from(t)).vector(); }, py::arg("T"));
  se3m.def(
      "adjoint", [](const Eigen::Matrix4d& t) { return se3::adjoint(pose_from(t)); }, py::arg("T"));
  se3m.def(
      "left_jacobian", [](const se3::Vector6d& xi) { return se3::left_jacobian(se3::Twist(xi)); }, py::arg("xi"));
  se3m.def(
      "left_jacobian_inv", [](const se3::Vector6d& xi) { return se3::left_jacobian_inv(se3::Twist(xi)); },
      py::arg("xi"));

  py::class_<traj::Trajectory>(m, "Trajectory")
      .def_property_readonly("num_poses", &traj::Trajectory::num_poses)
      .def("poses", &pose_matrices, "Absolute poses as 4x4 matrices.")
      .def("save", [](const traj::Trajectory& t, const std::filesystem::path& p) { traj::save_trajectory(p, t); })
      .def_static("load", &traj::load_trajectory, py::arg("path"));

  m.def(
      "simulate_pair",
      [](int n_poses, double trans_noise, double rot_noise, std::uint64_t seed, double max_heading) {
        traj::SimulationConfig cfg;
        cfg.n_poses = n_poses;
        cfg.trans_noise_std = trans_noise;
        cfg.rot_noise_std = rot_noise;
        cfg.seed = seed;
        cfg.max_heading = max_heading;
        auto s = traj::simulate_pair(cfg);
        return py::make_tuple(std::move(s.a), std::move(s.b), std::move(s.a_true), std::move(s.b_true));
      },
      py::arg("n_poses") = 20, py::arg("trans_noise") = 0.1, py::arg("rot_noise") = 0.01, py::arg("seed") = 42,
      py::arg("max_heading") = traj::SimulationConfig{}.max_heading,
      "Returns (a, b, a_true, b_true).");

  m.def(
      "predict_alignment_cost",
      [](const traj::Trajectory& a, const traj::Trajectory& b, int l, int r) {
        py::gil_scoped_release release;
        return traj::predict_alignment_cost(a, b, {l, r});
      },
      py::arg("a"), py::arg("b"), py::arg("l"), py::arg("r"));
  m.def(
      "solve_alignment",
      [](const traj::Trajectory& a, const traj::Trajectory& b, int l, int r) {
        traj::AlignmentSolution s;
        {
          py::gil_scoped_release release;
          s = traj::solve_alignment(a, b, {l, r});
        }
        py::dict d;
        d["f_real"] = s.f_real;
        d["iterations"] = s.report.iterations;
        d["a"] = std::move(s.a);
        d["b"] = std::move(s.b);
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("l"), py::arg("r"));

  m.def(
      "sweep",
      [](const traj::Trajectory& a, const traj::Trajectory& b, const std::string& mode, int jobs, bool timings) {
        bench::SweepOptions opt;
        opt.mode = bench::parse_mode(mode);
        opt.jobs = jobs;
        opt.record_timings = timings;
        bench::SweepResult r;
        {
          py::gil_scoped_release release;
          r = bench::run_sweep(a, b, opt);
        }
        return sweep_columns(r);
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "both", py::arg("jobs") = 0, py::arg("timings") = true,
      "All alignment pairs, column-wise; l-major order.");
}
