// Acceptance checks. Prints one PASS/FAIL line per criterion; with a
// criterion name as the only argument, runs just that one. Exit status is
// non-zero if any selected criterion fails.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "deltaf/least_distance.hpp"
#include "deltaf/se3.hpp"
#include "deltaf/sweep.hpp"
#include "deltaf/trajectory.hpp"

using namespace deltaf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome linear_exactness() {
  test::Rng rng(20240601);
  double worst = 0.0;
  int instances = 0;
  for (; instances < 1000; ++instances) {
    const int n = test::uniform_int(rng, 2, 50);
    const int m1 = test::uniform_int(rng, 0, n - 1);
    const int m2 = test::uniform_int(rng, 1, n - m1);
    const LeastNormProblem p1{test::gaussian(rng, m1, n), test::gaussian_vector(rng, m1)};
    const DenseMatrix a2 = test::gaussian(rng, m2, n);
    const DenseVector b2 = test::gaussian_vector(rng, m2);
    const auto s1 = solve_least_norm(p1);
    const double predicted = s1.f_star + predict_delta_f(s1, a2, b2);
    worst = std::max(worst, test::rel_diff(predicted, solve_stacked(p1, a2, b2).f_star));
  }
  return {worst < 1e-8, std::to_string(instances) + " instances, max rel diff " + fmt(worst)};
}

Outcome least_distance_exactness() {
  test::Rng rng(20240602);
  double worst_f = 0.0;
  double worst_cov = 0.0;
  int instances = 0;
  for (; instances < 1000; ++instances) {
    const int n = test::uniform_int(rng, 2, 30);
    const int m1 = test::uniform_int(rng, 0, n - 1);
    const int m2 = test::uniform_int(rng, 1, n - m1);
    const LeastDistanceProblem p = test::random_ld_problem(rng, n, m1);
    const DenseMatrix a2 = test::gaussian(rng, m2, n);
    const DenseVector b2 = test::gaussian_vector(rng, m2);

    const auto s = solve_ld(p);
    const double predicted = s.f_star + predict_delta_f_ld(s, a2, b2);
    const auto stacked = test::kkt_solve(p.H, p.Sigma, p.h, test::vstack(p.A1, a2), test::vstack(p.b1, b2));
    worst_f = std::max(worst_f, test::rel_diff(predicted, stacked.f));

    const TransformedProblem t = to_least_norm(p);
    const DenseMatrix via_y = t.transform.map * solve_least_norm(t.problem).cov * t.transform.map.transpose();
    worst_cov = std::max(worst_cov, test::max_abs(s.cov - via_y) / std::max(1.0, test::max_abs(s.cov)));
  }
  return {worst_f < 1e-8 && worst_cov < 1e-9, std::to_string(instances) + " instances, max rel diff " +
                                                  fmt(worst_f) + ", covariance paths differ by " + fmt(worst_cov)};
}

Outcome lie_suite() {
  test::Rng rng(20240603);
  double round_trip = 0.0;
  double homomorphism = 0.0;
  double inverse = 0.0;
  const int samples = 500;
  for (int i = 0; i < samples; ++i) {
    const se3::Twist xi = test::random_twist(rng, 3.0);
    round_trip = std::max(round_trip, test::max_abs(se3::log(se3::exp(xi)).vector() - xi.vector()));
    const se3::Pose t = test::random_pose(rng, 3.0);
    const se3::Pose back = se3::exp(se3::log(t));
    round_trip = std::max({round_trip, test::max_abs(back.rotation() - t.rotation()),
                           test::max_abs(back.translation() - t.translation())});

    const se3::Pose a = test::random_pose(rng);
    const se3::Pose b = test::random_pose(rng);
    homomorphism = std::max(homomorphism, test::max_abs(se3::adjoint(a * b) - se3::adjoint(a) * se3::adjoint(b)));

    const se3::Twist eta = test::random_twist(rng, 2.5);
    inverse = std::max(inverse, test::max_abs(se3::left_jacobian(eta) * se3::left_jacobian_inv(eta) -
                                              se3::Matrix6d::Identity()));
  }
  return {round_trip < 1e-9 && homomorphism < 1e-10 && inverse < 1e-10,
          std::to_string(samples) + " samples, exp/log " + fmt(round_trip) + ", Ad(ab)-Ad(a)Ad(b) " +
              fmt(homomorphism) + ", J J^-1 - I " + fmt(inverse)};
}

Outcome jacobian_gate() {
  test::Rng rng(20240604);
  double worst = 0.0;
  const int instances = 100;
  for (int i = 0; i < instances; ++i) {
    traj::SimulationConfig cfg;
    cfg.n_poses = 20;
    cfg.seed = 5000 + static_cast<std::uint64_t>(i);
    const auto sim = traj::simulate_pair(cfg);
    const traj::AlignmentPair pair{test::uniform_int(rng, 1, 20), test::uniform_int(rng, 1, 20)};
    const auto jac = traj::alignment_jacobian(sim.a, sim.b, pair);
    const auto c = traj::alignment_constraint(20, 20, pair);
    const DenseMatrix fd = -nl::numeric_derivative(nl::PoseProductSpace{}, c, traj::stack_state(sim.a, sim.b), 1e-6);
    worst = std::max(worst, test::max_abs(jac.A2 - fd));
  }
  return {worst < 1e-5, std::to_string(instances) + " instances, max abs diff " + fmt(worst)};
}

// Sweeps are shared between criteria.
std::map<std::pair<int, std::uint64_t>, bench::SweepResult> sweep_cache;

const bench::SweepResult& sweep(int n_poses, std::uint64_t seed) {
  const auto key = std::make_pair(n_poses, seed);
  if (auto it = sweep_cache.find(key); it != sweep_cache.end()) return it->second;
  traj::SimulationConfig cfg;
  cfg.n_poses = n_poses;
  cfg.seed = seed;
  const auto sim = traj::simulate_pair(cfg);
  bench::SweepOptions opt;
  opt.mode = bench::Mode::kBoth;
  opt.jobs = 1;  // timings are compared, keep the workers from contending
  return sweep_cache.emplace(key, bench::run_sweep(sim.a, sim.b, opt)).first->second;
}

double solve_predict_ratio(const bench::SweepSummary& s) { return s.total_solve / s.total_predict; }

Outcome accuracy() {
  bool pass = true;
  std::ostringstream detail;
  detail << "20 poses, per seed max/median/failures:";
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto& s = sweep(20, seed).summary;
    pass = pass && s.failures == 0 && s.max_rel_error <= 0.15 && s.median_rel_error <= 0.05;
    detail << " [" << seed << "] " << fmt(s.max_rel_error) << "/" << fmt(s.median_rel_error) << "/" << s.failures;
  }
  return {pass, detail.str()};
}

Outcome speed() {
  const auto& s20 = sweep(20, 1).summary;
  const auto& s50 = sweep(50, 1).summary;
  const double r20 = solve_predict_ratio(s20);
  const double r50 = solve_predict_ratio(s50);
  return {r20 >= 5.0 && r50 >= r20,
          "solve/predict time ratio " + fmt(r20) + " at 20 poses, " + fmt(r50) + " at 50 poses (per-pair predict " +
              fmt(s20.total_predict / s20.rows) + " s vs solve " + fmt(s20.total_solve / s20.rows) + " s at 20)"};
}

Outcome degradation() {
  const auto& s20 = sweep(20, 1).summary;
  const auto& s100 = sweep(100, 1).summary;
  return {s100.p99_rel_error > s20.p99_rel_error,
          "p99 rel error " + fmt(s20.p99_rel_error) + " at 20 poses, " + fmt(s100.p99_rel_error) +
              " at 100 poses (" + std::to_string(s100.failures) + " of " + std::to_string(s100.rows) +
              " solves did not converge)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"linear_exactness", linear_exactness}, {"least_distance_exactness", least_distance_exactness},
      {"lie_group_suite", lie_suite},         {"alignment_jacobian", jacobian_gate},
      {"sweep_accuracy", accuracy},           {"speed", speed},
      {"degradation", degradation},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  bool all_pass = true;
  bool ran = false;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && name != only) continue;
    ran = true;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  if (!ran) {
    std::cerr << "unknown criterion: " << only << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
