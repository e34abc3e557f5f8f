#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <vector>

#include "deltaf/manifold.hpp"
#include "deltaf/se3.hpp"

namespace deltaf::traj {

/// A head pose followed by a chain of relative poses. Pose k (1-based) is
/// head * rel_1 * ... * rel_{k-1}. edge_covs[0] weights the head and
/// edge_covs[i] the i-th relative pose, all in (rho, phi) tangent order.
struct Trajectory {
  se3::Pose head;
  std::vector<se3::Pose> rel_poses;
  std::vector<se3::Matrix6d> edge_covs;

  int num_poses() const { return static_cast<int>(rel_poses.size()) + 1; }
  /// Throws kDimensionMismatch / kNotSPD.
  void validate() const;
};

/// Hard constraint pose l of A == pose r of B, both 1-based.
struct AlignmentPair {
  int l = 1;
  int r = 1;
};

struct SimulationConfig {
  int n_poses = 20;
  double trans_step = 1.0;         // m travelled per step
  double trans_noise_std = 0.1;    // m
  double rot_noise_std = 0.01;     // rad
  std::uint64_t seed = 42;
  double max_heading = std::numbers::pi / 4.0;  // headings ~ U(-max, max) per step
};

struct SimulatedPair {
  Trajectory a;
  Trajectory b;
  Trajectory a_true;
  Trajectory b_true;
};

/// Two random planar walks, B rigidly moved so that both noise-free
/// trajectories share their middle pose, then right-perturbed by Gaussian
/// tangent noise. Deterministic per seed.
SimulatedPair simulate_pair(const SimulationConfig& cfg);

/// 1-based index of the shared middle pose.
inline int middle_index(int n_poses) { return (n_poses + 1) / 2; }

/// Throws kIndexOutOfRange unless 1 <= k <= num_poses().
se3::Pose chain_pose(const Trajectory& t, int k);
std::vector<se3::Pose> chain_all(const Trajectory& t);

struct AlignmentJacobian {
  DenseMatrix A2;  // 6 x 6 (N_A + 1 + N_B + 1)
  se3::Twist eta;  // Log(T^A_l (T^B_r)^-1)
};

/// Analytic Jacobian of the alignment constraint, state ordered
/// [A head, A edges, B head, B edges]. The block of A-component i is
/// -J_l(eta)^-1 Ad(T^A_i); the block of B-component j is
/// J_l(eta)^-1 Ad(T^A_l (T^B_r)^-1 T^B_j), where T_i are chained poses.
AlignmentJacobian alignment_jacobian(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair);

/// Predicted optimal value of the aligned problem: eta^T [A2 Sigma A2^T]^-1 eta,
/// with the unconstrained optimum (the measurements themselves, cost 0) as phase 1.
double predict_alignment_cost(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair);

struct AlignmentSolution {
  double f_real = 0.0;
  Trajectory a;
  Trajectory b;
  nl::SolverReport report;
};

/// Solves the bending problem to optimality starting from the measurements.
AlignmentSolution solve_alignment(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair,
                                  nl::SolverOptions options = {});

struct PredictionReport {
  double delta_f = 0.0;
  std::optional<double> f_real;
  double rel_error = 0.0;  // NaN when f_real is absent
  double t_predict = 0.0;  // s
  double t_solve = 0.0;    // s
};

inline constexpr double kRelErrorFloor = 1e-12;

/// |predicted - real| / max(real, 1e-12)
double relative_error(double predicted, double real);

// Pieces of the alignment problem, exposed for tests and the generic solver.
using State = nl::PoseProductSpace::Point;

State stack_state(const Trajectory& a, const Trajectory& b);
/// Inverse of stack_state, reusing the covariances of the templates.
std::pair<Trajectory, Trajectory> split_state(const State& x, const Trajectory& a_template,
                                              const Trajectory& b_template);
nl::BlockDiagonal stacked_covariance(const Trajectory& a, const Trajectory& b);
/// C(x) = Log(T^A_l (T^B_r)^-1) on the stacked state, with analytic derivative.
nl::Constraint<State> alignment_constraint(int poses_a, int poses_b, const AlignmentPair& pair);

// Trajectory CSV (see docs/trajectory_format.md).
void write_trajectory(std::ostream& out, const Trajectory& t);
Trajectory read_trajectory(std::istream& in);
void save_trajectory(const std::filesystem::path& path, const Trajectory& t);
Trajectory load_trajectory(const std::filesystem::path& path);

}  // namespace deltaf::traj
