#include "deltaf/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace deltaf::traj {

namespace {

using se3::Matrix6d;
using se3::Pose;

void check_index(const Trajectory& t, int k, const char* which) {
  if (k < 1 || k > t.num_poses()) {
    throw Error(ErrorCode::kIndexOutOfRange, std::string(which) + " pose index " + std::to_string(k) +
                                                 " outside 1.." + std::to_string(t.num_poses()));
  }
}

// Left-to-right product with periodic re-projection of the rotation.
class Chain {
 public:
  explicit Chain(const Pose& start) : pose_(start) {}
  void append(const Pose& rel) {
    pose_ = pose_ * rel;
    if (++count_ % se3::kReorthonormalizeEvery == 0) pose_ = pose_.orthonormalized();
  }
  const Pose& pose() const { return pose_; }

 private:
  Pose pose_;
  int count_ = 0;
};

std::vector<Pose> chain_prefix(const Pose& head, const Pose* rel, int count) {
  std::vector<Pose> out;
  out.reserve(count + 1);
  Chain chain(head);
  out.push_back(chain.pose());
  for (int i = 0; i < count; ++i) {
    chain.append(rel[i]);
    out.push_back(chain.pose());
  }
  return out;
}

Matrix6d diagonal_cov(double trans_std, double rot_std) {
  se3::Vector6d d;
  d << trans_std * trans_std, trans_std * trans_std, trans_std * trans_std, rot_std * rot_std, rot_std * rot_std,
      rot_std * rot_std;
  return d.asDiagonal();
}

Pose planar_step(double heading, double forward) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return Pose::unchecked(r, r * Eigen::Vector3d(forward, 0.0, 0.0));
}

// Blocks of the alignment Jacobian for chained poses at a given state.
struct AlignmentBlocks {
  std::vector<Matrix6d> a;  // components 1..l of A
  std::vector<Matrix6d> b;  // components 1..r of B
  se3::Twist eta;
};

AlignmentBlocks alignment_blocks(const Pose& a_head, const Pose* a_rel, const Pose& b_head, const Pose* b_rel,
                                 const AlignmentPair& pair) {
  const std::vector<Pose> ca = chain_prefix(a_head, a_rel, pair.l - 1);
  const std::vector<Pose> cb = chain_prefix(b_head, b_rel, pair.r - 1);
  const Pose gap = ca.back() * cb.back().inverse();

  AlignmentBlocks out;
  out.eta = se3::log(gap);
  const Matrix6d j_inv = se3::left_jacobian_inv(out.eta);
  out.a.reserve(ca.size());
  for (const Pose& t : ca) out.a.push_back(-j_inv * se3::adjoint(t));
  out.b.reserve(cb.size());
  for (const Pose& t : cb) out.b.push_back(j_inv * se3::adjoint(gap * t));
  return out;
}

void check_pair(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair) {
  for (const Trajectory* t : {&a, &b}) {
    if (t->edge_covs.size() != t->rel_poses.size() + 1) {
      throw Error(ErrorCode::kDimensionMismatch, "trajectory needs one covariance per head and relative pose");
    }
  }
  check_index(a, pair.l, "trajectory A");
  check_index(b, pair.r, "trajectory B");
}

}  // namespace

void Trajectory::validate() const {
  if (edge_covs.size() != rel_poses.size() + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "trajectory needs one covariance per head and relative pose");
  }
  for (const auto& c : edge_covs) {
    if (!c.allFinite()) throw Error(ErrorCode::kNonFinite, "edge covariance contains NaN or Inf");
    factor_spd(c);
  }
}

SimulatedPair simulate_pair(const SimulationConfig& cfg) {
  if (cfg.n_poses < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 poses");
  if (!(cfg.trans_noise_std >= 0.0) || !(cfg.rot_noise_std >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise standard deviations must be non-negative");
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> heading(-cfg.max_heading, cfg.max_heading);
  std::normal_distribution<double> unit(0.0, 1.0);

  const int edges = cfg.n_poses - 1;
  // Zero noise still needs an SPD weight; fall back to the nominal regime.
  const double w_trans = cfg.trans_noise_std > 0.0 ? cfg.trans_noise_std : 0.1;
  const double w_rot = cfg.rot_noise_std > 0.0 ? cfg.rot_noise_std : 0.01;
  const Matrix6d cov = diagonal_cov(w_trans, w_rot);

  auto walk = [&] {
    Trajectory t;
    t.rel_poses.reserve(edges);
    for (int i = 0; i < edges; ++i) t.rel_poses.push_back(planar_step(heading(rng), cfg.trans_step));
    t.edge_covs.assign(edges + 1, cov);
    return t;
  };

  SimulatedPair out;
  out.a_true = walk();
  out.b_true = walk();
  const int mid = middle_index(cfg.n_poses);
  const Pose g = chain_pose(out.a_true, mid) * chain_pose(out.b_true, mid).inverse();
  out.b_true.head = g * out.b_true.head;

  auto perturb = [&](const Pose& p) {
    const Eigen::Vector3d rho(cfg.trans_noise_std * unit(rng), cfg.trans_noise_std * unit(rng),
                              cfg.trans_noise_std * unit(rng));
    const Eigen::Vector3d phi(cfg.rot_noise_std * unit(rng), cfg.rot_noise_std * unit(rng),
                              cfg.rot_noise_std * unit(rng));
    return se3::boxplus(p, se3::Twist(rho, phi));
  };
  auto noisy = [&](const Trajectory& truth) {
    Trajectory t = truth;
    t.head = perturb(truth.head);
    for (auto& rel : t.rel_poses) rel = perturb(rel);
    return t;
  };
  out.a = noisy(out.a_true);
  out.b = noisy(out.b_true);
  return out;
}

se3::Pose chain_pose(const Trajectory& t, int k) {
  check_index(t, k, "trajectory");
  Chain chain(t.head);
  for (int i = 0; i < k - 1; ++i) chain.append(t.rel_poses[i]);
  return chain.pose();
}

std::vector<se3::Pose> chain_all(const Trajectory& t) {
  return chain_prefix(t.head, t.rel_poses.data(), static_cast<int>(t.rel_poses.size()));
}

AlignmentJacobian alignment_jacobian(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair) {
  check_pair(a, b, pair);
  const AlignmentBlocks blocks = alignment_blocks(a.head, a.rel_poses.data(), b.head, b.rel_poses.data(), pair);
  const Eigen::Index b_offset = 6 * a.num_poses();
  AlignmentJacobian out;
  out.eta = blocks.eta;
  out.A2 = DenseMatrix::Zero(6, 6 * (a.num_poses() + b.num_poses()));
  for (std::size_t i = 0; i < blocks.a.size(); ++i) out.A2.block<6, 6>(0, 6 * i) = blocks.a[i];
  for (std::size_t j = 0; j < blocks.b.size(); ++j) out.A2.block<6, 6>(0, b_offset + 6 * j) = blocks.b[j];
  return out;
}

double predict_alignment_cost(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair) {
  check_pair(a, b, pair);
  const AlignmentBlocks blocks = alignment_blocks(a.head, a.rel_poses.data(), b.head, b.rel_poses.data(), pair);
  // Phase 1 is unconstrained with H = I, so Cov(x1) is the block-diagonal Sigma.
  Matrix6d w = Matrix6d::Zero();
  for (std::size_t i = 0; i < blocks.a.size(); ++i) w += blocks.a[i] * a.edge_covs[i] * blocks.a[i].transpose();
  for (std::size_t j = 0; j < blocks.b.size(); ++j) w += blocks.b[j] * b.edge_covs[j] * blocks.b[j].transpose();
  const DenseVector eta = blocks.eta.vector();
  return quadratic_change(eta, w, w.diagonal().maxCoeff());
}

State stack_state(const Trajectory& a, const Trajectory& b) {
  State x;
  x.reserve(a.num_poses() + b.num_poses());
  x.push_back(a.head);
  x.insert(x.end(), a.rel_poses.begin(), a.rel_poses.end());
  x.push_back(b.head);
  x.insert(x.end(), b.rel_poses.begin(), b.rel_poses.end());
  return x;
}

std::pair<Trajectory, Trajectory> split_state(const State& x, const Trajectory& a_template,
                                              const Trajectory& b_template) {
  const std::size_t na = a_template.num_poses();
  if (x.size() != na + b_template.num_poses()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not match the trajectory templates");
  }
  Trajectory a = a_template;
  Trajectory b = b_template;
  a.head = x[0];
  std::copy(x.begin() + 1, x.begin() + na, a.rel_poses.begin());
  b.head = x[na];
  std::copy(x.begin() + na + 1, x.end(), b.rel_poses.begin());
  return {std::move(a), std::move(b)};
}

nl::BlockDiagonal stacked_covariance(const Trajectory& a, const Trajectory& b) {
  std::vector<DenseMatrix> blocks;
  blocks.reserve(a.edge_covs.size() + b.edge_covs.size());
  for (const auto& c : a.edge_covs) blocks.emplace_back(c);
  for (const auto& c : b.edge_covs) blocks.emplace_back(c);
  return nl::BlockDiagonal(std::move(blocks));
}

nl::Constraint<State> alignment_constraint(int poses_a, int poses_b, const AlignmentPair& pair) {
  if (pair.l < 1 || pair.l > poses_a || pair.r < 1 || pair.r > poses_b) {
    throw Error(ErrorCode::kIndexOutOfRange, "alignment pair outside the trajectories");
  }
  nl::Constraint<State> c;
  c.dim = 6;
  c.name = "align(" + std::to_string(pair.l) + "," + std::to_string(pair.r) + ")";
  const std::size_t na = static_cast<std::size_t>(poses_a);
  const std::size_t total = na + static_cast<std::size_t>(poses_b);
  c.evaluate = [=](const State& x) -> DenseVector {
    if (x.size() != total) throw Error(ErrorCode::kDimensionMismatch, "alignment state has the wrong size");
    const std::vector<Pose> ca = chain_prefix(x[0], x.data() + 1, pair.l - 1);
    const std::vector<Pose> cb = chain_prefix(x[na], x.data() + na + 1, pair.r - 1);
    return se3::log(ca.back() * cb.back().inverse()).vector();
  };
  c.derivative = [=](const State& x) -> DenseMatrix {
    if (x.size() != total) throw Error(ErrorCode::kDimensionMismatch, "alignment state has the wrong size");
    const AlignmentBlocks blocks = alignment_blocks(x[0], x.data() + 1, x[na], x.data() + na + 1, pair);
    // The blocks are A2 = -dC/dxi.
    DenseMatrix d = DenseMatrix::Zero(6, 6 * static_cast<Eigen::Index>(total));
    for (std::size_t i = 0; i < blocks.a.size(); ++i) d.block<6, 6>(0, 6 * i) = -blocks.a[i];
    for (std::size_t j = 0; j < blocks.b.size(); ++j) d.block<6, 6>(0, 6 * (na + j)) = -blocks.b[j];
    return d;
  };
  return c;
}

AlignmentSolution solve_alignment(const Trajectory& a, const Trajectory& b, const AlignmentPair& pair,
                                  nl::SolverOptions options) {
  check_pair(a, b, pair);
  nl::ManifoldProblem<nl::PoseProductSpace> problem;
  problem.x_tilde = stack_state(a, b);
  problem.sigma = stacked_covariance(a, b);
  problem.constraints.push_back(alignment_constraint(a.num_poses(), b.num_poses(), pair));

  options.compute_covariance = false;
  const auto sol = nl::solve_nl(problem, problem.x_tilde, options);
  auto [aligned_a, aligned_b] = split_state(sol.x_star, a, b);
  return AlignmentSolution{sol.f_star, std::move(aligned_a), std::move(aligned_b), sol.report};
}

double relative_error(double predicted, double real) {
  return std::abs(predicted - real) / std::max(real, kRelErrorFloor);
}

}  // namespace deltaf::traj
