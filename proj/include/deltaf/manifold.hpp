#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "deltaf/least_distance.hpp"
#include "deltaf/se3.hpp"

namespace deltaf::nl {

/// Square blocks along the diagonal; everything else zero.
class BlockDiagonal {
 public:
  BlockDiagonal() = default;
  explicit BlockDiagonal(std::vector<DenseMatrix> blocks);

  static BlockDiagonal identity(const std::vector<Eigen::Index>& sizes);

  const std::vector<DenseMatrix>& blocks() const { return blocks_; }
  const std::vector<Eigen::Index>& offsets() const { return offsets_; }
  std::vector<Eigen::Index> sizes() const;
  Eigen::Index dim() const { return dim_; }

  DenseMatrix dense() const;
  DenseVector operator*(const Eigen::Ref<const DenseVector>& v) const;
  /// this * rhs
  DenseMatrix multiply(const Eigen::Ref<const DenseMatrix>& rhs) const;
  /// Blockwise product; partitions must agree.
  BlockDiagonal operator*(const BlockDiagonal& other) const;
  BlockDiagonal transpose() const;
  /// Blockwise inverse via LU; throws kSingularH on a singular block.
  BlockDiagonal inverse() const;

 private:
  std::vector<DenseMatrix> blocks_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dim_ = 0;
};

/// A product manifold with a retraction (the boxplus) and a local difference
/// a [-] b. `local_jacobian(a, b)` is H = -d((a [+] xi) [-] b)/dxi at xi = 0,
/// partitioned like the weight matrix.
template <class S>
concept TangentSpace = requires(const S& space, const typename S::Point& p, const DenseVector& v) {
  { space.dim(p) } -> std::convertible_to<Eigen::Index>;
  { space.retract(p, v) } -> std::same_as<typename S::Point>;
  { space.local(p, p) } -> std::same_as<DenseVector>;
  { space.local_jacobian(p, p) } -> std::same_as<BlockDiagonal>;
};

/// R^n with a [+] xi = a + xi and a [-] b = b - a, so H = I.
struct EuclideanSpace {
  using Point = DenseVector;

  /// Partition of H; empty means a single block.
  std::vector<Eigen::Index> block_sizes;

  Eigen::Index dim(const Point& p) const { return p.size(); }
  Point retract(const Point& p, const DenseVector& xi) const { return p + xi; }
  DenseVector local(const Point& a, const Point& b) const { return b - a; }
  BlockDiagonal local_jacobian(const Point& a, const Point& b) const;
};

/// SE(3)^k with T [+] xi = T Exp(xi) and T1 [-] T2 = Log(T1^-1 T2) per factor.
struct PoseProductSpace {
  using Point = std::vector<se3::Pose>;

  Eigen::Index dim(const Point& p) const { return 6 * static_cast<Eigen::Index>(p.size()); }
  Point retract(const Point& p, const DenseVector& xi) const;
  DenseVector local(const Point& a, const Point& b) const;
  /// Blocks J_l(Log(a_i^-1 b_i))^-1.
  BlockDiagonal local_jacobian(const Point& a, const Point& b) const;
};

static_assert(TangentSpace<EuclideanSpace>);
static_assert(TangentSpace<PoseProductSpace>);

/// Equality constraint C(x) = 0. `derivative` returns dC(x [+] xi)/dxi at
/// xi = 0; leave it empty to fall back to central differences.
template <class Point>
struct Constraint {
  Eigen::Index dim = 0;
  std::function<DenseVector(const Point&)> evaluate;
  std::function<DenseMatrix(const Point&)> derivative;
  std::string name;
};

template <TangentSpace Space>
struct ManifoldProblem {
  Space space;
  typename Space::Point x_tilde;
  BlockDiagonal sigma;
  std::vector<Constraint<typename Space::Point>> constraints;
};

struct SolverReport {
  int iterations = 0;
  double kkt_residual = 0.0;
  double constraint_residual = 0.0;
  bool converged = false;
};

template <class Point>
struct NLPhaseSolution {
  Point x_star;
  DenseMatrix cov;  // tangent space of x_star; empty if not requested
  double f_star = 0.0;
  SolverReport report;
};

struct SolverOptions {
  int max_iterations = 100;
  double kkt_tolerance = 1e-10;
  /// Also accept once the merit stops decreasing at rounding level and the
  /// residual is below this.
  double stall_tolerance = 1e-8;
  int max_halvings = 30;
  bool compute_covariance = true;
  double fd_step = 1e-6;
};

template <class Point>
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, NLPhaseSolution<Point> best)
      : Error(ErrorCode::kNoConvergence, what), best_(std::move(best)) {}

  const NLPhaseSolution<Point>& best() const { return best_; }

 private:
  NLPhaseSolution<Point> best_;
};

struct LinearizedConstraint {
  DenseMatrix A;  // -dC(x [+] xi)/dxi
  DenseVector b;  // C(x)
};

/// Central differences of C along each tangent direction.
template <TangentSpace Space>
DenseMatrix numeric_derivative(const Space& space, const Constraint<typename Space::Point>& c,
                               const typename Space::Point& x, double step = 1e-6) {
  const Eigen::Index n = space.dim(x);
  DenseMatrix d(c.dim, n);
  DenseVector e = DenseVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    e(k) = step;
    const DenseVector plus = c.evaluate(space.retract(x, e));
    e(k) = -step;
    const DenseVector minus = c.evaluate(space.retract(x, e));
    e(k) = 0.0;
    d.col(k) = (plus - minus) / (2.0 * step);
  }
  return d;
}

template <TangentSpace Space>
LinearizedConstraint linearize_constraint(const Space& space, const Constraint<typename Space::Point>& c,
                                          const typename Space::Point& x, double fd_step = 1e-6) {
  if (!c.evaluate) {
    throw Error(ErrorCode::kEvaluationFailure, "constraint '" + c.name + "' has no evaluator");
  }
  LinearizedConstraint lin;
  lin.b = c.evaluate(x);
  if (lin.b.size() != c.dim || !lin.b.allFinite()) {
    throw Error(ErrorCode::kEvaluationFailure, "constraint '" + c.name + "' returned an invalid residual");
  }
  lin.A = c.derivative ? DenseMatrix(-c.derivative(x)) : DenseMatrix(-numeric_derivative(space, c, x, fd_step));
  if (lin.A.rows() != c.dim || lin.A.cols() != space.dim(x) || !lin.A.allFinite()) {
    throw Error(ErrorCode::kEvaluationFailure, "constraint '" + c.name + "' returned an invalid Jacobian");
  }
  return lin;
}

/// df = C2(x1)^T [A2 Cov(x1) A2^T]^-1 C2(x1), linearized at the phase-1 optimum.
template <TangentSpace Space>
double predict_delta_f_nl(const Space& space, const NLPhaseSolution<typename Space::Point>& sol,
                          const Constraint<typename Space::Point>& c2) {
  const LinearizedConstraint lin = linearize_constraint(space, c2, sol.x_star);
  if (sol.cov.rows() != lin.A.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "phase-1 covariance is missing or has the wrong size");
  }
  if (lin.b.size() == 0) return 0.0;
  const DenseMatrix w = lin.A * sol.cov * lin.A.transpose();
  const double scale = lin.A.rowwise().squaredNorm().maxCoeff() * std::max(sol.cov.diagonal().maxCoeff(), 0.0);
  return quadratic_change(lin.b, w, scale);
}

namespace detail {

struct Weight {
  std::vector<Eigen::LLT<DenseMatrix>> factors;
  std::vector<Eigen::Index> offsets;
};

Weight factor_weight(const BlockDiagonal& sigma);

/// r^T Sigma^-1 r
double weighted_norm(const Weight& w, const Eigen::Ref<const DenseVector>& r);

struct Step {
  DenseVector xi;
  DenseVector multipliers;
  DenseMatrix q;       // dense H^-1 Sigma H^-T, filled only on request
  DenseMatrix q_at;    // H^-1 Sigma H^-T A^T
  Eigen::LLT<DenseMatrix> s;  // A Q A^T
};

/// Exact solution of min (H xi - h)^T Sigma^-1 (H xi - h) s.t. A xi = b by
/// eliminating xi from its KKT system onto the multipliers.
Step solve_linearized(const BlockDiagonal& h_mat, const BlockDiagonal& sigma, const DenseVector& h,
                      const DenseMatrix& a, const DenseVector& b, bool want_q);

}  // namespace detail

/// Sequential linearization: solve the linear least-distance subproblem at the
/// current iterate, retract, and backtrack by halving on the L1 merit
/// f + mu |C|_1.
///
/// The KKT residual is max(|C|_inf, |Sigma^-1/2 H xi| / max(1, |Sigma^-1/2 r|)):
/// with the subproblem multipliers the Lagrangian gradient is 2 H^T Sigma^-1 H xi,
/// measured relative to grad f. Converged below `kkt_tolerance`, or below
/// `stall_tolerance` once the merit no longer decreases. Throws NoConvergence
/// with the final iterate otherwise.
template <TangentSpace Space>
NLPhaseSolution<typename Space::Point> solve_nl(const ManifoldProblem<Space>& p, const typename Space::Point& init,
                                                const SolverOptions& opt = {}) {
  using Point = typename Space::Point;
  const Space& space = p.space;
  const Eigen::Index n = space.dim(init);
  if (space.dim(p.x_tilde) != n || p.sigma.dim() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "state, measurement and weight dimensions disagree");
  }
  const detail::Weight weight = detail::factor_weight(p.sigma);

  Eigen::Index m = 0;
  for (const auto& c : p.constraints) m += c.dim;

  auto constraint_values = [&](const Point& x) {
    DenseVector out(m);
    Eigen::Index row = 0;
    for (const auto& c : p.constraints) {
      const DenseVector v = c.evaluate(x);
      if (v.size() != c.dim || !v.allFinite()) {
        throw Error(ErrorCode::kEvaluationFailure, "constraint '" + c.name + "' returned an invalid residual");
      }
      out.segment(row, c.dim) = v;
      row += c.dim;
    }
    return out;
  };
  auto cost = [&](const Point& x) { return detail::weighted_norm(weight, space.local(x, p.x_tilde)); };

  NLPhaseSolution<Point> sol;
  sol.x_star = init;
  double penalty = 0.0;
  bool stalled = false;

  for (int it = 0;; ++it) {
    const Point& x = sol.x_star;
    const DenseVector r = space.local(x, p.x_tilde);
    const BlockDiagonal h_mat = space.local_jacobian(x, p.x_tilde);

    DenseMatrix a(m, n);
    DenseVector b(m);
    Eigen::Index row = 0;
    for (const auto& c : p.constraints) {
      const LinearizedConstraint lin = linearize_constraint(space, c, x, opt.fd_step);
      a.middleRows(row, c.dim) = lin.A;
      b.segment(row, c.dim) = lin.b;
      row += c.dim;
    }

    const bool last_chance = it >= opt.max_iterations;
    detail::Step step = detail::solve_linearized(h_mat, p.sigma, r, a, b, opt.compute_covariance);
    const double c_norm = m ? b.cwiseAbs().maxCoeff() : 0.0;
    sol.f_star = detail::weighted_norm(weight, r);
    const double stationarity =
        std::sqrt(detail::weighted_norm(weight, h_mat * step.xi)) / std::max(1.0, std::sqrt(sol.f_star));
    sol.report.iterations = it;
    sol.report.kkt_residual = std::max(stationarity, c_norm);
    sol.report.constraint_residual = c_norm;

    const bool done = sol.report.kkt_residual < opt.kkt_tolerance ||
                      (stalled && sol.report.kkt_residual < opt.stall_tolerance);
    if (done || last_chance) {
      if (opt.compute_covariance) {
        sol.cov = step.q;
        if (m > 0) sol.cov -= step.q_at * step.s.solve(step.q_at.transpose());
        sol.cov = 0.5 * (sol.cov + sol.cov.transpose()).eval();
      }
      if (done) {
        sol.report.converged = true;
        return sol;
      }
      throw NoConvergence<Point>("solver stopped after " + std::to_string(opt.max_iterations) +
                                     " iterations with KKT residual " + std::to_string(sol.report.kkt_residual),
                                 sol);
    }

    // L1 merit: the penalty must dominate the multipliers for xi to be a descent direction.
    if (m > 0) penalty = std::max(penalty, 1.5 * step.multipliers.cwiseAbs().maxCoeff() + 1e-8);
    const double c_l1 = m ? b.cwiseAbs().sum() : 0.0;
    const double merit0 = sol.f_star + penalty * c_l1;
    // Directional derivative of the merit along xi: grad f = -2 H^T Sigma^-1 r.
    DenseVector weighted_r(n);
    for (std::size_t k = 0; k < weight.factors.size(); ++k) {
      const Eigen::Index off = weight.offsets[k];
      const Eigen::Index sz = weight.factors[k].rows();
      weighted_r.segment(off, sz) = weight.factors[k].solve(r.segment(off, sz));
    }
    const double slope = -2.0 * (h_mat * step.xi).dot(weighted_r) - penalty * c_l1;

    double t = 1.0;
    bool accepted = false;
    Point trial = space.retract(x, step.xi);
    auto sufficient = [&](const Point& y, double scale, const DenseVector& cv) {
      const double merit = cost(y) + penalty * (m ? cv.cwiseAbs().sum() : 0.0);
      if (merit > merit0 + 1e-4 * scale * std::min(slope, 0.0)) return false;
      stalled = merit0 - merit <= 4.0 * std::numeric_limits<double>::epsilon() * merit0;
      return true;
    };
    for (int k = 0; k < opt.max_halvings; ++k) {
      const DenseVector cv = constraint_values(trial);
      if (sufficient(trial, t, cv)) {
        accepted = true;
        break;
      }
      if (k == 0 && m > 0) {
        // Second-order correction: pull the rejected full step back onto the
        // constraints with the same factorization before shortening it.
        Point corrected = space.retract(x, (step.xi + step.q_at * step.s.solve(cv)).eval());
        if (sufficient(corrected, 1.0, constraint_values(corrected))) {
          trial = std::move(corrected);
          accepted = true;
          break;
        }
      }
      t *= 0.5;
      trial = space.retract(x, (t * step.xi).eval());
    }
    // No decrease at any step length means the merit is flat to rounding; take the full step.
    if (!accepted) stalled = true;
    sol.x_star = accepted ? std::move(trial) : space.retract(x, step.xi);
  }
}

/// Phase-I style solution for a flat problem, used to cross-check the
/// nonlinear path against the closed-form linear one.
LDPhaseSolution to_ld_solution(const NLPhaseSolution<DenseVector>& sol);

}  // namespace deltaf::nl
