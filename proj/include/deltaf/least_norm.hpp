#pragma once

#include "deltaf/linalg.hpp"

namespace deltaf {

/// min x^T x  s.t.  A x = b, with A of full row rank (m <= n).
struct LeastNormProblem {
  DenseMatrix A;
  DenseVector b;
};

/// Optimal point, covariance and optimal value of one phase of an
/// incrementally constrained problem.
struct PhaseSolution {
  DenseVector x_star;
  DenseMatrix cov;
  double f_star = 0.0;
};

/// x* = A^T (A A^T)^-1 b,  Cov = I - A^T (A A^T)^-1 A,  f* = b^T (A A^T)^-1 b.
/// Throws kRankDeficient if A does not have full row rank.
PhaseSolution solve_least_norm(const LeastNormProblem& p);

/// Increase of the optimal value when A2 x = b2 is appended to the problem
/// that produced `phase1`:
///
///   df = (A2 x1 - b2)^T [A2 Cov(x1) A2^T]^-1 (A2 x1 - b2)
///
/// The stacked optimum is phase1.f_star + df. Throws kSingularW when
/// A2 Cov A2^T is not numerically positive definite.
double predict_delta_f(const PhaseSolution& phase1, const Eigen::Ref<const DenseMatrix>& a2,
                       const Eigen::Ref<const DenseVector>& b2);

/// Reference solve of the stacked problem [A1; A2] x = [b1; b2].
PhaseSolution solve_stacked(const LeastNormProblem& p1, const Eigen::Ref<const DenseMatrix>& a2,
                            const Eigen::Ref<const DenseVector>& b2);

/// r^T W^-1 r for the innovation r and its covariance W. `reference_scale`
/// is the magnitude W would have without projection; pivots below
/// 1e-12 * reference_scale count as singular.
double quadratic_change(const Eigen::Ref<const DenseVector>& residual, const Eigen::Ref<const DenseMatrix>& w,
                        double reference_scale);

/// Shared by every Δf variant: residual = A2 x - b2, W = A2 cov A2^T.
double delta_f_from_covariance(const Eigen::Ref<const DenseVector>& x, const Eigen::Ref<const DenseMatrix>& cov,
                               const Eigen::Ref<const DenseMatrix>& a2, const Eigen::Ref<const DenseVector>& b2);

}  // namespace deltaf
