#pragma once

#include "deltaf/least_norm.hpp"

namespace deltaf {

/// min (H x - h)^T Sigma^-1 (H x - h)  s.t.  A1 x = b1,
/// with H invertible, Sigma SPD and A1 of full row rank.
struct LeastDistanceProblem {
  DenseMatrix H;
  DenseMatrix Sigma;
  DenseVector h;
  DenseMatrix A1;
  DenseVector b1;
};

using LDPhaseSolution = PhaseSolution;

/// Affine map back from the least-norm variable: x = map * y + offset,
/// where map = H^-1 Sigma^(1/2) and offset = H^-1 h.
struct NormTransform {
  DenseMatrix map;
  DenseVector offset;

  DenseVector to_x(const Eigen::Ref<const DenseVector>& y) const { return map * y + offset; }
};

struct TransformedProblem {
  LeastNormProblem problem;  // A1 H^-1 Sigma^(1/2) y = b1 - A1 H^-1 h
  NormTransform transform;
};

/// Substitutes y = Sigma^(-1/2) (H x - h). Throws kSingularH, kNotSPD.
TransformedProblem to_least_norm(const LeastDistanceProblem& p);

/// Solves through the least-norm transform. The covariance is the explicit
///   Q - Q A1^T (A1 Q A1^T)^-1 A1 Q,   Q = H^-1 Sigma H^-T.
LDPhaseSolution solve_ld(const LeastDistanceProblem& p);

/// Same closed form as the least-norm case, applied to the least-distance
/// solution and covariance. Exact for linear constraints.
double predict_delta_f_ld(const LDPhaseSolution& sol, const Eigen::Ref<const DenseMatrix>& a2,
                          const Eigen::Ref<const DenseVector>& b2);

/// Q - Q A^T (A Q A^T)^-1 A Q for SPD Q. With zero rows in A this is Q.
DenseMatrix constrained_covariance(const Eigen::Ref<const DenseMatrix>& q, const Eigen::Ref<const DenseMatrix>& a);

}  // namespace deltaf
