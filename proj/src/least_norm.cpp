#include "deltaf/least_norm.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace deltaf {

namespace {

constexpr double kSingularRelTol = 1e-12;

void check_problem(const DenseMatrix& a, const DenseVector& b) {
  require_finite(a, "A");
  require_finite(b, "b");
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "A has " + std::to_string(a.rows()) + " rows but b has " + std::to_string(b.size()) + " entries");
  }
  if (a.rows() > a.cols()) {
    throw Error(ErrorCode::kRankDeficient, "more constraints than unknowns");
  }
  if (numerical_rank(a) < a.rows()) {
    throw Error(ErrorCode::kRankDeficient, "constraint matrix does not have full row rank");
  }
}

}  // namespace

PhaseSolution solve_least_norm(const LeastNormProblem& p) {
  check_problem(p.A, p.b);
  const Eigen::Index n = p.A.cols();
  PhaseSolution s;
  if (p.A.rows() == 0) {
    s.x_star = DenseVector::Zero(n);
    s.cov = DenseMatrix::Identity(n, n);
    s.f_star = 0.0;
    return s;
  }
  const Eigen::LLT<DenseMatrix> gram = factor_spd(p.A * p.A.transpose());
  const DenseVector y = gram.solve(p.b);
  s.x_star = p.A.transpose() * y;
  // The projector is the deliverable here, so it is formed explicitly.
  s.cov = DenseMatrix::Identity(n, n) - p.A.transpose() * gram.solve(p.A);
  s.cov = 0.5 * (s.cov + s.cov.transpose());
  s.f_star = std::max(0.0, p.b.dot(y));
  return s;
}

double quadratic_change(const Eigen::Ref<const DenseVector>& residual, const Eigen::Ref<const DenseMatrix>& w,
                        double reference_scale) {
  if (w.rows() != residual.size() || w.cols() != residual.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "innovation and its covariance disagree in size");
  }
  if (residual.size() == 0) return 0.0;
  const DenseMatrix sym = 0.5 * (w + w.transpose());
  Eigen::LLT<DenseMatrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularW, "A2 Cov A2^T is not positive definite");
  }
  const double floor = kSingularRelTol * std::max(reference_scale, std::numeric_limits<double>::min());
  const auto diag = llt.matrixLLT().diagonal();
  if ((diag.array().square() <= floor).any()) {
    throw Error(ErrorCode::kSingularW, "A2 Cov A2^T is numerically singular: new constraints depend on old ones");
  }
  const DenseVector z = llt.matrixL().solve(residual);
  return z.squaredNorm();
}

double delta_f_from_covariance(const Eigen::Ref<const DenseVector>& x, const Eigen::Ref<const DenseMatrix>& cov,
                               const Eigen::Ref<const DenseMatrix>& a2, const Eigen::Ref<const DenseVector>& b2) {
  require_finite(a2, "A2");
  require_finite(b2, "b2");
  if (a2.cols() != x.size() || a2.rows() != b2.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "A2/b2 do not match the phase-1 solution");
  }
  if (a2.rows() == 0) return 0.0;
  const DenseVector residual = a2 * x - b2;
  const DenseMatrix w = a2 * cov * a2.transpose();
  const double scale = a2.rowwise().squaredNorm().maxCoeff() * std::max(cov.diagonal().maxCoeff(), 0.0);
  return quadratic_change(residual, w, scale);
}

double predict_delta_f(const PhaseSolution& phase1, const Eigen::Ref<const DenseMatrix>& a2,
                       const Eigen::Ref<const DenseVector>& b2) {
  if (a2.rows() > 0 && numerical_rank(a2) < a2.rows()) {
    throw Error(ErrorCode::kRankDeficient, "A2 does not have full row rank");
  }
  return delta_f_from_covariance(phase1.x_star, phase1.cov, a2, b2);
}

PhaseSolution solve_stacked(const LeastNormProblem& p1, const Eigen::Ref<const DenseMatrix>& a2,
                            const Eigen::Ref<const DenseVector>& b2) {
  if (a2.cols() != p1.A.cols() || a2.rows() != b2.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "A2/b2 do not match the phase-1 problem");
  }
  LeastNormProblem stacked;
  stacked.A.resize(p1.A.rows() + a2.rows(), p1.A.cols());
  stacked.A.topRows(p1.A.rows()) = p1.A;
  stacked.A.bottomRows(a2.rows()) = a2;
  stacked.b.resize(p1.b.size() + b2.size());
  stacked.b.head(p1.b.size()) = p1.b;
  stacked.b.tail(b2.size()) = b2;
  return solve_least_norm(stacked);
}

}  // namespace deltaf
