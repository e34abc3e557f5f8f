#include "deltaf/least_distance.hpp"

#include <string>

namespace deltaf {

namespace {

void check_problem(const LeastDistanceProblem& p) {
  require_square(p.H, "H");
  require_square(p.Sigma, "Sigma");
  const Eigen::Index n = p.H.rows();
  if (p.Sigma.rows() != n || p.h.size() != n || p.A1.cols() != n || p.A1.rows() != p.b1.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "least-distance problem blocks are not conformal");
  }
  require_finite(p.H, "H");
  require_finite(p.Sigma, "Sigma");
  require_finite(p.h, "h");
  require_finite(p.A1, "A1");
  require_finite(p.b1, "b1");
}

Eigen::PartialPivLU<DenseMatrix> factor_h(const DenseMatrix& h) {
  Eigen::FullPivLU<DenseMatrix> probe(h);
  if (!probe.isInvertible()) {
    throw Error(ErrorCode::kSingularH, "H is singular");
  }
  return Eigen::PartialPivLU<DenseMatrix>(h);
}

}  // namespace

TransformedProblem to_least_norm(const LeastDistanceProblem& p) {
  check_problem(p);
  const auto lu = factor_h(p.H);
  const DenseMatrix sigma_sqrt = symmetric_sqrt(p.Sigma);

  TransformedProblem out;
  out.transform.map = lu.solve(sigma_sqrt);
  out.transform.offset = lu.solve(p.h);
  out.problem.A = p.A1 * out.transform.map;
  out.problem.b = p.b1 - p.A1 * out.transform.offset;
  return out;
}

DenseMatrix constrained_covariance(const Eigen::Ref<const DenseMatrix>& q, const Eigen::Ref<const DenseMatrix>& a) {
  if (a.rows() == 0) return q;
  const DenseMatrix qat = q * a.transpose();
  const Eigen::LLT<DenseMatrix> s = factor_spd(a * qat);
  DenseMatrix cov = q - qat * s.solve(qat.transpose());
  return 0.5 * (cov + cov.transpose());
}

LDPhaseSolution solve_ld(const LeastDistanceProblem& p) {
  const TransformedProblem t = to_least_norm(p);
  const PhaseSolution y = solve_least_norm(t.problem);

  LDPhaseSolution s;
  s.x_star = t.transform.to_x(y.x_star);
  s.f_star = y.f_star;
  // Q = H^-1 Sigma H^-T = map * map^T
  const DenseMatrix q = t.transform.map * t.transform.map.transpose();
  s.cov = constrained_covariance(0.5 * (q + q.transpose()), p.A1);
  return s;
}

double predict_delta_f_ld(const LDPhaseSolution& sol, const Eigen::Ref<const DenseMatrix>& a2,
                          const Eigen::Ref<const DenseVector>& b2) {
  return delta_f_from_covariance(sol.x_star, sol.cov, a2, b2);
}

}  // namespace deltaf
