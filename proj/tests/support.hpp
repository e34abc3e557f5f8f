#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "deltaf/least_distance.hpp"
#include "deltaf/se3.hpp"

namespace deltaf::test {

using Rng = std::mt19937_64;

inline DenseMatrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline DenseVector gaussian_vector(Rng& rng, Eigen::Index n) { return gaussian(rng, n, 1); }

inline DenseMatrix random_spd(Rng& rng, Eigen::Index n) {
  const DenseMatrix g = gaussian(rng, n, n);
  return g * g.transpose() + static_cast<double>(n) * DenseMatrix::Identity(n, n);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Relative difference; values below 1e-12 in magnitude compare absolutely.
inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); }

inline double max_abs(const Eigen::Ref<const DenseMatrix>& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Uniform direction, angle uniform in [0, max_angle].
inline Eigen::Vector3d random_rotation_vector(Rng& rng, double max_angle) {
  Eigen::Vector3d axis = gaussian_vector(rng, 3);
  axis.normalize();
  return std::uniform_real_distribution<double>(0.0, max_angle)(rng) * axis;
}

inline se3::Twist random_twist(Rng& rng, double max_angle, double trans_scale = 2.0) {
  return se3::Twist(trans_scale * Eigen::Vector3d(gaussian_vector(rng, 3)), random_rotation_vector(rng, max_angle));
}

inline se3::Pose random_pose(Rng& rng, double max_angle = 3.0, double trans_scale = 5.0) {
  return se3::Pose(se3::so3_exp(random_rotation_vector(rng, max_angle)),
                   trans_scale * Eigen::Vector3d(gaussian_vector(rng, 3)));
}

/// min (H x - h)^T Sigma^-1 (H x - h) s.t. A x = b from the first-order
/// conditions [2 H^T S^-1 H, A^T; A, 0] [x; mu] = [2 H^T S^-1 h; b], with no
/// change of variables.
struct KktSolution {
  DenseVector x;
  double f = 0.0;
};

inline KktSolution kkt_solve(const DenseMatrix& h_mat, const DenseMatrix& sigma, const DenseVector& h,
                             const DenseMatrix& a, const DenseVector& b) {
  const Eigen::Index n = h_mat.cols();
  const Eigen::Index m = a.rows();
  const DenseMatrix s_inv = sigma.inverse();
  DenseMatrix k = DenseMatrix::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = 2.0 * h_mat.transpose() * s_inv * h_mat;
  k.topRightCorner(n, m) = a.transpose();
  k.bottomLeftCorner(m, n) = a;
  DenseVector rhs(n + m);
  rhs.head(n) = 2.0 * h_mat.transpose() * s_inv * h;
  rhs.tail(m) = b;
  const DenseVector z = k.fullPivLu().solve(rhs);
  KktSolution out;
  out.x = z.head(n);
  const DenseVector r = h_mat * out.x - h;
  out.f = r.dot(s_inv * r);
  return out;
}

inline DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
  DenseMatrix out(top.rows() + bottom.rows(), std::max(top.cols(), bottom.cols()));
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

inline DenseVector vstack(const DenseVector& top, const DenseVector& bottom) {
  DenseVector out(top.size() + bottom.size());
  out.head(top.size()) = top;
  out.tail(bottom.size()) = bottom;
  return out;
}

/// A random least-distance problem with well-conditioned H and Sigma.
inline LeastDistanceProblem random_ld_problem(Rng& rng, Eigen::Index n, Eigen::Index m1) {
  LeastDistanceProblem p;
  p.H = gaussian(rng, n, n) + 2.0 * std::sqrt(static_cast<double>(n)) * DenseMatrix::Identity(n, n);
  p.Sigma = random_spd(rng, n);
  p.h = gaussian_vector(rng, n);
  p.A1 = gaussian(rng, m1, n);
  p.b1 = gaussian_vector(rng, m1);
  return p;
}

}  // namespace deltaf::test
