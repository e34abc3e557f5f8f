#include "deltaf/se3.hpp"

#include <cmath>
#include <numbers>

namespace deltaf::se3 {

namespace {

// Rodrigues coefficients switch to their 4th-order series below this angle.
constexpr double kSmallAngle = 1e-8;
// The SE(3) coupling coefficients cancel catastrophically far earlier.
constexpr double kCouplingSeriesAngle = 0.1;
constexpr double kLogTraceMargin = 1e-9;
constexpr double kJacobianPiMargin = 1e-6;

// sin(t)/t
double sinc(double t) {
  if (t < kSmallAngle) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

// (1 - cos t)/t^2
double cos_coeff(double t) {
  if (t < kSmallAngle) {
    const double t2 = t * t;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  const double s = std::sin(0.5 * t);
  return 2.0 * s * s / (t * t);
}

// (t - sin t)/t^3
double sin_coeff(double t) {
  if (t < kCouplingSeriesAngle) {
    const double t2 = t * t;
    return 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0;
  }
  return (t - std::sin(t)) / (t * t * t);
}

// (t^2 + 2 cos t - 2)/(2 t^4)
double quartic_coeff(double t) {
  if (t < kCouplingSeriesAngle) {
    const double t2 = t * t;
    return 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0 - t2 * t2 * t2 / 3628800.0;
  }
  const double t2 = t * t;
  return (t2 + 2.0 * std::cos(t) - 2.0) / (2.0 * t2 * t2);
}

// (2t - 3 sin t + t cos t)/(2 t^5)
double quintic_coeff(double t) {
  if (t < kCouplingSeriesAngle) {
    const double t2 = t * t;
    return 1.0 / 120.0 - t2 / 2520.0 + t2 * t2 / 120960.0 - t2 * t2 * t2 / 9979200.0;
  }
  const double t2 = t * t;
  return (2.0 * t - 3.0 * std::sin(t) + t * std::cos(t)) / (2.0 * t2 * t2 * t);
}

// 1/t^2 - (1 + cos t)/(2 t sin t)
double inv_jacobian_coeff(double t) {
  if (t < 1e-4) {
    const double t2 = t * t;
    return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  }
  return 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
}

Eigen::Vector3d vee(const Eigen::Matrix3d& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

// Coupling block Q(rho, phi) of the SE(3) left Jacobian.
Eigen::Matrix3d coupling(const Eigen::Vector3d& rho, const Eigen::Vector3d& phi) {
  const double t = phi.norm();
  const Eigen::Matrix3d rx = hat(rho);
  const Eigen::Matrix3d px = hat(phi);
  const Eigen::Matrix3d pr = px * rx;
  const Eigen::Matrix3d rp = rx * px;
  const Eigen::Matrix3d prp = pr * px;
  return 0.5 * rx + sin_coeff(t) * (pr + rp + prp) + quartic_coeff(t) * (px * pr + rp * px - 3.0 * prp) +
         quintic_coeff(t) * (prp * px + px * prp);
}

}  // namespace

Pose::Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "pose contains NaN or Inf");
  }
  if (orthonormality_error() > 1e-10 || std::abs(rotation.determinant() - 1.0) > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "rotation is not orthonormal with det +1");
  }
}

Pose Pose::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return unchecked(rt, -(rt * translation_));
}

Pose Pose::operator*(const Pose& other) const {
  return unchecked(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
}

Pose Pose::orthonormalized() const { return unchecked(nearest_rotation(rotation_), translation_); }

double Pose::orthonormality_error() const {
  return (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

std::array<double, 12> Pose::to_row() const {
  std::array<double, 12> row{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) row[3 * i + j] = rotation_(i, j);
  for (int i = 0; i < 3; ++i) row[9 + i] = translation_(i);
  return row;
}

Pose Pose::from_row(const std::array<double, 12>& row) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = row[3 * i + j];
  return Pose(r, Eigen::Vector3d(row[9], row[10], row[11]));
}

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi) {
  const double t = phi.norm();
  const Eigen::Matrix3d k = hat(phi);
  return Eigen::Matrix3d::Identity() + sinc(t) * k + cos_coeff(t) * k * k;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  const double tr = rotation.trace();
  if (tr <= -1.0 + kLogTraceMargin) {
    throw Error(ErrorCode::kNearPiRotation, "rotation angle too close to pi for a unique logarithm");
  }
  const Eigen::Vector3d w = vee(rotation - rotation.transpose());  // 2 sin(t) axis
  const double t = std::atan2(0.5 * w.norm(), 0.5 * (tr - 1.0));
  if (t < kSmallAngle) {
    const double t2 = t * t;
    return (0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0) * w;
  }
  return t / (2.0 * std::sin(t)) * w;
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi) {
  const double t = phi.norm();
  const Eigen::Matrix3d k = hat(phi);
  return Eigen::Matrix3d::Identity() + cos_coeff(t) * k + sin_coeff(t) * k * k;
}

Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& phi) {
  const double t = phi.norm();
  if (t >= std::numbers::pi - kJacobianPiMargin) {
    throw Error(ErrorCode::kNearPiRotation, "left Jacobian is singular at rotation angle pi");
  }
  const Eigen::Matrix3d k = hat(phi);
  return Eigen::Matrix3d::Identity() - 0.5 * k + inv_jacobian_coeff(t) * k * k;
}

Pose exp(const Twist& xi) {
  return Pose::unchecked(so3_exp(xi.phi), so3_left_jacobian(xi.phi) * xi.rho);
}

Twist log(const Pose& pose) {
  const Eigen::Vector3d phi = so3_log(pose.rotation());
  return Twist(so3_left_jacobian_inv(phi) * pose.translation(), phi);
}

Matrix6d adjoint(const Pose& pose) {
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = pose.rotation();
  ad.topRightCorner<3, 3>() = hat(pose.translation()) * pose.rotation();
  ad.bottomRightCorner<3, 3>() = pose.rotation();
  return ad;
}

Matrix6d left_jacobian(const Twist& xi) {
  const Eigen::Matrix3d j = so3_left_jacobian(xi.phi);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = j;
  out.topRightCorner<3, 3>() = coupling(xi.rho, xi.phi);
  out.bottomRightCorner<3, 3>() = j;
  return out;
}

Matrix6d left_jacobian_inv(const Twist& xi) {
  const Eigen::Matrix3d j_inv = so3_left_jacobian_inv(xi.phi);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = j_inv;
  out.topRightCorner<3, 3>() = -j_inv * coupling(xi.rho, xi.phi) * j_inv;
  out.bottomRightCorner<3, 3>() = j_inv;
  return out;
}

Pose boxplus(const Pose& pose, const Twist& xi) { return pose * exp(xi); }

Twist boxminus(const Pose& t1, const Pose& t2) { return log(t1.inverse() * t2); }

}  // namespace deltaf::se3
