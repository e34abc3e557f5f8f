#pragma once

#include <array>

#include <Eigen/Dense>

#include "deltaf/linalg.hpp"

namespace deltaf::se3 {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Tangent vector of SE(3), ordered (rho, phi): translation part first.
struct Twist {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();
  Eigen::Vector3d phi = Eigen::Vector3d::Zero();

  Twist() = default;
  Twist(const Eigen::Vector3d& rho_, const Eigen::Vector3d& phi_) : rho(rho_), phi(phi_) {}
  explicit Twist(const Vector6d& v) : rho(v.head<3>()), phi(v.tail<3>()) {}

  Vector6d vector() const {
    Vector6d v;
    v << rho, phi;
    return v;
  }
};

/// Rigid transform. The checked constructor enforces R^T R = I and det R = +1
/// to 1e-10; products are formed unchecked.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static Pose unchecked(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) {
    Pose p;
    p.rotation_ = rotation;
    p.translation_ = translation;
    return p;
  }
  static Pose identity() { return Pose(); }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Pose inverse() const;
  Pose operator*(const Pose& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const { return rotation_ * point + translation_; }

  /// Rotation replaced by its polar projection onto SO(3).
  Pose orthonormalized() const;
  double orthonormality_error() const;

  Eigen::Matrix4d matrix() const;

  /// Row-major R followed by t.
  std::array<double, 12> to_row() const;
  static Pose from_row(const std::array<double, 12>& row);

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Compositions between polar re-projections in long chains.
inline constexpr int kReorthonormalizeEvery = 100;

Eigen::Matrix3d hat(const Eigen::Vector3d& v);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi);
/// Throws kNearPiRotation when trace(R) <= -1 + 1e-9.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi);
Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& phi);

Pose exp(const Twist& xi);
Twist log(const Pose& pose);

/// Ad(T) = [[R, t^ R], [0, R]] for (rho, phi) ordering.
Matrix6d adjoint(const Pose& pose);

/// J_l with Exp(xi + d) ~= Exp(J_l(xi) d) Exp(xi).
Matrix6d left_jacobian(const Twist& xi);
/// Throws kNearPiRotation when |phi| >= pi - 1e-6.
Matrix6d left_jacobian_inv(const Twist& xi);

/// T [+] xi = T Exp(xi)
Pose boxplus(const Pose& pose, const Twist& xi);
/// T1 [-] T2 = Log(T1^-1 T2), i.e. T2 seen from T1.
Twist boxminus(const Pose& t1, const Pose& t2);

}  // namespace deltaf::se3
