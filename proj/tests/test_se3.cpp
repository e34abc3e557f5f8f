#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "deltaf/se3.hpp"
#include "deltaf/trajectory.hpp"
#include "support.hpp"

using namespace deltaf;
using namespace deltaf::se3;

namespace {

double pose_diff(const Pose& a, const Pose& b) {
  return std::max(test::max_abs(a.rotation() - b.rotation()), test::max_abs(a.translation() - b.translation()));
}

Twist unit_twist(int k, double step) {
  Vector6d v = Vector6d::Zero();
  v(k) = step;
  return Twist(v);
}

// Central differences of Log(Exp(xi + d) Exp(xi)^-1) in d; should equal J_l(xi).
Matrix6d numeric_left_jacobian(const Twist& xi, double step) {
  Matrix6d out;
  const Pose base_inv = exp(xi).inverse();
  for (int k = 0; k < 6; ++k) {
    const Vector6d plus = log(exp(Twist(xi.vector() + unit_twist(k, step).vector())) * base_inv).vector();
    const Vector6d minus = log(exp(Twist(xi.vector() - unit_twist(k, step).vector())) * base_inv).vector();
    out.col(k) = (plus - minus) / (2.0 * step);
  }
  return out;
}

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& phi) {
  const double t = phi.norm();
  const Eigen::Matrix3d k = hat(phi);
  return Eigen::Matrix3d::Identity() + std::sin(t) / t * k + (1.0 - std::cos(t)) / (t * t) * k * k;
}

}  // namespace

TEST_CASE("exp examples", "[se3]") {
  CHECK(pose_diff(exp(Twist()), Pose::identity()) == 0.0);

  const Pose t = exp(Twist(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero()));
  CHECK(t.rotation().isIdentity());
  CHECK(t.translation().isApprox(Eigen::Vector3d(1, 0, 0)));

  const Pose rz = exp(Twist(Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, std::numbers::pi / 2)));
  Eigen::Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(test::max_abs(rz.rotation() - expected) < 1e-15);
  CHECK(test::max_abs(rz.rotation() - rodrigues(Eigen::Vector3d(0, 0, std::numbers::pi / 2))) < 1e-15);
  CHECK(rz.translation().isZero());
}

TEST_CASE("log examples and failure at pi", "[se3]") {
  CHECK(log(Pose::identity()).vector().isZero());

  const Pose flip(Eigen::Vector3d(-1, -1, 1).asDiagonal().toDenseMatrix(), Eigen::Vector3d::Zero());
  try {
    log(flip);
    FAIL("log at pi accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNearPiRotation);
  }
  try {
    left_jacobian_inv(Twist(Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, std::numbers::pi)));
    FAIL("J_l^-1 at pi accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNearPiRotation);
  }
}

TEST_CASE("pose construction checks", "[se3]") {
  CHECK_THROWS_AS(Pose(2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()), Error);
  CHECK_THROWS_AS(Pose(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix(), Eigen::Vector3d::Zero()), Error);

  test::Rng rng(4);
  const Pose p = test::random_pose(rng);
  const Pose back = Pose::from_row(p.to_row());
  CHECK(pose_diff(p, back) == 0.0);
  CHECK(p.to_row()[1] == p.rotation()(0, 1));
  CHECK(p.to_row()[10] == p.translation()(1));
  CHECK(test::max_abs((p * p.inverse()).matrix() - Eigen::Matrix4d::Identity()) < 1e-14);
  CHECK((p.matrix() * p.inverse().matrix()).isIdentity(1e-13));
}

TEST_CASE("exp and log round trip", "[se3][property]") {
  test::Rng rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const Twist xi = test::random_twist(rng, 3.0);
    const Twist back = log(exp(xi));
    REQUIRE(test::max_abs(back.vector() - xi.vector()) < 1e-9);

    const Pose t = test::random_pose(rng, 3.0);
    REQUIRE(pose_diff(exp(log(t)), t) < 1e-9);
  }
}

TEST_CASE("small-angle branches agree with the closed forms", "[se3]") {
  test::Rng rng(6);
  for (double angle : {1e-10, 1e-9, 5e-9}) {
    const Eigen::Vector3d phi = angle * Eigen::Vector3d(test::gaussian_vector(rng, 3)).normalized();
    CHECK(test::max_abs(so3_exp(phi) - rodrigues(phi)) < 1e-12);
    const Eigen::Vector3d rho = test::gaussian_vector(rng, 3);
    const Twist back = log(exp(Twist(rho, phi)));
    CHECK(test::max_abs(back.phi - phi) < 1e-12 * std::max(1.0, angle));
    CHECK(test::max_abs(back.rho - rho) < 1e-12);
  }
}

TEST_CASE("series switch points are continuous", "[se3]") {
  test::Rng rng(21);
  const Eigen::Vector3d dir = Eigen::Vector3d(test::gaussian_vector(rng, 3)).normalized();
  const Eigen::Vector3d rho = test::gaussian_vector(rng, 3);
  for (double at : {1e-8, 1e-4, 0.1}) {
    const Twist lo(rho, at * (1.0 - 1e-13) * dir);
    const Twist hi(rho, at * (1.0 + 1e-13) * dir);
    CHECK(test::max_abs(left_jacobian(lo) - left_jacobian(hi)) < 1e-12);
    CHECK(test::max_abs(left_jacobian_inv(lo) - left_jacobian_inv(hi)) < 1e-12);
    CHECK(pose_diff(exp(lo), exp(hi)) < 1e-12);
  }
}

TEST_CASE("adjoint", "[se3][property]") {
  CHECK(adjoint(Pose::identity()).isIdentity());

  test::Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const Pose a = test::random_pose(rng);
    const Pose b = test::random_pose(rng);
    const Matrix6d lhs = adjoint(a * b);
    REQUIRE(test::max_abs(lhs - adjoint(a) * adjoint(b)) < 1e-10 * std::max(1.0, test::max_abs(lhs)));
  }

  // Ad(T) xi = d/de Log(T Exp(e xi) T^-1).
  for (int trial = 0; trial < 50; ++trial) {
    const Pose t = test::random_pose(rng);
    const double h = 1e-6;
    Matrix6d fd;
    for (int k = 0; k < 6; ++k) {
      const Vector6d plus = log(t * exp(unit_twist(k, h)) * t.inverse()).vector();
      const Vector6d minus = log(t * exp(unit_twist(k, -h)) * t.inverse()).vector();
      fd.col(k) = (plus - minus) / (2.0 * h);
    }
    REQUIRE(test::max_abs(fd - adjoint(t)) < 1e-5);
  }
}

TEST_CASE("left Jacobian and its inverse", "[se3][property]") {
  CHECK(left_jacobian(Twist()).isIdentity());
  CHECK(left_jacobian_inv(Twist()).isIdentity());

  test::Rng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    const Twist xi = test::random_twist(rng, 2.5);
    REQUIRE(test::max_abs(left_jacobian(xi) * left_jacobian_inv(xi) - Matrix6d::Identity()) < 1e-10);
  }
  for (double max_angle : {1e-6, 1e-3, 0.09, 0.5, 2.5}) {
    for (int trial = 0; trial < 20; ++trial) {
      const Twist xi = test::random_twist(rng, max_angle);
      REQUIRE(test::max_abs(numeric_left_jacobian(xi, 1e-6) - left_jacobian(xi)) < 1e-6);
    }
  }
}

TEST_CASE("boxplus and boxminus", "[se3]") {
  test::Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose t = test::random_pose(rng);
    REQUIRE(pose_diff(boxplus(t, Twist()), t) == 0.0);
    REQUIRE(test::max_abs(boxminus(t, t).vector()) < 1e-12);

    // a [-] (a [+] xi) recovers xi: the second operand is seen from the first.
    const Twist xi = test::random_twist(rng, 2.0);
    REQUIRE(test::max_abs(boxminus(t, boxplus(t, xi)).vector() - xi.vector()) < 1e-9);
    REQUIRE(test::max_abs(boxminus(boxplus(t, xi), t).vector() + xi.vector()) < 1e-9);
  }
}

TEST_CASE("long chains stay orthonormal", "[se3]") {
  test::Rng rng(71);
  traj::Trajectory t;
  for (int i = 0; i < 1000; ++i) t.rel_poses.push_back(exp(test::random_twist(rng, 3.0, 1.0)));
  t.edge_covs.assign(t.rel_poses.size() + 1, Matrix6d::Identity());

  const Pose end = traj::chain_pose(t, t.num_poses());
  CHECK(end.orthonormality_error() < 1e-10);
  CHECK(std::abs(end.rotation().determinant() - 1.0) < 1e-10);
  const auto all = traj::chain_all(t);
  for (const Pose& p : all) REQUIRE(p.orthonormality_error() < 1e-10);
  CHECK(pose_diff(all.back(), end) == 0.0);
}
