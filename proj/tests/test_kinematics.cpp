#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "softarm/kinematics.hpp"

using namespace softarm;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

double rel_matrix_error(const Eigen::MatrixXd& got,
                        const Eigen::MatrixXd& want) {
  return max_abs(got - want) / std::max(1.0, max_abs(want));
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

SegmentConfig random_segment(std::mt19937& rng, double k_lo = 1e-3,
                             double k_hi = 6.0) {
  std::uniform_real_distribution<double> k(k_lo, k_hi);
  std::uniform_real_distribution<double> a(-kPi + 1e-6, kPi);
  std::uniform_real_distribution<double> l(0.1, 0.2);
  return SegmentConfig{k(rng), a(rng), l(rng)};
}

Vector4d random_config(std::mt19937& rng, double k_lo = 0.1,
                       double k_hi = 5.0) {
  std::uniform_real_distribution<double> k(k_lo, k_hi);
  std::uniform_real_distribution<double> a(-2.5, 2.5);
  return Vector4d{k(rng), a(rng), k(rng), a(rng)};
}

}  // namespace

TEST_CASE("cable map: equal lengths give a straight segment") {
  const SegmentConfig seg =
      cable_to_segment(Eigen::Vector3d{0.15, 0.15, 0.15}, 0.03);
  CHECK(seg.curvature == 0.0);
  CHECK(seg.plane_angle == 0.0);
  CHECK(seg.arc_length == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("cable map: bent example evaluates the closed form") {
  // direct evaluation at (0.16, 0.15, 0.14), r = 0.03:
  // radicand = 3e-4, curvature = 2*sqrt(3e-4)/(0.03*0.45)
  const SegmentConfig seg =
      cable_to_segment(Eigen::Vector3d{0.16, 0.15, 0.14}, 0.03);
  CHECK(seg.curvature == doctest::Approx(2.5660011964).epsilon(1e-9));
  CHECK(seg.arc_length == doctest::Approx(0.15).epsilon(1e-12));
  // numerator/denominator ratio is exactly sqrt(3) here
  CHECK(seg.plane_angle == doctest::Approx(kPi / 3.0).epsilon(1e-12));
}

TEST_CASE("cable map: symmetric pair puts the plane angle at +-pi/2") {
  const SegmentConfig plus =
      cable_to_segment(Eigen::Vector3d{0.16, 0.145, 0.145}, 0.03);
  CHECK(plus.plane_angle == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  const SegmentConfig minus =
      cable_to_segment(Eigen::Vector3d{0.14, 0.155, 0.155}, 0.03);
  CHECK(minus.plane_angle == doctest::Approx(-kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("cable map: rejects non-positive inputs") {
  CHECK_THROWS_AS(cable_to_segment({0.15, -0.1, 0.15}, 0.03),
                  std::domain_error);
  CHECK_THROWS_AS(cable_to_segment({0.15, 0.15, 0.15}, 0.0),
                  std::domain_error);
}

TEST_CASE("cable map round trip is the identity") {
  std::mt19937 rng(42);
  const double r = 0.03;
  for (int i = 0; i < 1000; ++i) {
    const SegmentConfig seg = random_segment(rng);
    const Eigen::Vector3d cables = segment_to_cables(seg, r);
    CHECK(cables.mean() == doctest::Approx(seg.arc_length).epsilon(1e-12));
    const SegmentConfig back = cable_to_segment(cables, r);
    CHECK(back.curvature == doctest::Approx(seg.curvature).epsilon(1e-9));
    CHECK(std::abs(angle_diff(back.plane_angle, seg.plane_angle)) < 1e-9);
    CHECK(back.arc_length == doctest::Approx(seg.arc_length).epsilon(1e-9));
  }
}

TEST_CASE("cable map: straight segment maps to equal cables") {
  const Eigen::Vector3d cables =
      segment_to_cables(SegmentConfig{0.0, 1.2, 0.15}, 0.03);
  CHECK(cables.isApproxToConstant(0.15, 1e-14));
}

TEST_CASE("cable map: lengthening one cable of a straight pose bends it") {
  Eigen::Vector3d cables{0.151, 0.15, 0.15};
  const SegmentConfig seg = cable_to_segment(cables, 0.03);
  CHECK(seg.curvature > 0.0);
}

TEST_CASE("cable map: inverse rejects non-positive result") {
  // curvature * radius > 1 drives one cable length negative
  CHECK_THROWS_AS(segment_to_cables(SegmentConfig{40.0, 0.0, 0.15}, 0.03),
                  std::domain_error);
}

TEST_CASE("segment transform: zero curvature limit") {
  const Transform t = segment_transform(0.0, 0.7, 0.15);
  CHECK(max_abs(t.rotation - Eigen::Matrix3d::Identity()) == 0.0);
  CHECK(t.translation[0] == 0.0);
  CHECK(t.translation[1] == 0.0);
  CHECK(t.translation[2] == doctest::Approx(0.15).epsilon(1e-15));
}

TEST_CASE("segment transform: half-turn example") {
  const double l = 0.15;
  const double k = kPi / l;  // bend angle exactly pi
  const Transform t = segment_transform(k, 0.0, l);
  CHECK(t.translation[0] == doctest::Approx(-2.0 / k).epsilon(1e-12));
  CHECK(std::abs(t.translation[1]) < 1e-15);
  CHECK(std::abs(t.translation[2]) < 1e-15);
  Eigen::Matrix3d want;
  want << -1, 0, 0, 0, 1, 0, 0, 0, -1;
  CHECK(max_abs(t.rotation - want) < 1e-12);
}

TEST_CASE("segment transform: rotation blocks stay orthonormal") {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const SegmentConfig seg = random_segment(rng, 0.0, 10.0);
    const Transform t = segment_transform(seg);
    CHECK(max_abs(t.rotation.transpose() * t.rotation -
                  Eigen::Matrix3d::Identity()) < 1e-10);
    CHECK(t.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    const Eigen::Matrix4d m = t.matrix();
    CHECK(m(3, 0) == 0.0);
    CHECK(m(3, 1) == 0.0);
    CHECK(m(3, 2) == 0.0);
    CHECK(m(3, 3) == 1.0);
  }
}

TEST_CASE("segment transform: series and closed-form branches agree") {
  // at the internal switch point
  const double l = 0.15;
  const double k_switch = 1e-2 / l;
  const auto exact =
      detail::arc_scalars(k_switch, l, detail::ArcBranch::kExact);
  const auto series =
      detail::arc_scalars(k_switch, l, detail::ArcBranch::kSeries);
  CHECK(std::abs(exact.chord - series.chord) < 1e-12);
  CHECK(std::abs(exact.rise - series.rise) < 1e-12);
  CHECK(std::abs(exact.chord_d1 - series.chord_d1) < 1e-11);
  CHECK(std::abs(exact.rise_d1 - series.rise_d1) < 1e-11);
  CHECK(std::abs(exact.chord_d2 - series.chord_d2) < 1e-9);
  CHECK(std::abs(exact.rise_d2 - series.rise_d2) < 1e-9);

  // and at the straight-segment epsilon
  const auto exact_eps =
      detail::arc_scalars(kCurvatureEpsilon, l, detail::ArcBranch::kExact);
  const auto series_eps =
      detail::arc_scalars(kCurvatureEpsilon, l, detail::ArcBranch::kSeries);
  CHECK(std::abs(exact_eps.chord - series_eps.chord) < 1e-9);
  CHECK(std::abs(exact_eps.rise - series_eps.rise) < 1e-9);
}

TEST_CASE("segment transform: discrepancy diagnostic flags one entry") {
  const Eigen::Matrix4d d =
      segment_transform_discrepancy(6.0, kPi / 4.0, 0.15);
  const double theta = 6.0 * 0.15;
  const double want = std::cos(kPi / 4.0) * std::sin(theta) -
                      std::sin(kPi / 4.0) * std::cos(theta);
  CHECK(d(0, 2) == doctest::Approx(want).epsilon(1e-12));
  Eigen::Matrix4d rest = d;
  rest(0, 2) = 0.0;
  CHECK(max_abs(rest) == 0.0);
}

TEST_CASE("forward kinematics: straight robot reaches (0, 0, 0.30)") {
  const RobotParams params;
  const FkResult fk = forward_kinematics(Vector4d::Zero(), params);
  CHECK(fk.task.head<3>().isApprox(Eigen::Vector3d(0, 0, 0.30), 1e-14));
  CHECK(fk.task.tail<3>().norm() < 1e-12);
}

TEST_CASE("forward kinematics: matches an explicit transform product") {
  const RobotParams params;
  Vector4d config;
  config << kPi / (2.0 * 0.15), 0.0, 0.0, 0.0;  // quarter turn, then straight
  const FkResult fk = forward_kinematics(config, params);

  const Transform t1 = segment_transform(config[0], config[1], 0.15);
  const Transform t2 = segment_transform(config[2], config[3], 0.15);
  const Eigen::Matrix4d product = t1.matrix() * t2.matrix();
  CHECK(max_abs(fk.end_effector.matrix() - product) < 1e-14);

  // hand-evaluated: tip sits at (0.15 - 1/k, 0, 1/k)
  const double k = config[0];
  CHECK(fk.task[0] == doctest::Approx(0.15 - 1.0 / k).epsilon(1e-12));
  CHECK(std::abs(fk.task[1]) < 1e-15);
  CHECK(fk.task[2] == doctest::Approx(1.0 / k).epsilon(1e-12));
}

TEST_CASE("forward kinematics: tip stays within total arc length") {
  const RobotParams params;
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vector4d config = random_config(rng, 0.0, 12.0);
    const FkResult fk = forward_kinematics(config, params);
    CHECK(fk.task.head<3>().norm() <= 0.30 + 1e-12);
  }
}

TEST_CASE("task jacobian: finite at the straight pose") {
  const RobotParams params;
  const Matrix64d jac = jacobian_config_to_task(Vector4d::Zero(), params);
  CHECK(jac.allFinite());
}

TEST_CASE("task jacobian: matches central finite differences") {
  const RobotParams params;
  std::mt19937 rng(13);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Vector4d config = random_config(rng);
    const Matrix64d jac = jacobian_config_to_task(config, params);
    Matrix64d fd;
    for (int m = 0; m < 4; ++m) {
      Vector4d hi = config, lo = config;
      hi[m] += h;
      lo[m] -= h;
      fd.col(m) = (task_state(hi, params) - task_state(lo, params)) / (2 * h);
    }
    CHECK(rel_matrix_error(jac, fd) < 1e-5);
  }
}

TEST_CASE("actuator jacobian: matches central finite differences") {
  const double r = 0.03;
  std::mt19937 rng(17);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    CableVector q;
    q.head<3>() = segment_to_cables(random_segment(rng, 0.5, 5.0), r);
    q.tail<3>() = segment_to_cables(random_segment(rng, 0.5, 5.0), r);
    const ActuatorJacobian jac = jacobian_actuator_to_config(q, r);
    CHECK_FALSE(jac.straight_segment[0]);
    CHECK_FALSE(jac.straight_segment[1]);
    Matrix46d fd = Matrix46d::Zero();
    for (int j = 0; j < 6; ++j) {
      CableVector hi = q, lo = q;
      hi[j] += h;
      lo[j] -= h;
      const auto a = actuators_to_configuration(hi, r);
      const auto b = actuators_to_configuration(lo, r);
      fd.col(j) << (a[0].curvature - b[0].curvature) / (2 * h),
          angle_diff(a[0].plane_angle, b[0].plane_angle) / (2 * h),
          (a[1].curvature - b[1].curvature) / (2 * h),
          angle_diff(a[1].plane_angle, b[1].plane_angle) / (2 * h);
    }
    CHECK(rel_matrix_error(jac.matrix, fd) < 1e-5);
  }
}

TEST_CASE("actuator jacobian: uniform cable shift leaves the radicand alone") {
  const double r = 0.03;
  const Eigen::Vector3d cables{0.16, 0.15, 0.14};
  const SegmentConfig seg = cable_to_segment(cables, r);
  const double delta = 1e-4;
  const SegmentConfig shifted =
      cable_to_segment(cables + Eigen::Vector3d::Constant(delta), r);
  // curvature changes only through the mean-length denominator
  const double sum = cables.sum();
  CHECK(shifted.curvature * (sum + 3 * delta) ==
        doctest::Approx(seg.curvature * sum).epsilon(1e-12));

  // the jacobian's directional derivative along (1,1,1) reduces to the
  // denominator term -3*kappa/sum
  CableVector q;
  q.head<3>() = cables;
  q.tail<3>() = cables;
  const ActuatorJacobian jac = jacobian_actuator_to_config(q, r);
  const double directional = jac.matrix.row(0).head<3>().sum();
  CHECK(directional ==
        doctest::Approx(-3.0 * seg.curvature / sum).epsilon(1e-9));
}

TEST_CASE("actuator jacobian: reports the straight singularity") {
  CableVector q = CableVector::Constant(0.15);
  const ActuatorJacobian jac = jacobian_actuator_to_config(q, 0.03);
  CHECK(jac.straight_segment[0]);
  CHECK(jac.straight_segment[1]);
  CHECK(max_abs(jac.matrix) == 0.0);
}

TEST_CASE("mass point derivatives: partials match finite differences") {
  const RobotParams params;
  std::mt19937 rng(19);
  const double h = 1e-6;
  for (int i = 0; i < 25; ++i) {
    const Vector4d config = random_config(rng);
    const MassPointDerivatives d = mass_point_derivatives(config, params);
    for (int m = 0; m < 4; ++m) {
      Vector4d hi = config, lo = config;
      hi[m] += h;
      lo[m] -= h;
      const MassPointKinematics a = mass_point_kinematics(hi, params);
      const MassPointKinematics b = mass_point_kinematics(lo, params);
      const Matrix34d fd1 = (a.jac1 - b.jac1) / (2 * h);
      const Matrix34d fd2 = (a.jac2 - b.jac2) / (2 * h);
      CHECK(rel_matrix_error(d.djac1[m], fd1) < 1e-6);
      CHECK(rel_matrix_error(d.djac2[m], fd2) < 1e-6);
    }
  }
}

TEST_CASE("mass point kinematics: consistent with forward kinematics") {
  const RobotParams params;
  std::mt19937 rng(23);
  const Vector4d config = random_config(rng);
  const MassPointKinematics mp = mass_point_kinematics(config, params);
  const FkResult fk = forward_kinematics(config, params);
  CHECK(mp.p1.isApprox(fk.segment1_end.translation, 1e-14));
  CHECK(mp.p2.isApprox(fk.end_effector.translation, 1e-14));
  const Matrix64d jac = jacobian_config_to_task(config, params);
  CHECK(max_abs(mp.jac2 - jac.topRows<3>()) < 1e-12);
}
