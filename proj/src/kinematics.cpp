#include "softarm/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace softarm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector3d vee_antisym(const Eigen::Matrix3d& m) {
  // vee of the antisymmetric part
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
          0.5 * (m(1, 0) - m(0, 1))};
}

}  // namespace

double wrap_angle(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

namespace detail {

ArcScalars arc_scalars(double curvature, double arc_length, ArcBranch branch) {
  const double k = curvature;
  const double l = arc_length;
  const double theta = k * l;
  const bool series = branch == ArcBranch::kSeries ||
                      (branch == ArcBranch::kAuto && std::abs(theta) < 1e-2);
  ArcScalars s{};
  if (series) {
    const double k2 = k * k, k3 = k2 * k, k4 = k2 * k2, k5 = k4 * k;
    const double l2 = l * l, l3 = l2 * l, l4 = l2 * l2, l5 = l4 * l,
                 l6 = l4 * l2;
    s.chord = -k * l2 / 2.0 + k3 * l4 / 24.0 - k5 * l6 / 720.0;
    s.chord_d1 = -l2 / 2.0 + k2 * l4 / 8.0 - k4 * l6 / 144.0;
    s.chord_d2 = k * l4 / 4.0 - k3 * l6 / 36.0;
    s.rise = l - k2 * l3 / 6.0 + k4 * l5 / 120.0;
    s.rise_d1 = -k * l3 / 3.0 + k3 * l5 / 30.0;
    s.rise_d2 = -l3 / 3.0 + k2 * l5 / 10.0;
  } else {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    const double k2 = k * k, k3 = k2 * k;
    s.chord = (ct - 1.0) / k;
    s.chord_d1 = -l * st / k - (ct - 1.0) / k2;
    s.chord_d2 = -l * l * ct / k + 2.0 * l * st / k2 + 2.0 * (ct - 1.0) / k3;
    s.rise = st / k;
    s.rise_d1 = l * ct / k - st / k2;
    s.rise_d2 = -l * l * st / k - 2.0 * l * ct / k2 + 2.0 * st / k3;
  }
  return s;
}

SegmentDerivs segment_derivs(const SegmentConfig& seg) {
  const double k = seg.curvature;
  const double l = seg.arc_length;
  const double theta = k * l;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double a = ct - 1.0;
  const double da = -l * st;       // d a / d k
  const double dda = -l * l * ct;  // d^2 a / d k^2
  const double dst = l * ct, ddst = -l * l * st;
  const double dct = -l * st, ddct = -l * l * ct;

  const double ca = std::cos(seg.plane_angle), sa = std::sin(seg.plane_angle);
  const double u = ca * ca;        // cos^2
  const double v = sa * ca;        // sin*cos
  const double s2 = 2.0 * sa * ca; // sin(2a)
  const double c2 = u - sa * sa;   // cos(2a)

  const ArcScalars arc = arc_scalars(k, l);

  SegmentDerivs d;
  d.p = {ca * arc.chord, -sa * arc.chord, arc.rise};
  d.dp_dk = {ca * arc.chord_d1, -sa * arc.chord_d1, arc.rise_d1};
  d.dp_da = {-sa * arc.chord, -ca * arc.chord, 0.0};
  d.d2p_dkk = {ca * arc.chord_d2, -sa * arc.chord_d2, arc.rise_d2};
  d.d2p_dka = {-sa * arc.chord_d1, -ca * arc.chord_d1, 0.0};
  d.d2p_daa = {-ca * arc.chord, sa * arc.chord, 0.0};

  d.R << 1.0 + u * a, v * a, ca * st,
         v * a, ct - u * a, sa * st,
         -ca * st, -sa * st, ct;
  d.dR_dk << u * da, v * da, ca * dst,
             v * da, dct - u * da, sa * dst,
             -ca * dst, -sa * dst, dct;
  d.dR_da << -s2 * a, c2 * a, -sa * st,
             c2 * a, s2 * a, ca * st,
             sa * st, -ca * st, 0.0;
  d.d2R_dkk << u * dda, v * dda, ca * ddst,
               v * dda, ddct - u * dda, sa * ddst,
               -ca * ddst, -sa * ddst, ddct;
  d.d2R_dka << -s2 * da, c2 * da, -sa * dst,
               c2 * da, s2 * da, ca * dst,
               sa * dst, -ca * dst, 0.0;
  d.d2R_daa << -2.0 * c2 * a, -2.0 * s2 * a, -ca * st,
               -2.0 * s2 * a, 2.0 * c2 * a, -sa * st,
               ca * st, sa * st, 0.0;
  return d;
}

}  // namespace detail

Transform segment_transform(double curvature, double plane_angle,
                            double arc_length) {
  SegmentConfig seg{curvature, plane_angle, arc_length};
  const detail::SegmentDerivs d = detail::segment_derivs(seg);
  return Transform{d.R, d.p};
}

Eigen::Matrix4d segment_transform_discrepancy(double curvature,
                                              double plane_angle,
                                              double arc_length) {
  const Transform ours = segment_transform(curvature, plane_angle, arc_length);
  Eigen::Matrix4d variant = ours.matrix();
  const double theta = curvature * arc_length;
  // The tabulated variant swaps the factors of the (0,2) rotation entry.
  variant(0, 2) = std::sin(plane_angle) * std::cos(theta);
  return ours.matrix() - variant;
}

SegmentConfig cable_to_segment(const Eigen::Vector3d& lengths,
                               double disk_radius) {
  if (disk_radius <= 0.0) {
    throw std::domain_error("cable_to_segment: disk radius must be positive");
  }
  const double l1 = lengths[0], l2 = lengths[1], l3 = lengths[2];
  if (l1 <= 0.0 || l2 <= 0.0 || l3 <= 0.0) {
    throw std::domain_error("cable_to_segment: cable lengths must be positive");
  }
  const double sum = l1 + l2 + l3;
  const double radicand =
      l1 * l1 + l2 * l2 + l3 * l3 - l1 * l2 - l2 * l3 - l3 * l1;
  SegmentConfig seg;
  seg.arc_length = sum / 3.0;
  const double curvature =
      2.0 * std::sqrt(std::max(radicand, 0.0)) / (disk_radius * sum);
  if (curvature < kCurvatureEpsilon) {
    return seg;  // straight by convention: curvature = 0, plane_angle = 0
  }
  seg.curvature = curvature;
  const double num = 2.0 * l1 - l2 - l3;
  const double den = std::sqrt(3.0) * (l2 - l3);
  seg.plane_angle = wrap_angle(std::atan2(num, den));
  return seg;
}

std::array<SegmentConfig, 2> actuators_to_configuration(const CableVector& q,
                                                        double disk_radius) {
  return {cable_to_segment(q.head<3>(), disk_radius),
          cable_to_segment(q.tail<3>(), disk_radius)};
}

Eigen::Vector3d segment_to_cables(const SegmentConfig& seg,
                                  double disk_radius) {
  Eigen::Vector3d out;
  for (int j = 0; j < 3; ++j) {
    const double phase = seg.plane_angle + j * kTwoPi / 3.0;
    out[j] = seg.arc_length *
             (1.0 + disk_radius * seg.curvature * std::sin(phase));
    if (out[j] <= 0.0) {
      throw std::domain_error(
          "segment_to_cables: configuration maps to a non-positive length");
    }
  }
  return out;
}

std::array<SegmentConfig, 2> split_config(const Vector4d& config,
                                          const RobotParams& params) {
  return {SegmentConfig{config[0], config[1], params.arc_length[0]},
          SegmentConfig{config[2], config[3], params.arc_length[1]}};
}

CableVector configuration_to_actuators(const Vector4d& config,
                                       const RobotParams& params) {
  const auto segs = split_config(config, params);
  CableVector q;
  q.head<3>() = segment_to_cables(segs[0], params.disk_radius);
  q.tail<3>() = segment_to_cables(segs[1], params.disk_radius);
  return q;
}

FkResult forward_kinematics(const Vector4d& config, const RobotParams& params) {
  const auto segs = split_config(config, params);
  const Transform t1 = segment_transform(segs[0]);
  const Transform t2 = segment_transform(segs[1]);
  FkResult fk;
  fk.segment1_end = t1;
  fk.end_effector.rotation = t1.rotation * t2.rotation;
  fk.end_effector.translation = t1.translation + t1.rotation * t2.translation;
  fk.task.head<3>() = fk.end_effector.translation;
  fk.task.tail<3>() = rotation_vector(fk.end_effector.rotation);
  return fk;
}

Vector6d task_state(const Vector4d& config, const RobotParams& params) {
  return forward_kinematics(config, params).task;
}

Eigen::Vector3d rotation_vector(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double s = q.vec().norm();
  if (s < 1e-12) {
    return 2.0 / q.w() * q.vec();
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return (angle / s) * q.vec();
}

Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& rotvec) {
  const double theta = rotvec.norm();
  Eigen::Matrix3d skew;
  skew << 0.0, -rotvec.z(), rotvec.y(),
          rotvec.z(), 0.0, -rotvec.x(),
          -rotvec.y(), rotvec.x(), 0.0;
  double c;
  if (theta < 1e-4) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * skew + c * skew * skew;
}

Matrix64d jacobian_config_to_task(const Vector4d& config,
                                  const RobotParams& params) {
  const auto segs = split_config(config, params);
  const detail::SegmentDerivs s1 = detail::segment_derivs(segs[0]);
  const detail::SegmentDerivs s2 = detail::segment_derivs(segs[1]);

  Matrix64d jac;
  jac.block<3, 1>(0, 0) = s1.dp_dk + s1.dR_dk * s2.p;
  jac.block<3, 1>(0, 1) = s1.dp_da + s1.dR_da * s2.p;
  jac.block<3, 1>(0, 2) = s1.R * s2.dp_dk;
  jac.block<3, 1>(0, 3) = s1.R * s2.dp_da;

  const Eigen::Matrix3d R = s1.R * s2.R;
  const std::array<Eigen::Matrix3d, 4> dR = {
      s1.dR_dk * s2.R, s1.dR_da * s2.R, s1.R * s2.dR_dk, s1.R * s2.dR_da};
  const Eigen::Matrix3d jl_inv =
      so3_left_jacobian_inverse(rotation_vector(R));
  for (int m = 0; m < 4; ++m) {
    jac.block<3, 1>(3, m) = jl_inv * vee_antisym(dR[m] * R.transpose());
  }
  return jac;
}

ActuatorJacobian jacobian_actuator_to_config(const CableVector& q,
                                             double disk_radius) {
  ActuatorJacobian out;
  for (int seg = 0; seg < 2; ++seg) {
    const Eigen::Vector3d l = seg == 0 ? q.head<3>() : q.tail<3>();
    const SegmentConfig cfg = cable_to_segment(l, disk_radius);
    if (cfg.curvature < kCurvatureEpsilon) {
      out.straight_segment[seg] = true;
      continue;
    }
    const double sum = l.sum();
    const double radicand = l[0] * l[0] + l[1] * l[1] + l[2] * l[2] -
                            l[0] * l[1] - l[1] * l[2] - l[2] * l[0];
    const double root = std::sqrt(radicand);
    const Eigen::Vector3d d_radicand{2.0 * l[0] - l[1] - l[2],
                                     2.0 * l[1] - l[0] - l[2],
                                     2.0 * l[2] - l[0] - l[1]};
    const double u = 2.0 * l[0] - l[1] - l[2];
    const double v = std::sqrt(3.0) * (l[1] - l[2]);
    const Eigen::Vector3d du{2.0, -1.0, -1.0};
    const Eigen::Vector3d dv{0.0, std::sqrt(3.0), -std::sqrt(3.0)};
    for (int j = 0; j < 3; ++j) {
      const double dk = d_radicand[j] / (disk_radius * sum * root) -
                        2.0 * root / (disk_radius * sum * sum);
      // u^2 + v^2 collapses to 4 * radicand
      const double dphi = (v * du[j] - u * dv[j]) / (4.0 * radicand);
      out.matrix(2 * seg, 3 * seg + j) = dk;
      out.matrix(2 * seg + 1, 3 * seg + j) = dphi;
    }
  }
  return out;
}

MassPointKinematics mass_point_kinematics(const Vector4d& config,
                                          const RobotParams& params) {
  const auto segs = split_config(config, params);
  const detail::SegmentDerivs s1 = detail::segment_derivs(segs[0]);
  const detail::SegmentDerivs s2 = detail::segment_derivs(segs[1]);
  MassPointKinematics mp;
  mp.p1 = s1.p;
  mp.p2 = s1.p + s1.R * s2.p;
  mp.jac1.setZero();
  mp.jac1.col(0) = s1.dp_dk;
  mp.jac1.col(1) = s1.dp_da;
  mp.jac2.col(0) = s1.dp_dk + s1.dR_dk * s2.p;
  mp.jac2.col(1) = s1.dp_da + s1.dR_da * s2.p;
  mp.jac2.col(2) = s1.R * s2.dp_dk;
  mp.jac2.col(3) = s1.R * s2.dp_da;
  return mp;
}

MassPointDerivatives mass_point_derivatives(const Vector4d& config,
                                            const RobotParams& params) {
  const auto segs = split_config(config, params);
  const detail::SegmentDerivs s1 = detail::segment_derivs(segs[0]);
  const detail::SegmentDerivs s2 = detail::segment_derivs(segs[1]);

  MassPointDerivatives out;
  out.value.p1 = s1.p;
  out.value.p2 = s1.p + s1.R * s2.p;
  out.value.jac1.setZero();
  out.value.jac1.col(0) = s1.dp_dk;
  out.value.jac1.col(1) = s1.dp_da;
  out.value.jac2.col(0) = s1.dp_dk + s1.dR_dk * s2.p;
  out.value.jac2.col(1) = s1.dp_da + s1.dR_da * s2.p;
  out.value.jac2.col(2) = s1.R * s2.dp_dk;
  out.value.jac2.col(3) = s1.R * s2.dp_da;

  for (auto& m : out.djac1) m.setZero();
  out.djac1[0].col(0) = s1.d2p_dkk;
  out.djac1[0].col(1) = s1.d2p_dka;
  out.djac1[1].col(0) = s1.d2p_dka;
  out.djac1[1].col(1) = s1.d2p_daa;

  for (auto& m : out.djac2) m.setZero();
  // d/d k1
  out.djac2[0].col(0) = s1.d2p_dkk + s1.d2R_dkk * s2.p;
  out.djac2[0].col(1) = s1.d2p_dka + s1.d2R_dka * s2.p;
  out.djac2[0].col(2) = s1.dR_dk * s2.dp_dk;
  out.djac2[0].col(3) = s1.dR_dk * s2.dp_da;
  // d/d a1
  out.djac2[1].col(0) = s1.d2p_dka + s1.d2R_dka * s2.p;
  out.djac2[1].col(1) = s1.d2p_daa + s1.d2R_daa * s2.p;
  out.djac2[1].col(2) = s1.dR_da * s2.dp_dk;
  out.djac2[1].col(3) = s1.dR_da * s2.dp_da;
  // d/d k2
  out.djac2[2].col(0) = s1.dR_dk * s2.dp_dk;
  out.djac2[2].col(1) = s1.dR_da * s2.dp_dk;
  out.djac2[2].col(2) = s1.R * s2.d2p_dkk;
  out.djac2[2].col(3) = s1.R * s2.d2p_dka;
  // d/d a2
  out.djac2[3].col(0) = s1.dR_dk * s2.dp_da;
  out.djac2[3].col(1) = s1.dR_da * s2.dp_da;
  out.djac2[3].col(2) = s1.R * s2.d2p_dka;
  out.djac2[3].col(3) = s1.R * s2.d2p_daa;
  return out;
}

}  // namespace softarm
