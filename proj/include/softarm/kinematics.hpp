#pragma once

#include <Eigen/Dense>
#include <array>

#include "softarm/params.hpp"

namespace softarm {

using Vector4d = Eigen::Vector4d;
using Matrix4d = Eigen::Matrix4d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix34d = Eigen::Matrix<double, 3, 4>;
using Matrix46d = Eigen::Matrix<double, 4, 6>;
using Matrix64d = Eigen::Matrix<double, 6, 4>;

/// Curvature below this value is treated as a straight segment: the bend-plane
/// angle is reported as zero and translation entries use series expansions.
inline constexpr double kCurvatureEpsilon = 1e-6;

/// One constant-curvature segment: circular arc of curvature kappa bending in
/// the plane selected by plane_angle, with fixed arc length.
struct SegmentConfig {
  double curvature = 0.0;    // 1/m, >= 0
  double plane_angle = 0.0;  // rad, in (-pi, pi]
  double arc_length = 0.15;  // m
};

/// Six cable lengths, ordered (segment 1: cable 1..3, segment 2: cable 1..3).
using CableVector = Eigen::Matrix<double, 6, 1>;

/// Rigid transform stored as rotation + translation; matrix() assembles the
/// 4x4 form with an exact [0 0 0 1] last row.
struct Transform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }
};

/// Wrap an angle to (-pi, pi].
double wrap_angle(double angle);

namespace detail {

enum class ArcBranch { kAuto, kExact, kSeries };

/// Scalar building blocks of the segment transform and their curvature
/// derivatives: chord = (cos(kl) - 1)/k, rise = sin(kl)/k. The series branch
/// takes over for small bend angles where the closed forms lose digits.
struct ArcScalars {
  double chord, chord_d1, chord_d2;
  double rise, rise_d1, rise_d2;
};

ArcScalars arc_scalars(double curvature, double arc_length,
                       ArcBranch branch = ArcBranch::kAuto);

/// Segment pose and its first/second partials with respect to (curvature,
/// plane_angle). Feeds both the task Jacobian and the inertia-matrix
/// derivatives, so all of it is analytic.
struct SegmentDerivs {
  Eigen::Vector3d p;
  Eigen::Matrix3d R;
  Eigen::Vector3d dp_dk, dp_da;
  Eigen::Matrix3d dR_dk, dR_da;
  Eigen::Vector3d d2p_dkk, d2p_dka, d2p_daa;
  Eigen::Matrix3d d2R_dkk, d2R_dka, d2R_daa;
};

SegmentDerivs segment_derivs(const SegmentConfig& seg);

}  // namespace detail

/// Base-to-tip transform of one segment. Rotation is the composed form
/// Rz(angle) * Ry(kappa*l) * Rz(-angle), orthonormal by construction;
/// translation is ((cos(kl)-1)/k * cos(angle), -(cos(kl)-1)/k * sin(angle),
/// sin(kl)/k) with series handling of the k -> 0 limit (R = I, p = (0,0,l)).
Transform segment_transform(double curvature, double plane_angle,
                            double arc_length);
inline Transform segment_transform(const SegmentConfig& seg) {
  return segment_transform(seg.curvature, seg.plane_angle, seg.arc_length);
}

/// Per-entry difference between the transform used by this library and a
/// commonly tabulated closed-form variant whose mixed rotation entry breaks
/// orthonormality. Quantifies how far the two conventions diverge at a given
/// configuration.
Eigen::Matrix4d segment_transform_discrepancy(double curvature,
                                              double plane_angle,
                                              double arc_length);

/// Cable lengths of one segment -> (curvature, plane angle, mean arc length).
/// Straight segments (radicand below the curvature epsilon) report
/// (0, 0, mean length). Throws std::domain_error on non-positive inputs.
SegmentConfig cable_to_segment(const Eigen::Vector3d& lengths,
                               double disk_radius);

/// All six cables -> both segment configurations.
std::array<SegmentConfig, 2> actuators_to_configuration(const CableVector& q,
                                                        double disk_radius);

/// Analytic inverse of cable_to_segment:
///   l_j = l * (1 + r * kappa * sin(plane_angle + (j-1) * 2pi/3)).
/// The phase is fixed so the round trip through cable_to_segment is exact.
/// Throws std::domain_error if any resulting length is non-positive.
Eigen::Vector3d segment_to_cables(const SegmentConfig& seg, double disk_radius);

/// Configuration 4-vector [k1, a1, k2, a2] -> all six cable lengths, using the
/// arc lengths and disk radius from params.
CableVector configuration_to_actuators(const Vector4d& config,
                                       const RobotParams& params);

/// Helpers to view the configuration 4-vector as two segments.
std::array<SegmentConfig, 2> split_config(const Vector4d& config,
                                          const RobotParams& params);

struct FkResult {
  Transform segment1_end;   // base -> tip of segment 1 (mass point 1 frame)
  Transform end_effector;   // base -> tip of segment 2
  Vector6d task;            // [x y z, rotation vector of the end frame]
};

/// Chain the two segment transforms from the base frame (origin, +z along the
/// undeformed backbone, gravity along -z).
FkResult forward_kinematics(const Vector4d& config, const RobotParams& params);

/// Task 6-vector only.
Vector6d task_state(const Vector4d& config, const RobotParams& params);

/// Rotation vector (axis * angle) of R; principal branch, angle in [0, pi].
Eigen::Vector3d rotation_vector(const Eigen::Matrix3d& R);

/// Inverse of the left Jacobian of SO(3) at the given rotation vector; maps
/// spatial angular velocity to rotation-vector rates. Singular at angle pi.
Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& rotvec);

/// 6x4 Jacobian of the task state with respect to the configuration vector.
/// Analytic; rows 0-2 are the end-effector position partials, rows 3-5 map
/// through the rotation-vector chart.
Matrix64d jacobian_config_to_task(const Vector4d& config,
                                  const RobotParams& params);

struct ActuatorJacobian {
  Matrix46d matrix = Matrix46d::Zero();
  /// True where a segment sits at the equal-lengths (straight) singularity;
  /// that 2x3 block is zeroed and not meaningful.
  std::array<bool, 2> straight_segment = {false, false};
};

/// 4x6 Jacobian of (k1, a1, k2, a2) with respect to the six cable lengths.
ActuatorJacobian jacobian_actuator_to_config(const CableVector& q,
                                             double disk_radius);

/// Lumped mass points (tip of each segment) with their position Jacobians;
/// the second-derivative tensor of the positions backs the analytic
/// inertia-matrix derivatives.
struct MassPointKinematics {
  Eigen::Vector3d p1, p2;
  Matrix34d jac1, jac2;
};

MassPointKinematics mass_point_kinematics(const Vector4d& config,
                                          const RobotParams& params);

struct MassPointDerivatives {
  MassPointKinematics value;
  std::array<Matrix34d, 4> djac1;  // d(jac1)/d(config_m)
  std::array<Matrix34d, 4> djac2;
};

MassPointDerivatives mass_point_derivatives(const Vector4d& config,
                                            const RobotParams& params);

}  // namespace softarm
