#pragma once

#include <Eigen/Dense>
#include <array>

#include "softarm/kinematics.hpp"
#include "softarm/params.hpp"

namespace softarm {

/// Standard-form terms of the configuration-space dynamics
///   inertia * ddq + coriolis * dq + conservative = tau_c + tau_e.
struct DynamicsTerms {
  Matrix4d inertia = Matrix4d::Zero();
  Matrix4d coriolis = Matrix4d::Zero();
  Eigen::Vector4d conservative = Eigen::Vector4d::Zero();
};

/// Elastic energy of the pseudo-rigid springs plus gravity of the lumped
/// mass points (bend coordinate per segment is curvature * arc_length).
double potential_energy(const Vector4d& config, const RobotParams& params);

/// Pseudo-rigid rotational terms plus translational energy of the mass
/// points, with velocities taken through the position Jacobians.
double kinetic_energy(const Vector4d& config, const Vector4d& rates,
                      const RobotParams& params);

/// Inertia matrix; exactly the Hessian of the kinetic energy in the rates,
/// so T == 0.5 * dq' * M * dq identically.
Matrix4d mass_matrix(const Vector4d& config, const RobotParams& params);

/// Analytic partial derivatives dM/dq_m, m = 0..3.
std::array<Matrix4d, 4> mass_matrix_partials(const Vector4d& config,
                                             const RobotParams& params);

/// Central finite differences of mass_matrix; kept as an independent route
/// for validating the analytic partials. Step default balances truncation
/// against round-off at double precision.
std::array<Matrix4d, 4> mass_matrix_partials_fd(const Vector4d& config,
                                                const RobotParams& params,
                                                double step = 1e-6);

/// Coriolis matrix built from Christoffel symbols of the inertia partials,
/// which preserves the skew symmetry of dM/dt - 2C.
Matrix4d coriolis_matrix(const Vector4d& config, const Vector4d& rates,
                         const RobotParams& params);

/// Christoffel assembly from a given partials tensor.
Matrix4d coriolis_from_partials(const std::array<Matrix4d, 4>& partials,
                                const Vector4d& rates);

/// Gradient of the potential energy: analytic elastic terms plus gravity
/// propagated through the mass-point Jacobians.
Eigen::Vector4d conservative_vector(const Vector4d& config,
                                    const RobotParams& params);

/// All standard-form terms in one pass (shares the kinematic work).
DynamicsTerms dynamics_terms(const Vector4d& config, const Vector4d& rates,
                             const RobotParams& params);

/// Acceleration from precomputed terms via a symmetric positive-definite
/// solve (no explicit inverse).
Eigen::Vector4d accel_from_terms(const DynamicsTerms& terms,
                                 const Vector4d& rates,
                                 const Vector4d& tau_c, const Vector4d& tau_e);

/// Forward dynamics. Throws std::domain_error on non-finite inputs.
Eigen::Vector4d forward_dynamics(const Vector4d& config, const Vector4d& rates,
                                 const Vector4d& tau_c, const Vector4d& tau_e,
                                 const RobotParams& params);

}  // namespace softarm
