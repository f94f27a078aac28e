#include "softarm/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace softarm {

namespace {

Matrix4d spring_inertia_diagonal(const RobotParams& p) {
  Eigen::Vector4d d;
  d << p.bending_inertia * p.arc_length[0] * p.arc_length[0],
      p.torsion_inertia,
      p.bending_inertia * p.arc_length[1] * p.arc_length[1],
      p.torsion_inertia;
  return d.asDiagonal();
}

}  // namespace

double potential_energy(const Vector4d& config, const RobotParams& params) {
  const MassPointKinematics mp = mass_point_kinematics(config, params);
  const double bend1 = config[0] * params.arc_length[0];
  const double bend2 = config[2] * params.arc_length[1];
  const double elastic =
      0.5 * params.torsion_stiffness * (config[1] * config[1] +
                                        config[3] * config[3]) +
      0.5 * params.bending_stiffness * (bend1 * bend1 + bend2 * bend2);
  const double gravity = -params.gravity * (params.mass[0] * mp.p1.z() +
                                            params.mass[1] * mp.p2.z());
  return elastic + gravity;
}

double kinetic_energy(const Vector4d& config, const Vector4d& rates,
                      const RobotParams& params) {
  const MassPointKinematics mp = mass_point_kinematics(config, params);
  const Eigen::Vector3d v1 = mp.jac1 * rates;
  const Eigen::Vector3d v2 = mp.jac2 * rates;
  const double bend_rate1 = rates[0] * params.arc_length[0];
  const double bend_rate2 = rates[2] * params.arc_length[1];
  return 0.5 * params.torsion_inertia * (rates[1] * rates[1] +
                                         rates[3] * rates[3]) +
         0.5 * params.bending_inertia * (bend_rate1 * bend_rate1 +
                                         bend_rate2 * bend_rate2) +
         0.5 * params.mass[0] * v1.squaredNorm() +
         0.5 * params.mass[1] * v2.squaredNorm();
}

Matrix4d mass_matrix(const Vector4d& config, const RobotParams& params) {
  const MassPointKinematics mp = mass_point_kinematics(config, params);
  Matrix4d m = spring_inertia_diagonal(params);
  m.noalias() += params.mass[0] * mp.jac1.transpose() * mp.jac1;
  m.noalias() += params.mass[1] * mp.jac2.transpose() * mp.jac2;
  return m;
}

std::array<Matrix4d, 4> mass_matrix_partials(const Vector4d& config,
                                             const RobotParams& params) {
  const MassPointDerivatives d = mass_point_derivatives(config, params);
  std::array<Matrix4d, 4> out;
  for (int m = 0; m < 4; ++m) {
    Matrix4d g1 = d.djac1[m].transpose() * d.value.jac1;
    Matrix4d g2 = d.djac2[m].transpose() * d.value.jac2;
    out[m] = params.mass[0] * (g1 + g1.transpose()) +
             params.mass[1] * (g2 + g2.transpose());
  }
  return out;
}

std::array<Matrix4d, 4> mass_matrix_partials_fd(const Vector4d& config,
                                                const RobotParams& params,
                                                double step) {
  std::array<Matrix4d, 4> out;
  for (int m = 0; m < 4; ++m) {
    Vector4d hi = config, lo = config;
    hi[m] += step;
    lo[m] -= step;
    out[m] = (mass_matrix(hi, params) - mass_matrix(lo, params)) /
             (2.0 * step);
  }
  return out;
}

Matrix4d coriolis_from_partials(const std::array<Matrix4d, 4>& partials,
                                const Vector4d& rates) {
  Matrix4d c = Matrix4d::Zero();
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int m = 0; m < 4; ++m) {
        acc += (partials[m](k, j) + partials[j](k, m) - partials[k](m, j)) *
               rates[m];
      }
      c(k, j) = 0.5 * acc;
    }
  }
  return c;
}

Matrix4d coriolis_matrix(const Vector4d& config, const Vector4d& rates,
                         const RobotParams& params) {
  return coriolis_from_partials(mass_matrix_partials(config, params), rates);
}

Eigen::Vector4d conservative_vector(const Vector4d& config,
                                    const RobotParams& params) {
  const MassPointKinematics mp = mass_point_kinematics(config, params);
  Eigen::Vector4d n;
  n << params.bending_stiffness * params.arc_length[0] * params.arc_length[0] *
           config[0],
      params.torsion_stiffness * config[1],
      params.bending_stiffness * params.arc_length[1] * params.arc_length[1] *
          config[2],
      params.torsion_stiffness * config[3];
  n -= params.gravity * (params.mass[0] * mp.jac1.row(2).transpose() +
                         params.mass[1] * mp.jac2.row(2).transpose());
  return n;
}

DynamicsTerms dynamics_terms(const Vector4d& config, const Vector4d& rates,
                             const RobotParams& params) {
  const MassPointDerivatives d = mass_point_derivatives(config, params);
  const Matrix34d& j1 = d.value.jac1;
  const Matrix34d& j2 = d.value.jac2;

  DynamicsTerms terms;
  terms.inertia = spring_inertia_diagonal(params);
  terms.inertia.noalias() += params.mass[0] * j1.transpose() * j1;
  terms.inertia.noalias() += params.mass[1] * j2.transpose() * j2;

  std::array<Matrix4d, 4> partials;
  for (int m = 0; m < 4; ++m) {
    Matrix4d g1 = d.djac1[m].transpose() * j1;
    Matrix4d g2 = d.djac2[m].transpose() * j2;
    partials[m] = params.mass[0] * (g1 + g1.transpose()) +
                  params.mass[1] * (g2 + g2.transpose());
  }
  terms.coriolis = coriolis_from_partials(partials, rates);

  terms.conservative
      << params.bending_stiffness * params.arc_length[0] *
             params.arc_length[0] * config[0],
      params.torsion_stiffness * config[1],
      params.bending_stiffness * params.arc_length[1] * params.arc_length[1] *
          config[2],
      params.torsion_stiffness * config[3];
  terms.conservative -=
      params.gravity * (params.mass[0] * j1.row(2).transpose() +
                        params.mass[1] * j2.row(2).transpose());
  return terms;
}

Eigen::Vector4d accel_from_terms(const DynamicsTerms& terms,
                                 const Vector4d& rates,
                                 const Vector4d& tau_c,
                                 const Vector4d& tau_e) {
  const Eigen::Vector4d rhs =
      tau_c + tau_e - terms.coriolis * rates - terms.conservative;
  return terms.inertia.llt().solve(rhs);
}

Eigen::Vector4d forward_dynamics(const Vector4d& config, const Vector4d& rates,
                                 const Vector4d& tau_c, const Vector4d& tau_e,
                                 const RobotParams& params) {
  if (!config.allFinite() || !rates.allFinite() || !tau_c.allFinite() ||
      !tau_e.allFinite()) {
    throw std::domain_error("forward_dynamics: non-finite input");
  }
  return accel_from_terms(dynamics_terms(config, rates, params), rates, tau_c,
                          tau_e);
}

}  // namespace softarm
