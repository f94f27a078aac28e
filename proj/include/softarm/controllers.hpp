#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "softarm/dynamics.hpp"

namespace softarm {

/// Error signals shared by the tracking controllers. By construction
/// e_v = de_p + eps * e_p and s = lambda * e_p + e_v.
struct TrackingErrors {
  Eigen::Vector4d e_p = Eigen::Vector4d::Zero();
  Eigen::Vector4d e_p_dot = Eigen::Vector4d::Zero();
  Eigen::Vector4d sigma = Eigen::Vector4d::Zero();   // virtual control eps*e_p
  Eigen::Vector4d e_v = Eigen::Vector4d::Zero();
  Eigen::Vector4d s = Eigen::Vector4d::Zero();       // sliding surface
};

/// Gains of the adaptive back-stepping sliding-mode law. eps acts as a
/// scalar multiple of the identity.
struct AbsmParams {
  double eps = 2.9;
  double lambda = 10.5;
  double gamma = 1.1;
  double nu = 1.9;
  double delta = 0.05;  // tanh boundary-layer width
  double eta = 1000.0;  // adaptation gain

  /// Determinant of the 2x2 error-weighting block: nu*(eps+lambda) - 0.25.
  /// Non-negative values make the quadratic decay bound valid.
  double phi_norm() const { return nu * (eps + lambda) - 0.25; }

  void validate() const {
    if (eps <= 0 || lambda <= 0 || gamma <= 0 || nu <= 0 || delta <= 0 ||
        eta <= 0) {
      throw std::domain_error("AbsmParams: gains must be positive");
    }
    if (phi_norm() < 0) {
      throw std::domain_error(
          "AbsmParams: nu*(eps+lambda) - 0.25 must be non-negative");
    }
  }
};

struct PdParams {
  double kp = 125.0;
  double kd = 5.0;

  void validate() const {
    if (kp <= 0 || kd <= 0) {
      throw std::domain_error("PdParams: gains must be positive");
    }
  }
};

TrackingErrors compute_errors(const Vector4d& q, const Vector4d& dq,
                              const Vector4d& q_des, const Vector4d& dq_des,
                              double eps, double lambda);

/// Adaptive back-stepping sliding-mode torque:
///   tau = M*(-lambda*(e_v - eps*e_p) + ddq_des - eps*de_p - nu*s)
///         + C*dq + N + d_hat - tau_ext_est - gamma*nu*M*tanh(s/delta).
Eigen::Vector4d absm_control(const TrackingErrors& err,
                             const Vector4d& ddq_des,
                             const DynamicsTerms& nominal, const Vector4d& dq,
                             const Vector4d& d_hat,
                             const Vector4d& tau_ext_est,
                             const AbsmParams& p);

/// Adaptation law d(d_hat)/dt = -eta * M^{-T} * s.
Eigen::Vector4d absm_adaptation_rate(const Vector4d& s,
                                     const Matrix4d& nominal_inertia,
                                     double eta);

/// Sliding-mode torque; coincides with the adaptive law at nu = 1 with a
/// zero uncertainty estimate.
Eigen::Vector4d sm_control(const TrackingErrors& err, const Vector4d& ddq_des,
                           const DynamicsTerms& nominal, const Vector4d& dq,
                           const Vector4d& tau_ext_est, const AbsmParams& p);

/// Inverse-dynamics PD: tau = M*(ddq_des - kd*de_p - kp*e_p) + C*dq + N,
/// which yields linear second-order error dynamics under an exact model.
Eigen::Vector4d pd_control(const TrackingErrors& err, const Vector4d& ddq_des,
                           const DynamicsTerms& nominal, const Vector4d& dq,
                           const PdParams& p);

struct LyapunovSample {
  double value = 0.0;             // V3
  double derivative_bound = 0.0;  // quadratic decay bound on dV3/dt, <= 0
};

/// V3 = 0.5*(|e_p|^2 + |s|^2) + 0.5/eta * |d_tilde|^2 and the bound
/// -(eps*|e_p|^2 - e_p'e_v + nu*|s|^2) used as the stability trace.
LyapunovSample lyapunov_v3(const TrackingErrors& err,
                           const Vector4d& d_tilde, const AbsmParams& p);

}  // namespace softarm
