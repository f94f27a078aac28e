#include "softarm/controllers.hpp"

#include <cmath>

namespace softarm {

namespace {

Eigen::Vector4d tanh_componentwise(const Eigen::Vector4d& v, double width) {
  return v.unaryExpr([width](double x) { return std::tanh(x / width); });
}

}  // namespace

TrackingErrors compute_errors(const Vector4d& q, const Vector4d& dq,
                              const Vector4d& q_des, const Vector4d& dq_des,
                              double eps, double lambda) {
  TrackingErrors err;
  err.e_p = q - q_des;
  err.e_p_dot = dq - dq_des;
  err.sigma = eps * err.e_p;
  err.e_v = err.e_p_dot + err.sigma;
  err.s = lambda * err.e_p + err.e_v;
  return err;
}

Eigen::Vector4d absm_control(const TrackingErrors& err,
                             const Vector4d& ddq_des,
                             const DynamicsTerms& nominal, const Vector4d& dq,
                             const Vector4d& d_hat,
                             const Vector4d& tau_ext_est,
                             const AbsmParams& p) {
  const Eigen::Vector4d virtual_accel =
      -p.lambda * (err.e_v - p.eps * err.e_p) + ddq_des -
      p.eps * err.e_p_dot - p.nu * err.s;
  return nominal.inertia * virtual_accel + nominal.coriolis * dq +
         nominal.conservative + d_hat - tau_ext_est -
         p.gamma * p.nu * (nominal.inertia * tanh_componentwise(err.s, p.delta));
}

Eigen::Vector4d absm_adaptation_rate(const Vector4d& s,
                                     const Matrix4d& nominal_inertia,
                                     double eta) {
  // inertia is symmetric, so M^{-T} s is a plain SPD solve
  return -eta * nominal_inertia.llt().solve(s);
}

Eigen::Vector4d sm_control(const TrackingErrors& err, const Vector4d& ddq_des,
                           const DynamicsTerms& nominal, const Vector4d& dq,
                           const Vector4d& tau_ext_est, const AbsmParams& p) {
  const Eigen::Vector4d virtual_accel =
      -p.lambda * (err.e_v - p.eps * err.e_p) + ddq_des -
      p.eps * err.e_p_dot - err.s;
  return nominal.inertia * virtual_accel + nominal.coriolis * dq +
         nominal.conservative - tau_ext_est -
         p.gamma * (nominal.inertia * tanh_componentwise(err.s, p.delta));
}

Eigen::Vector4d pd_control(const TrackingErrors& err, const Vector4d& ddq_des,
                           const DynamicsTerms& nominal, const Vector4d& dq,
                           const PdParams& p) {
  const Eigen::Vector4d u = ddq_des - p.kd * err.e_p_dot - p.kp * err.e_p;
  return nominal.inertia * u + nominal.coriolis * dq + nominal.conservative;
}

LyapunovSample lyapunov_v3(const TrackingErrors& err,
                           const Vector4d& d_tilde, const AbsmParams& p) {
  LyapunovSample out;
  out.value = 0.5 * (err.e_p.squaredNorm() + err.s.squaredNorm()) +
              0.5 / p.eta * d_tilde.squaredNorm();
  out.derivative_bound = -(p.eps * err.e_p.squaredNorm() -
                           err.e_p.dot(err.e_v) + p.nu * err.s.squaredNorm());
  return out;
}

}  // namespace softarm
