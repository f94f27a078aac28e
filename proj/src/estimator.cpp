#include "softarm/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "softarm/dynamics.hpp"

namespace softarm {

LoadEstimator::LoadEstimator(const Vector4d& config0, const Vector4d& rates0,
                             const RobotParams& params, double gain)
    : params_(params), gain_(gain) {
  if (!(gain > 0.0)) {
    throw std::domain_error("LoadEstimator: gain must be positive");
  }
  momentum0_ = mass_matrix(config0, params_) * rates0;
}

void LoadEstimator::update(const Vector4d& config, const Vector4d& rates,
                           const Vector4d& tau_c, double dt) {
  if (!(dt > 0.0)) {
    throw std::domain_error("LoadEstimator::update: dt must be positive");
  }
  const Eigen::Vector4d momentum = mass_matrix(config, params_) * rates;
  const Eigen::Vector4d drive = tau_c - conservative_vector(config, params_);

  // integrand at the new endpoint is drive + residual_new; solve the linear
  // relation for residual_new instead of lagging it a step
  Eigen::Vector4d residual_new;
  if (has_prev_) {
    const Eigen::Vector4d partial =
        integral_ + 0.5 * dt * (integrand_prev_ + drive);
    residual_new = gain_ / (1.0 + 0.5 * gain_ * dt) *
                   (momentum - partial - momentum0_);
    integral_ = partial + 0.5 * dt * residual_new;
  } else {
    // first interval: no stored left endpoint yet, rectangle rule
    const Eigen::Vector4d partial = integral_ + dt * drive;
    residual_new =
        gain_ / (1.0 + gain_ * dt) * (momentum - partial - momentum0_);
    integral_ = partial + dt * residual_new;
    has_prev_ = true;
  }
  residual_ = residual_new;
  integrand_prev_ = drive + residual_new;
}

Eigen::Vector4d residual_reference(const Vector4d& tau_e, double gain,
                                   double t) {
  return tau_e * (1.0 - std::exp(-gain * t));
}

std::vector<StepResponseSample> static_step_response(
    const Vector4d& config, const Vector4d& tau_e, double gain, double dt,
    double duration, const RobotParams& params) {
  const Vector4d rates = Vector4d::Zero();
  const Eigen::Vector4d holding_torque =
      conservative_vector(config, params) - tau_e;
  LoadEstimator estimator(config, rates, params, gain);
  std::vector<StepResponseSample> out;
  const int n = static_cast<int>(std::lround(duration / dt));
  out.reserve(n + 1);
  out.push_back({0.0, estimator.residual()});
  for (int i = 1; i <= n; ++i) {
    estimator.update(config, rates, holding_torque, dt);
    out.push_back({i * dt, estimator.residual()});
  }
  return out;
}

}  // namespace softarm
