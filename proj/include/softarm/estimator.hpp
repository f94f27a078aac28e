#pragma once

#include <Eigen/Dense>
#include <vector>

#include "softarm/params.hpp"
#include "softarm/kinematics.hpp"

namespace softarm {

/// Momentum-based external-load observer in configuration space. The
/// residual tracks the generalized external torque like a first-order lag
/// with rate constant equal to the gain:
///   r = gain * (P - integral(tau_c - N + r) - P(0)),  P = M * dq,
/// where the velocity-product term of the momentum rate is deliberately
/// dropped (slow-motion approximation). The running integral uses the
/// trapezoidal rule with the residual's own contribution handled
/// implicitly, which keeps the discrete loop stable for any gain * dt.
class LoadEstimator {
 public:
  /// Model params are whatever the caller can compute with (typically the
  /// nominal set). Throws std::domain_error unless gain > 0.
  LoadEstimator(const Vector4d& config0, const Vector4d& rates0,
                const RobotParams& params, double gain);

  /// Advance with the plant's post-step state and the torque command that
  /// was active over the step.
  void update(const Vector4d& config, const Vector4d& rates,
              const Vector4d& tau_c, double dt);

  const Eigen::Vector4d& residual() const { return residual_; }
  const Eigen::Vector4d& initial_momentum() const { return momentum0_; }
  double gain() const { return gain_; }

 private:
  RobotParams params_;
  double gain_;
  Eigen::Vector4d momentum0_;
  Eigen::Vector4d integral_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d residual_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d integrand_prev_ = Eigen::Vector4d::Zero();
  bool has_prev_ = false;
};

/// Closed-form first-order step response r(t) = tau_e * (1 - exp(-gain*t));
/// test oracle for the discrete observer.
Eigen::Vector4d residual_reference(const Vector4d& tau_e, double gain,
                                   double t);

struct StepResponseSample {
  double t;
  Eigen::Vector4d residual;
};

/// Drive the observer on a servoed (held static) configuration under a
/// constant external load stepping on at t = 0: the holding torque is
/// N(config) - tau_e and the state never moves.
std::vector<StepResponseSample> static_step_response(
    const Vector4d& config, const Vector4d& tau_e, double gain, double dt,
    double duration, const RobotParams& params);

}  // namespace softarm
