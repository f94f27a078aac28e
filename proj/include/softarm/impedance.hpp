#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "softarm/kinematics.hpp"

namespace softarm {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Scalar profile channel base + amplitude * sin(angular_frequency * t).
struct HarmonicCoefficient {
  double base = 0.0;
  double amplitude = 0.0;
  double angular_frequency = 0.0;

  double value(double t) const;
  double rate(double t) const;
  double accel(double t) const;
};

/// How the desired damping channel is defined.
enum class DampingKind {
  kExplicitWave,     // its own harmonic coefficient
  kInertiaRateRule,  // damping = d(inertia)/dt + alpha * inertia
};

/// Time-varying desired impedance: inertia/damping/stiffness as scalar
/// multiples of the 6x6 identity, plus the certified rate constant alpha.
struct ImpedanceProfile {
  HarmonicCoefficient inertia;
  HarmonicCoefficient stiffness;
  DampingKind damping_kind = DampingKind::kExplicitWave;
  HarmonicCoefficient damping;
  double alpha = std::numeric_limits<double>::quiet_NaN();  // unset until certified

  bool has_alpha() const { return std::isfinite(alpha); }

  /// Sinusoidal inertia/stiffness with rule-defined damping.
  static ImpedanceProfile variable();
  /// Constant 15/20/30 diagonal profile.
  static ImpedanceProfile invariable();
};

/// Scalar values of all channels and the derivatives needed by the
/// stability constraints, at one time instant and rate constant.
struct ProfileScalars {
  double inertia, inertia_rate, inertia_accel;
  double damping, damping_rate;
  double stiffness, stiffness_rate;
};

ProfileScalars profile_scalars(const ImpedanceProfile& profile, double t,
                               double alpha);

/// Matrix-valued sample (scalar * identity for the profiles built here).
struct ProfileSample {
  Matrix6d inertia, inertia_rate, inertia_accel;
  Matrix6d damping, damping_rate;
  Matrix6d stiffness, stiffness_rate;
};

/// Evaluate the profile using its stored alpha; throws std::domain_error if
/// the damping rule needs an alpha that was never set.
ProfileSample eval_profile(const ImpedanceProfile& profile, double t);
ProfileSample eval_profile_with_alpha(const ImpedanceProfile& profile,
                                      double t, double alpha);

class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& msg, double time, double eigenvalue)
      : std::runtime_error(msg), time(time), eigenvalue(eigenvalue) {}
  double time;
  double eigenvalue;
};

/// Uniformly spaced grid over [t0, t1] including both endpoints.
std::vector<double> make_time_grid(double t0, double t1, double step);

/// Largest rate constant for which both decay constraints hold and the
/// certificate metric stays positive definite at every grid sample. Found by
/// a feasibility scan plus bisection, so it also covers profiles whose
/// damping is itself defined through alpha. Throws CertificationError when
/// no feasible alpha exists.
double select_alpha(const ImpedanceProfile& profile,
                    const std::vector<double>& t_grid);

struct StabilitySample {
  double t;
  double b_max;         // max eig of  dM + alpha*M - C
  double q_max;         // max eig of the stiffness-rate constraint matrix
  double mu_min;        // min eig of  -alpha^2*M - alpha*dM + K + alpha*C
  double k_rate_max;    // max eig of dK
  double k_rate_bound;  // sufficient upper bound for max eig of dK
};

struct StabilityReport {
  double alpha = 0.0;
  bool pass = false;
  double b_margin = 0.0;  // most positive b_max over the grid
  double q_margin = 0.0;
  double mu_min = 0.0;    // least mu_min over the grid
  double b_margin_time = 0.0, q_margin_time = 0.0, mu_min_time = 0.0;
  std::vector<StabilitySample> samples;
};

/// Evaluate both constraint matrices and the certificate metric over the
/// grid with a symmetric eigensolver. Pass requires both margins <= 0
/// (within 1e-12) and a positive-definite metric at every sample.
StabilityReport check_stability(const ImpedanceProfile& profile, double alpha,
                                const std::vector<double>& t_grid);

struct ImpedanceCertificate {
  double value = 0.0;
  double derivative = 0.0;
};

/// Certificate V = 0.5*(Y' M Y + Xi' mu Xi) with Y = dXi + alpha*Xi and its
/// time derivative along the unforced impedance dynamics. Throws
/// CertificationError when mu is not positive definite.
ImpedanceCertificate lyapunov_certificate(const Vector6d& xi,
                                          const Vector6d& xi_dot,
                                          const ImpedanceProfile& profile,
                                          double alpha, double t);

/// Congruence-mapped impedance ready for the configuration-space admittance
/// loop.
struct ConfigurationImpedance {
  Matrix4d inertia = Matrix4d::Identity();
  Matrix4d damping = Matrix4d::Zero();
  Matrix4d stiffness = Matrix4d::Zero();
  Eigen::Vector4d external_torque = Eigen::Vector4d::Zero();
};

ConfigurationImpedance map_to_configuration(const ProfileSample& sample,
                                            const Matrix64d& jac,
                                            const Matrix64d& jac_dot,
                                            const Vector6d& f_ext);

/// Right-hand side of the admittance dynamics
///   M_c * ddq_ref = tau_ext - C_c * dq_ref - K_c * (q_ref - target).
/// The inertia must already be regularized to be invertible.
Eigen::Vector4d admittance_accel(const ConfigurationImpedance& imp,
                                 const Vector4d& ref, const Vector4d& ref_dot,
                                 const Vector4d& target,
                                 const Vector4d& tau_ext);

/// Advance the compliant reference one step (classical RK4 with the
/// impedance matrices held constant across the step).
void compliant_reference_step(const ConfigurationImpedance& imp,
                              Vector4d& ref, Vector4d& ref_dot,
                              const Vector4d& target, const Vector4d& tau_ext,
                              double dt);

}  // namespace softarm
