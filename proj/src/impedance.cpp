#include "softarm/impedance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace softarm {

double HarmonicCoefficient::value(double t) const {
  return base + amplitude * std::sin(angular_frequency * t);
}

double HarmonicCoefficient::rate(double t) const {
  return amplitude * angular_frequency * std::cos(angular_frequency * t);
}

double HarmonicCoefficient::accel(double t) const {
  return -amplitude * angular_frequency * angular_frequency *
         std::sin(angular_frequency * t);
}

ImpedanceProfile ImpedanceProfile::variable() {
  ImpedanceProfile p;
  p.inertia = {15.0, 10.0, std::numbers::pi / 5.0};
  p.stiffness = {30.0, 20.0, std::numbers::pi / 2.0};
  p.damping_kind = DampingKind::kInertiaRateRule;
  return p;
}

ImpedanceProfile ImpedanceProfile::invariable() {
  ImpedanceProfile p;
  p.inertia = {15.0, 0.0, 0.0};
  p.stiffness = {30.0, 0.0, 0.0};
  p.damping_kind = DampingKind::kExplicitWave;
  p.damping = {20.0, 0.0, 0.0};
  return p;
}

ProfileScalars profile_scalars(const ImpedanceProfile& profile, double t,
                               double alpha) {
  ProfileScalars s{};
  s.inertia = profile.inertia.value(t);
  s.inertia_rate = profile.inertia.rate(t);
  s.inertia_accel = profile.inertia.accel(t);
  s.stiffness = profile.stiffness.value(t);
  s.stiffness_rate = profile.stiffness.rate(t);
  if (profile.damping_kind == DampingKind::kInertiaRateRule) {
    s.damping = s.inertia_rate + alpha * s.inertia;
    s.damping_rate = s.inertia_accel + alpha * s.inertia_rate;
  } else {
    s.damping = profile.damping.value(t);
    s.damping_rate = profile.damping.rate(t);
  }
  return s;
}

ProfileSample eval_profile_with_alpha(const ImpedanceProfile& profile,
                                      double t, double alpha) {
  const ProfileScalars s = profile_scalars(profile, t, alpha);
  const Matrix6d id = Matrix6d::Identity();
  ProfileSample out;
  out.inertia = s.inertia * id;
  out.inertia_rate = s.inertia_rate * id;
  out.inertia_accel = s.inertia_accel * id;
  out.damping = s.damping * id;
  out.damping_rate = s.damping_rate * id;
  out.stiffness = s.stiffness * id;
  out.stiffness_rate = s.stiffness_rate * id;
  return out;
}

ProfileSample eval_profile(const ImpedanceProfile& profile, double t) {
  if (profile.damping_kind == DampingKind::kInertiaRateRule &&
      !profile.has_alpha()) {
    throw std::domain_error(
        "eval_profile: damping rule needs a rate constant; certify the "
        "profile first");
  }
  return eval_profile_with_alpha(profile, t,
                                 profile.has_alpha() ? profile.alpha : 0.0);
}

std::vector<double> make_time_grid(double t0, double t1, double step) {
  if (!(t1 > t0) || !(step > 0.0)) {
    throw std::domain_error("make_time_grid: need t1 > t0 and step > 0");
  }
  const int n = std::max(1, static_cast<int>(std::lround((t1 - t0) / step)));
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid[i] = t0 + (t1 - t0) * static_cast<double>(i) / n;
  }
  return grid;
}

namespace {

struct ConstraintValues {
  double b, q, mu;
  double damping, inertia, stiffness;
};

ConstraintValues constraint_values(const ImpedanceProfile& profile, double t,
                                   double alpha) {
  const ProfileScalars s = profile_scalars(profile, t, alpha);
  ConstraintValues v{};
  v.b = s.inertia_rate + alpha * s.inertia - s.damping;
  v.q = (alpha * alpha + 2.0 * alpha) * s.inertia_rate -
        alpha * s.inertia_accel + alpha * s.damping_rate + s.stiffness_rate -
        2.0 * alpha * s.stiffness;
  v.mu = -alpha * alpha * s.inertia - alpha * s.inertia_rate + s.stiffness +
         alpha * s.damping;
  v.damping = s.damping;
  v.inertia = s.inertia;
  v.stiffness = s.stiffness;
  return v;
}

struct FeasibilityResult {
  bool ok = true;
  double worst_t = 0.0;
  double worst_value = 0.0;
  const char* what = "";
};

FeasibilityResult feasible(const ImpedanceProfile& profile, double alpha,
                           const std::vector<double>& grid) {
  constexpr double kTol = 1e-12;
  for (double t : grid) {
    const ConstraintValues v = constraint_values(profile, t, alpha);
    if (v.inertia <= 0.0 || v.stiffness <= 0.0 || v.damping <= 0.0) {
      return {false, t, std::min({v.inertia, v.stiffness, v.damping}),
              "profile matrices must stay positive definite"};
    }
    if (v.b > kTol) return {false, t, v.b, "damping-rate constraint violated"};
    if (v.q > kTol)
      return {false, t, v.q, "stiffness-rate constraint violated"};
    if (v.mu <= 0.0)
      return {false, t, v.mu, "certificate metric not positive definite"};
  }
  return {};
}

}  // namespace

double select_alpha(const ImpedanceProfile& profile,
                    const std::vector<double>& t_grid) {
  double cap = 64.0;
  if (profile.damping_kind == DampingKind::kExplicitWave) {
    // the damping constraint rearranges to an explicit upper bound
    double bound = std::numeric_limits<double>::infinity();
    double bound_t = t_grid.front();
    for (double t : t_grid) {
      const ProfileScalars s = profile_scalars(profile, t, 0.0);
      if (s.inertia <= 0.0) {
        throw CertificationError(
            "select_alpha: desired inertia must stay positive", t, s.inertia);
      }
      const double b = (s.damping - s.inertia_rate) / s.inertia;
      if (b < bound) {
        bound = b;
        bound_t = t;
      }
    }
    if (bound <= 0.0) {
      throw CertificationError(
          "select_alpha: damping-rate constraint infeasible for any positive "
          "rate constant",
          bound_t, bound);
    }
    cap = bound;
  }

  constexpr int kScanPoints = 256;
  int best = 0;
  FeasibilityResult last_failure;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double alpha = cap * static_cast<double>(i) / kScanPoints;
    const FeasibilityResult r = feasible(profile, alpha, t_grid);
    if (r.ok) {
      best = i;
    } else if (best == 0) {
      last_failure = r;
    }
  }
  if (best == 0) {
    throw CertificationError(
        std::string("select_alpha: no feasible rate constant (") +
            last_failure.what + ")",
        last_failure.worst_t, last_failure.worst_value);
  }
  if (best == kScanPoints) {
    return cap;
  }

  double lo = cap * static_cast<double>(best) / kScanPoints;
  double hi = cap * static_cast<double>(best + 1) / kScanPoints;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(profile, mid, t_grid).ok) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

StabilityReport check_stability(const ImpedanceProfile& profile, double alpha,
                                const std::vector<double>& t_grid) {
  StabilityReport report;
  report.alpha = alpha;
  report.samples.reserve(t_grid.size());
  report.b_margin = -std::numeric_limits<double>::infinity();
  report.q_margin = -std::numeric_limits<double>::infinity();
  report.mu_min = std::numeric_limits<double>::infinity();

  Eigen::SelfAdjointEigenSolver<Matrix6d> es;
  for (double t : t_grid) {
    const ProfileSample s = eval_profile_with_alpha(profile, t, alpha);
    const Matrix6d b_mat = s.inertia_rate + alpha * s.inertia - s.damping;
    const Matrix6d q_mat = (alpha * alpha + 2.0 * alpha) * s.inertia_rate -
                           alpha * s.inertia_accel + alpha * s.damping_rate +
                           s.stiffness_rate - 2.0 * alpha * s.stiffness;
    const Matrix6d mu_mat = -alpha * alpha * s.inertia -
                            alpha * s.inertia_rate + s.stiffness +
                            alpha * s.damping;

    StabilitySample sample{};
    sample.t = t;
    es.compute(b_mat, Eigen::EigenvaluesOnly);
    sample.b_max = es.eigenvalues().maxCoeff();
    es.compute(q_mat, Eigen::EigenvaluesOnly);
    sample.q_max = es.eigenvalues().maxCoeff();
    es.compute(mu_mat, Eigen::EigenvaluesOnly);
    sample.mu_min = es.eigenvalues().minCoeff();
    es.compute(s.stiffness_rate, Eigen::EigenvaluesOnly);
    sample.k_rate_max = es.eigenvalues().maxCoeff();

    es.compute(s.stiffness, Eigen::EigenvaluesOnly);
    const double k_min = es.eigenvalues().minCoeff();
    es.compute(s.damping_rate, Eigen::EigenvaluesOnly);
    const double c_rate_max = es.eigenvalues().maxCoeff();
    es.compute(s.inertia_accel, Eigen::EigenvaluesOnly);
    const double m_accel_min = es.eigenvalues().minCoeff();
    es.compute(s.inertia_rate, Eigen::EigenvaluesOnly);
    const double m_rate_max = es.eigenvalues().maxCoeff();
    sample.k_rate_bound = 2.0 * alpha * k_min - alpha * c_rate_max +
                          alpha * m_accel_min -
                          (alpha * alpha + 2.0 * alpha) * m_rate_max;

    if (sample.b_max > report.b_margin) {
      report.b_margin = sample.b_max;
      report.b_margin_time = t;
    }
    if (sample.q_max > report.q_margin) {
      report.q_margin = sample.q_max;
      report.q_margin_time = t;
    }
    if (sample.mu_min < report.mu_min) {
      report.mu_min = sample.mu_min;
      report.mu_min_time = t;
    }
    report.samples.push_back(sample);
  }
  report.pass = report.b_margin <= 1e-12 && report.q_margin <= 1e-12 &&
                report.mu_min > 0.0;
  return report;
}

ImpedanceCertificate lyapunov_certificate(const Vector6d& xi,
                                          const Vector6d& xi_dot,
                                          const ImpedanceProfile& profile,
                                          double alpha, double t) {
  const ProfileSample s = eval_profile_with_alpha(profile, t, alpha);
  const Matrix6d mu_mat = -alpha * alpha * s.inertia - alpha * s.inertia_rate +
                          s.stiffness + alpha * s.damping;
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(mu_mat, Eigen::EigenvaluesOnly);
  const double mu_min = es.eigenvalues().minCoeff();
  if (mu_min <= 0.0) {
    throw CertificationError(
        "lyapunov_certificate: certificate metric not positive definite", t,
        mu_min);
  }
  const Matrix6d b_mat = s.inertia_rate + alpha * s.inertia - s.damping;
  const Matrix6d q_mat = (alpha * alpha + 2.0 * alpha) * s.inertia_rate -
                         alpha * s.inertia_accel + alpha * s.damping_rate +
                         s.stiffness_rate - 2.0 * alpha * s.stiffness;
  const Vector6d y = xi_dot + alpha * xi;
  ImpedanceCertificate out;
  out.value = 0.5 * (y.dot(s.inertia * y) + xi.dot(mu_mat * xi));
  out.derivative = xi_dot.dot(b_mat * xi_dot) + 0.5 * xi.dot(q_mat * xi);
  return out;
}

ConfigurationImpedance map_to_configuration(const ProfileSample& sample,
                                            const Matrix64d& jac,
                                            const Matrix64d& jac_dot,
                                            const Vector6d& f_ext) {
  ConfigurationImpedance out;
  out.inertia = jac.transpose() * sample.inertia * jac;
  out.damping = jac.transpose() * sample.inertia * jac_dot +
                jac.transpose() * sample.damping * jac;
  out.stiffness = jac.transpose() * sample.stiffness * jac;
  out.external_torque = jac.transpose() * f_ext;
  return out;
}

Eigen::Vector4d admittance_accel(const ConfigurationImpedance& imp,
                                 const Vector4d& ref, const Vector4d& ref_dot,
                                 const Vector4d& target,
                                 const Vector4d& tau_ext) {
  const Eigen::Vector4d rhs =
      tau_ext - imp.damping * ref_dot - imp.stiffness * (ref - target);
  return imp.inertia.llt().solve(rhs);
}

void compliant_reference_step(const ConfigurationImpedance& imp,
                              Vector4d& ref, Vector4d& ref_dot,
                              const Vector4d& target, const Vector4d& tau_ext,
                              double dt) {
  const auto accel = [&](const Vector4d& x, const Vector4d& v) {
    return admittance_accel(imp, x, v, target, tau_ext);
  };
  const Vector4d k1x = ref_dot;
  const Vector4d k1v = accel(ref, ref_dot);
  const Vector4d k2x = ref_dot + 0.5 * dt * k1v;
  const Vector4d k2v = accel(ref + 0.5 * dt * k1x, k2x);
  const Vector4d k3x = ref_dot + 0.5 * dt * k2v;
  const Vector4d k3v = accel(ref + 0.5 * dt * k2x, k3x);
  const Vector4d k4x = ref_dot + dt * k3v;
  const Vector4d k4v = accel(ref + dt * k3x, k4x);
  ref += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  ref_dot += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

}  // namespace softarm
