#include <doctest.h>

#include <cmath>
#include <random>

#include "softarm/dynamics.hpp"
#include "softarm/simulation.hpp"

using namespace softarm;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Vector4d random_config(std::mt19937& rng) {
  std::uniform_real_distribution<double> k(0.1, 5.0);
  std::uniform_real_distribution<double> a(-2.5, 2.5);
  return Vector4d{k(rng), a(rng), k(rng), a(rng)};
}

Vector4d random_rates(std::mt19937& rng) {
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  return Vector4d{v(rng), v(rng), v(rng), v(rng)};
}

/// Directional finite difference of the inertia matrix along the motion.
Matrix4d inertia_rate_fd(const Vector4d& config, const Vector4d& rates,
                         const RobotParams& params, double step = 1e-6) {
  return (mass_matrix(config + step * rates, params) -
          mass_matrix(config - step * rates, params)) /
         (2.0 * step);
}

}  // namespace

TEST_CASE("potential energy: straight pose carries only gravity") {
  const RobotParams params;
  const double u = potential_energy(Vector4d::Zero(), params);
  // mass points at z = 0.15 and z = 0.30
  CHECK(u == doctest::Approx(-0.25 * 9.81 * 0.45).epsilon(1e-12));
}

TEST_CASE("potential energy: torsion term of a tilted bend plane") {
  const RobotParams params;
  Vector4d config = Vector4d::Zero();
  config[1] = 0.1;
  const double u = potential_energy(config, params);
  const double u0 = potential_energy(Vector4d::Zero(), params);
  // curvature is zero, so gravity is unchanged and only 0.5*k_phi*phi^2 adds
  CHECK(u - u0 == doctest::Approx(0.5 * 1.0 * 0.01).epsilon(1e-12));
}

TEST_CASE("potential energy: bending term is quadratic in curvature") {
  const RobotParams params;
  const auto elastic_part = [&](const Vector4d& config) {
    const MassPointKinematics mp = mass_point_kinematics(config, params);
    const double gravity = -params.gravity * (params.mass[0] * mp.p1.z() +
                                              params.mass[1] * mp.p2.z());
    return potential_energy(config, params) - gravity;
  };
  Vector4d config = Vector4d::Zero();
  config[0] = 0.8;
  Vector4d doubled = Vector4d::Zero();
  doubled[0] = 1.6;
  CHECK(elastic_part(doubled) ==
        doctest::Approx(4.0 * elastic_part(config)).epsilon(1e-12));
}

TEST_CASE("kinetic energy: zero at rest and quadratic in the rates") {
  const RobotParams params;
  std::mt19937 rng(31);
  const Vector4d config = random_config(rng);
  CHECK(kinetic_energy(config, Vector4d::Zero(), params) == 0.0);

  const Vector4d rates = random_rates(rng);
  const double t1 = kinetic_energy(config, rates, params);
  const double t3 = kinetic_energy(config, 3.0 * rates, params);
  CHECK(t3 == doctest::Approx(9.0 * t1).epsilon(1e-12));
}

TEST_CASE("kinetic energy: pure plane-angle spin at the straight pose") {
  const RobotParams params;
  Vector4d rates = Vector4d::Zero();
  rates[1] = 1.0;
  const double t = kinetic_energy(Vector4d::Zero(), rates, params);
  CHECK(t >= 0.5 * 9e-4 - 1e-15);
  // the mass points do not move with the bend plane when straight
  CHECK(t == doctest::Approx(0.5 * 9e-4).epsilon(1e-12));
}

TEST_CASE("mass matrix: symmetric positive definite quadratic form") {
  const RobotParams params;
  std::mt19937 rng(37);
  for (int i = 0; i < 50; ++i) {
    const Vector4d config = random_config(rng);
    const Matrix4d m = mass_matrix(config, params);
    CHECK(max_abs(m - m.transpose()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix4d> es(m, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // plane-angle diagonal never drops below the torsional inertia
    CHECK(m(1, 1) >= params.torsion_inertia - 1e-15);
    CHECK(m(3, 3) >= params.torsion_inertia - 1e-15);

    const Vector4d rates = random_rates(rng);
    const double t = kinetic_energy(config, rates, params);
    CHECK(std::abs(0.5 * rates.dot(m * rates) - t) < 1e-10);
  }
}

TEST_CASE("mass matrix partials: analytic equals finite differences") {
  const RobotParams params;
  std::mt19937 rng(41);
  for (int i = 0; i < 25; ++i) {
    const Vector4d config = random_config(rng);
    const auto analytic = mass_matrix_partials(config, params);
    const auto fd = mass_matrix_partials_fd(config, params);
    for (int m = 0; m < 4; ++m) {
      CHECK(max_abs(analytic[m] - fd[m]) < 1e-8);
    }
  }
}

TEST_CASE("coriolis matrix: vanishes at rest, linear in the rates") {
  const RobotParams params;
  std::mt19937 rng(43);
  const Vector4d config = random_config(rng);
  CHECK(max_abs(coriolis_matrix(config, Vector4d::Zero(), params)) == 0.0);
  const Vector4d rates = random_rates(rng);
  const Matrix4d c1 = coriolis_matrix(config, rates, params);
  const Matrix4d c2 = coriolis_matrix(config, 2.0 * rates, params);
  CHECK(max_abs(c2 - 2.0 * c1) < 1e-12);
}

TEST_CASE("coriolis matrix: dM/dt - 2C is skew symmetric") {
  const RobotParams params;
  std::mt19937 rng(47);
  for (int i = 0; i < 50; ++i) {
    const Vector4d config = random_config(rng);
    const Vector4d rates = random_rates(rng);
    const Matrix4d m_rate = inertia_rate_fd(config, rates, params);
    const Matrix4d c = coriolis_matrix(config, rates, params);
    const Matrix4d skew = m_rate - 2.0 * c;
    for (int j = 0; j < 10; ++j) {
      const Vector4d v = random_rates(rng);
      CHECK(std::abs(v.dot(skew * v)) < 1e-8);
    }
    CHECK(max_abs(m_rate - (c + c.transpose())) < 1e-8);
  }
}

TEST_CASE("conservative vector: zero at the straight rest pose") {
  const RobotParams params;
  const Eigen::Vector4d n = conservative_vector(Vector4d::Zero(), params);
  CHECK(max_abs(n) < 1e-15);
}

TEST_CASE("conservative vector: torsion spring gradient") {
  const RobotParams params;
  Vector4d config = Vector4d::Zero();
  config[1] = 0.1;
  const Eigen::Vector4d n = conservative_vector(config, params);
  CHECK(n[1] == doctest::Approx(1.0 * 0.1).epsilon(1e-12));
}

TEST_CASE("conservative vector: matches the potential gradient") {
  const RobotParams params;
  std::mt19937 rng(53);
  const double h = 1e-6;
  for (int i = 0; i < 25; ++i) {
    const Vector4d config = random_config(rng);
    const Eigen::Vector4d n = conservative_vector(config, params);
    for (int m = 0; m < 4; ++m) {
      Vector4d hi = config, lo = config;
      hi[m] += h;
      lo[m] -= h;
      const double fd = (potential_energy(hi, params) -
                         potential_energy(lo, params)) /
                        (2.0 * h);
      CHECK(std::abs(n[m] - fd) < 1e-6);
    }
  }
}

TEST_CASE("forward dynamics: equilibrium forcing stops the motion") {
  const RobotParams params;
  std::mt19937 rng(59);
  const Vector4d config = random_config(rng);
  const Vector4d rates = random_rates(rng);
  const Vector4d tau_e = random_rates(rng) * 0.1;
  const DynamicsTerms terms = dynamics_terms(config, rates, params);
  const Vector4d tau_c =
      terms.coriolis * rates + terms.conservative - tau_e;
  const Vector4d ddq = forward_dynamics(config, rates, tau_c, tau_e, params);
  CHECK(max_abs(ddq) < 1e-10);
}

TEST_CASE("forward dynamics: unit curvature torque against a dense solve") {
  const RobotParams params;
  const Vector4d zero = Vector4d::Zero();
  Vector4d tau_c = Vector4d::Zero();
  tau_c[0] = 1.0;
  const Vector4d ddq = forward_dynamics(zero, zero, tau_c, zero, params);
  // independent route: full-pivot LU on the same system
  const Matrix4d m = mass_matrix(zero, params);
  const Vector4d want = m.fullPivLu().solve(tau_c);
  CHECK(max_abs(ddq - want) < 1e-12);
}

TEST_CASE("forward dynamics: rejects non-finite inputs") {
  const RobotParams params;
  Vector4d bad = Vector4d::Zero();
  bad[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward_dynamics(bad, Vector4d::Zero(), Vector4d::Zero(),
                                   Vector4d::Zero(), params),
                  std::domain_error);
}

TEST_CASE("free response conserves total energy") {
  const RobotParams params;
  using State = Eigen::Matrix<double, 8, 1>;
  State y;
  y << 0.8, 0.3, 0.5, -0.4, 0.5, -0.2, 0.3, 0.1;
  const auto f = [&](double, const State& s) {
    State dy;
    dy.head<4>() = s.tail<4>();
    dy.tail<4>() = forward_dynamics(s.head<4>(), s.tail<4>(),
                                    Vector4d::Zero(), Vector4d::Zero(),
                                    params);
    return dy;
  };
  const double h0 = kinetic_energy(y.head<4>(), y.tail<4>(), params) +
                    potential_energy(y.head<4>(), params);
  const double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    y = rk4_step(y, i * dt, dt, f);
  }
  const double h1 = kinetic_energy(y.head<4>(), y.tail<4>(), params) +
                    potential_energy(y.head<4>(), params);
  CHECK(std::abs(h1 - h0) / std::abs(h0) < 1e-6);
}

TEST_CASE("perturb_params scales the dynamic constants only") {
  const RobotParams nominal;
  const RobotParams same = perturb_params(nominal, 0.0);
  CHECK(same.mass[0] == nominal.mass[0]);
  CHECK(same.bending_stiffness == nominal.bending_stiffness);

  const RobotParams ten = perturb_params(nominal, 0.10);
  CHECK(ten.mass[0] == doctest::Approx(0.275).epsilon(1e-15));
  CHECK(ten.disk_radius == nominal.disk_radius);
  CHECK(ten.arc_length[0] == nominal.arc_length[0]);

  const RobotParams quarter = perturb_params(nominal, 0.25);
  CHECK(quarter.mass[0] == doctest::Approx(0.3125).epsilon(1e-15));
  CHECK(quarter.torsion_inertia ==
        doctest::Approx(1.25 * 9e-4).epsilon(1e-15));

  CHECK_THROWS_AS(perturb_params(nominal, 1.0), std::domain_error);
  CHECK_THROWS_AS(perturb_params(nominal, -0.1), std::domain_error);
}

TEST_CASE("dynamics_terms bundles the individual operations") {
  const RobotParams params;
  std::mt19937 rng(61);
  const Vector4d config = random_config(rng);
  const Vector4d rates = random_rates(rng);
  const DynamicsTerms terms = dynamics_terms(config, rates, params);
  CHECK(max_abs(terms.inertia - mass_matrix(config, params)) < 1e-14);
  CHECK(max_abs(terms.coriolis - coriolis_matrix(config, rates, params)) <
        1e-14);
  CHECK(max_abs(terms.conservative - conservative_vector(config, params)) <
        1e-14);
}
