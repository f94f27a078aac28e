#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "softarm/metrics.hpp"
#include "softarm/scenario.hpp"

namespace softarm {

class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& msg, double time)
      : std::runtime_error(msg + " at t = " + std::to_string(time)),
        time(time) {}
  double time;
};

/// Classical 4th-order Runge-Kutta step; f(t, y) -> dy/dt. Throws
/// SimulationError if any stage derivative is non-finite.
template <class Vec, class F>
Vec rk4_step(const Vec& y, double t, double dt, F&& f) {
  const auto check = [&](const Vec& k) {
    if (!k.allFinite()) {
      throw SimulationError("non-finite derivative", t);
    }
    return k;
  };
  const Vec k1 = check(f(t, y));
  const Vec k2 = check(f(t + 0.5 * dt, Vec(y + 0.5 * dt * k1)));
  const Vec k3 = check(f(t + 0.5 * dt, Vec(y + 0.5 * dt * k2)));
  const Vec k4 = check(f(t + dt, Vec(y + dt * k3)));
  return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One sampled row of the closed-loop trace (written every dt).
struct Record {
  double t = 0.0;
  Vector4d config = Vector4d::Zero();
  Vector4d rates = Vector4d::Zero();
  Vector4d e_p = Vector4d::Zero();        // error against the tracked reference
  Vector4d s = Vector4d::Zero();          // sliding surface
  Vector4d tau_c = Vector4d::Zero();      // commanded torque
  Vector4d residual = Vector4d::Zero();   // estimated external torque
  double v3_dot_bound = 0.0;              // stability-trace sample
  Eigen::Matrix<double, 6, 1> cables = Eigen::Matrix<double, 6, 1>::Zero();
  Vector6d task_error = Vector6d::Zero(); // task pose minus target pose
};

struct SimulationResult {
  std::vector<Record> records;
  MetricsSummary metrics;
  /// Certified impedance rate constant (NaN when the outer loop is off).
  double certified_alpha = std::numeric_limits<double>::quiet_NaN();
};

/// Run the scenario's closed loop: momentum observer -> admittance reference
/// -> tracking controller (+ adaptation) -> plant, integrated together at
/// dt / substeps and sampled every dt. Deterministic for a given scenario.
SimulationResult run_scenario(const SimulationScenario& scenario);

std::string csv_header();
std::string records_to_csv(const std::vector<Record>& records);
void write_csv_file(const std::vector<Record>& records,
                    const std::string& path);

}  // namespace softarm
