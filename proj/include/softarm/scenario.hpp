#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "softarm/controllers.hpp"
#include "softarm/kinematics.hpp"
#include "softarm/params.hpp"

namespace softarm {

enum class ControllerKind { kAbsm, kSm, kPd, kNone };
enum class ImpedanceMode { kVariable, kInvariable, kOff };

std::string to_string(ControllerKind kind);
std::string to_string(ImpedanceMode mode);
ControllerKind controller_from_string(const std::string& name);
ImpedanceMode impedance_mode_from_string(const std::string& name);

/// One rectangular task-space wrench pulse, active on [start, end).
struct ForcePulse {
  double start = 0.0;
  double end = 0.0;
  Vector6d wrench = Vector6d::Zero();
};

/// Sum of all pulses active at time t.
Vector6d force_at(const std::vector<ForcePulse>& schedule, double t);

/// Three pulses inside [2 s, 8 s]; the first one maps to about 0.12 N*m on
/// the curvature coordinates at the straight pose.
std::vector<ForcePulse> default_force_schedule();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full description of one closed-loop run. Values are chosen so that the
/// default-constructed scenario is the reference regulation case.
struct SimulationScenario {
  std::string id = "default";
  double duration = 10.0;  // s
  double dt = 1e-3;        // record / metric interval, s
  /// Fine integration substeps per dt. The adaptation loop couples the
  /// sliding surface to the uncertainty estimate through the inverse
  /// inertia, which puts closed-loop modes near 2e5 rad/s at desk scale;
  /// the default keeps the explicit integrator inside its stability region.
  int substeps = 100;
  ControllerKind controller = ControllerKind::kAbsm;
  ImpedanceMode impedance_mode = ImpedanceMode::kVariable;
  double uncertainty_fraction = 0.0;
  Vector4d initial_config{0.02, -0.01, 0.01, -0.03};
  Vector4d initial_rates = Vector4d::Zero();
  Vector4d target = Vector4d::Zero();
  std::vector<ForcePulse> force_schedule = default_force_schedule();
  double estimator_gain = 100.0;
  bool feed_ground_truth_load = false;  // bypass the observer (ablation)
  bool estimator_true_params = false;   // observer sees the true plant model
  double admittance_ridge = 1e-3;       // relative regularization, see docs
  unsigned seed = 0;                    // for randomized scenario generators
  AbsmParams absm;
  PdParams pd;
  RobotParams robot;

  /// Throws ConfigError when any invariant is violated.
  void validate() const;
};

SimulationScenario scenario_from_json_text(const std::string& text);
SimulationScenario scenario_from_json_file(const std::string& path);
std::string scenario_to_json_text(const SimulationScenario& scenario);

}  // namespace softarm
