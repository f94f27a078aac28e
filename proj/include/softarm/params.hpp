#pragma once

#include <array>
#include <stdexcept>

namespace softarm {

/// Physical constants of the two-segment arm. Defaults are the desk-scale
/// prototype values; all quantities in SI units.
struct RobotParams {
  double disk_radius = 0.03;                    // m, disk center to cable line
  std::array<double, 2> arc_length = {0.15, 0.15};  // m, per segment
  std::array<double, 2> mass = {0.25, 0.25};    // kg, lumped per segment
  double bending_stiffness = 0.5;               // N*m, k_psi
  double torsion_stiffness = 1.0;               // N*m, k_phi
  double bending_inertia = 4.5e-3;              // kg*m^2, J_psi
  double torsion_inertia = 9e-4;                // kg*m^2, J_phi
  double gravity = 9.81;                        // m/s^2, acts along -z

  void validate() const {
    auto positive = [](double v) { return v > 0.0; };
    if (!positive(disk_radius) || !positive(arc_length[0]) ||
        !positive(arc_length[1]) || !positive(mass[0]) || !positive(mass[1]) ||
        !positive(bending_stiffness) || !positive(torsion_stiffness) ||
        !positive(bending_inertia) || !positive(torsion_inertia) ||
        !positive(gravity)) {
      throw std::domain_error("RobotParams: all parameters must be positive");
    }
  }
};

/// "True plant" parameters for uncertainty studies: masses, stiffnesses and
/// inertias scaled by (1 + fraction), geometry untouched. The controller keeps
/// the nominal set, so the mismatch shows up as an implicit lumped-uncertainty
/// term.
inline RobotParams perturb_params(const RobotParams& nominal, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0) {
    throw std::domain_error("perturb_params: fraction must be in [0, 1)");
  }
  RobotParams out = nominal;
  const double scale = 1.0 + fraction;
  out.mass[0] *= scale;
  out.mass[1] *= scale;
  out.bending_stiffness *= scale;
  out.torsion_stiffness *= scale;
  out.bending_inertia *= scale;
  out.torsion_inertia *= scale;
  return out;
}

}  // namespace softarm
