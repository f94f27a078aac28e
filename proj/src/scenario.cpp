#include "softarm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace softarm {

using nlohmann::json;

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kAbsm: return "absm";
    case ControllerKind::kSm: return "sm";
    case ControllerKind::kPd: return "pd";
    case ControllerKind::kNone: return "none";
  }
  return "absm";
}

std::string to_string(ImpedanceMode mode) {
  switch (mode) {
    case ImpedanceMode::kVariable: return "variable";
    case ImpedanceMode::kInvariable: return "invariable";
    case ImpedanceMode::kOff: return "off";
  }
  return "variable";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "absm") return ControllerKind::kAbsm;
  if (name == "sm") return ControllerKind::kSm;
  if (name == "pd") return ControllerKind::kPd;
  if (name == "none") return ControllerKind::kNone;
  throw ConfigError("unknown controller '" + name +
                    "' (expected absm|sm|pd|none)");
}

ImpedanceMode impedance_mode_from_string(const std::string& name) {
  if (name == "variable") return ImpedanceMode::kVariable;
  if (name == "invariable") return ImpedanceMode::kInvariable;
  if (name == "off") return ImpedanceMode::kOff;
  throw ConfigError("unknown impedance mode '" + name +
                    "' (expected variable|invariable|off)");
}

Vector6d force_at(const std::vector<ForcePulse>& schedule, double t) {
  Vector6d f = Vector6d::Zero();
  for (const ForcePulse& pulse : schedule) {
    if (t >= pulse.start && t < pulse.end) {
      f += pulse.wrench;
    }
  }
  return f;
}

std::vector<ForcePulse> default_force_schedule() {
  std::vector<ForcePulse> pulses(3);
  pulses[0].start = 2.0;
  pulses[0].end = 3.0;
  pulses[0].wrench << 10.67, 0.0, 0.0, 0.0, 0.0, 0.0;
  pulses[1].start = 4.5;
  pulses[1].end = 5.5;
  pulses[1].wrench << -8.0, 0.0, 4.0, 0.0, 0.0, 0.0;
  pulses[2].start = 7.0;
  pulses[2].end = 8.0;
  pulses[2].wrench << 7.5, 2.5, 0.0, 0.0, 0.0, 0.0;
  return pulses;
}

void SimulationScenario::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= dt)) throw ConfigError("duration must be at least dt");
  if (substeps < 1) throw ConfigError("substeps must be at least 1");
  if (!(estimator_gain > 0.0)) throw ConfigError("estimator gain must be positive");
  if (estimator_gain * dt > 1.0) {
    throw ConfigError("estimator gain * dt must not exceed 1");
  }
  if (uncertainty_fraction < 0.0 || uncertainty_fraction >= 1.0) {
    throw ConfigError("uncertainty fraction must be in [0, 1)");
  }
  if (admittance_ridge < 0.0) {
    throw ConfigError("admittance ridge must be non-negative");
  }
  for (const ForcePulse& p : force_schedule) {
    if (!(p.start >= 0.0) || !(p.end > p.start) || !(p.end <= duration)) {
      throw ConfigError("force pulses must satisfy 0 <= start < end <= duration");
    }
  }
  for (int seg = 0; seg < 2; ++seg) {
    const double curvature = initial_config[2 * seg];
    const double angle = initial_config[2 * seg + 1];
    if (curvature < 0.0) {
      throw ConfigError("initial curvature must be non-negative");
    }
    if (curvature * robot.arc_length[seg] >= 2.0 * std::numbers::pi) {
      throw ConfigError("initial bend angle must stay below a full turn");
    }
    if (angle <= -std::numbers::pi || angle > std::numbers::pi) {
      throw ConfigError("initial plane angle must lie in (-pi, pi]");
    }
  }
  try {
    absm.validate();
    pd.validate();
    robot.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

namespace {

template <int N>
Eigen::Matrix<double, N, 1> vector_from_json(const json& j,
                                             const char* field) {
  if (!j.is_array() || j.size() != N) {
    throw ConfigError(std::string(field) + " must be an array of " +
                      std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = j.at(i).get<double>();
  return v;
}

template <class T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SimulationScenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid scenario JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario JSON must be an object");
  if (j.contains("schema") && j.at("schema").get<int>() != 1) {
    throw ConfigError("unsupported scenario schema version");
  }

  SimulationScenario s;
  try {
    maybe_get(j, "id", s.id);
    maybe_get(j, "duration", s.duration);
    maybe_get(j, "dt", s.dt);
    maybe_get(j, "substeps", s.substeps);
    if (j.contains("controller")) {
      s.controller = controller_from_string(j.at("controller").get<std::string>());
    }
    if (j.contains("impedance")) {
      s.impedance_mode =
          impedance_mode_from_string(j.at("impedance").get<std::string>());
    }
    maybe_get(j, "uncertainty_fraction", s.uncertainty_fraction);
    if (j.contains("initial_config")) {
      s.initial_config = vector_from_json<4>(j.at("initial_config"), "initial_config");
    }
    if (j.contains("initial_rates")) {
      s.initial_rates = vector_from_json<4>(j.at("initial_rates"), "initial_rates");
    }
    if (j.contains("target")) {
      s.target = vector_from_json<4>(j.at("target"), "target");
    }
    if (j.contains("force_schedule")) {
      s.force_schedule.clear();
      for (const json& jp : j.at("force_schedule")) {
        ForcePulse p;
        p.start = jp.at("start").get<double>();
        p.end = jp.at("end").get<double>();
        p.wrench = vector_from_json<6>(jp.at("wrench"), "wrench");
        s.force_schedule.push_back(p);
      }
    }
    maybe_get(j, "estimator_gain", s.estimator_gain);
    maybe_get(j, "feed_ground_truth_load", s.feed_ground_truth_load);
    maybe_get(j, "estimator_true_params", s.estimator_true_params);
    maybe_get(j, "admittance_ridge", s.admittance_ridge);
    maybe_get(j, "seed", s.seed);
    if (j.contains("absm")) {
      const json& ja = j.at("absm");
      maybe_get(ja, "eps", s.absm.eps);
      maybe_get(ja, "lambda", s.absm.lambda);
      maybe_get(ja, "gamma", s.absm.gamma);
      maybe_get(ja, "nu", s.absm.nu);
      maybe_get(ja, "delta", s.absm.delta);
      maybe_get(ja, "eta", s.absm.eta);
    }
    if (j.contains("pd")) {
      maybe_get(j.at("pd"), "kp", s.pd.kp);
      maybe_get(j.at("pd"), "kd", s.pd.kd);
    }
    if (j.contains("robot")) {
      const json& jr = j.at("robot");
      maybe_get(jr, "disk_radius", s.robot.disk_radius);
      if (jr.contains("arc_length")) {
        const auto v = vector_from_json<2>(jr.at("arc_length"), "arc_length");
        s.robot.arc_length = {v[0], v[1]};
      }
      if (jr.contains("mass")) {
        const auto v = vector_from_json<2>(jr.at("mass"), "mass");
        s.robot.mass = {v[0], v[1]};
      }
      maybe_get(jr, "bending_stiffness", s.robot.bending_stiffness);
      maybe_get(jr, "torsion_stiffness", s.robot.torsion_stiffness);
      maybe_get(jr, "bending_inertia", s.robot.bending_inertia);
      maybe_get(jr, "torsion_inertia", s.robot.torsion_inertia);
      maybe_get(jr, "gravity", s.robot.gravity);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario JSON: ") + e.what());
  }
  s.validate();
  return s;
}

SimulationScenario scenario_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json_text(const SimulationScenario& s) {
  json j;
  j["schema"] = 1;
  j["id"] = s.id;
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["substeps"] = s.substeps;
  j["controller"] = to_string(s.controller);
  j["impedance"] = to_string(s.impedance_mode);
  j["uncertainty_fraction"] = s.uncertainty_fraction;
  j["initial_config"] = {s.initial_config[0], s.initial_config[1],
                         s.initial_config[2], s.initial_config[3]};
  j["initial_rates"] = {s.initial_rates[0], s.initial_rates[1],
                        s.initial_rates[2], s.initial_rates[3]};
  j["target"] = {s.target[0], s.target[1], s.target[2], s.target[3]};
  j["force_schedule"] = json::array();
  for (const ForcePulse& p : s.force_schedule) {
    json jp;
    jp["start"] = p.start;
    jp["end"] = p.end;
    jp["wrench"] = {p.wrench[0], p.wrench[1], p.wrench[2],
                    p.wrench[3], p.wrench[4], p.wrench[5]};
    j["force_schedule"].push_back(jp);
  }
  j["estimator_gain"] = s.estimator_gain;
  j["feed_ground_truth_load"] = s.feed_ground_truth_load;
  j["estimator_true_params"] = s.estimator_true_params;
  j["admittance_ridge"] = s.admittance_ridge;
  j["seed"] = s.seed;
  j["absm"] = {{"eps", s.absm.eps},     {"lambda", s.absm.lambda},
               {"gamma", s.absm.gamma}, {"nu", s.absm.nu},
               {"delta", s.absm.delta}, {"eta", s.absm.eta}};
  j["pd"] = {{"kp", s.pd.kp}, {"kd", s.pd.kd}};
  j["robot"] = {{"disk_radius", s.robot.disk_radius},
                {"arc_length", {s.robot.arc_length[0], s.robot.arc_length[1]}},
                {"mass", {s.robot.mass[0], s.robot.mass[1]}},
                {"bending_stiffness", s.robot.bending_stiffness},
                {"torsion_stiffness", s.robot.torsion_stiffness},
                {"bending_inertia", s.robot.bending_inertia},
                {"torsion_inertia", s.robot.torsion_inertia},
                {"gravity", s.robot.gravity}};
  return j.dump(2);
}

}  // namespace softarm
