#include "softarm/simulation.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "softarm/controllers.hpp"
#include "softarm/dynamics.hpp"
#include "softarm/estimator.hpp"
#include "softarm/impedance.hpp"

namespace softarm {

namespace {

using StateVector = Eigen::Matrix<double, 20, 1>;
// layout: [config(4), rates(4), d_hat(4), ref(4), ref_dot(4)]

struct LoopContext {
  const SimulationScenario* scn = nullptr;
  RobotParams plant_params;  // perturbed "true" plant
  RobotParams model_params;  // nominal model used by controller/observer
  bool shared_params = false;
  bool impedance_on = false;
  ImpedanceProfile profile;
};

/// Per-fine-step frozen quantities: the observer residual is held over the
/// step and the admittance matrices are built once from the step's start
/// state.
struct StepFrozen {
  Vector4d residual = Vector4d::Zero();
  ConfigurationImpedance imp;
};

struct ControlEval {
  StateVector dy = StateVector::Zero();
  Vector4d tau_c = Vector4d::Zero();
  TrackingErrors errors;
  double v3_dot_bound = 0.0;
};

ControlEval evaluate(double t, const StateVector& y, const LoopContext& ctx,
                     const StepFrozen& frozen) {
  const SimulationScenario& scn = *ctx.scn;
  const Vector4d q = y.segment<4>(0);
  const Vector4d dq = y.segment<4>(4);
  const Vector4d d_hat = y.segment<4>(8);
  const Vector4d ref = y.segment<4>(12);
  const Vector4d ref_dot = y.segment<4>(16);

  Vector4d des, des_dot, des_accel, ref_accel;
  if (ctx.impedance_on) {
    ref_accel = admittance_accel(frozen.imp, ref, ref_dot, scn.target,
                                 frozen.residual);
    des = ref;
    des_dot = ref_dot;
    des_accel = ref_accel;
  } else {
    ref_accel.setZero();
    des = scn.target;
    des_dot.setZero();
    des_accel.setZero();
  }

  ControlEval out;
  out.errors = compute_errors(q, dq, des, des_dot, scn.absm.eps,
                              scn.absm.lambda);

  const DynamicsTerms nominal = dynamics_terms(q, dq, ctx.model_params);
  const DynamicsTerms& plant =
      ctx.shared_params ? nominal : dynamics_terms(q, dq, ctx.plant_params);

  const Vector6d wrench = force_at(scn.force_schedule, t);
  Vector4d tau_e = Vector4d::Zero();
  if (!wrench.isZero()) {
    tau_e = jacobian_config_to_task(q, ctx.plant_params).transpose() * wrench;
  }
  const Vector4d tau_feed =
      scn.feed_ground_truth_load ? tau_e : frozen.residual;

  Vector4d d_hat_rate = Vector4d::Zero();
  switch (scn.controller) {
    case ControllerKind::kAbsm:
      out.tau_c = absm_control(out.errors, des_accel, nominal, dq, d_hat,
                               tau_feed, scn.absm);
      d_hat_rate =
          absm_adaptation_rate(out.errors.s, nominal.inertia, scn.absm.eta);
      break;
    case ControllerKind::kSm:
      out.tau_c =
          sm_control(out.errors, des_accel, nominal, dq, tau_feed, scn.absm);
      break;
    case ControllerKind::kPd:
      out.tau_c = pd_control(out.errors, des_accel, nominal, dq, scn.pd);
      break;
    case ControllerKind::kNone:
      break;
  }

  const Vector4d ddq = accel_from_terms(plant, dq, out.tau_c, tau_e);
  out.dy.segment<4>(0) = dq;
  out.dy.segment<4>(4) = ddq;
  out.dy.segment<4>(8) = d_hat_rate;
  out.dy.segment<4>(12) = ref_dot;
  out.dy.segment<4>(16) = ref_accel;
  out.v3_dot_bound = lyapunov_v3(out.errors, d_hat, scn.absm).derivative_bound;
  return out;
}

StepFrozen freeze_step(double t, const StateVector& y, const LoopContext& ctx,
                       const Vector4d& residual) {
  StepFrozen frozen;
  frozen.residual = residual;
  if (!ctx.impedance_on) return frozen;

  const Vector4d q = y.segment<4>(0);
  const Vector4d dq = y.segment<4>(4);
  const ProfileSample sample = eval_profile(ctx.profile, t);
  const Matrix64d jac = jacobian_config_to_task(q, ctx.model_params);
  constexpr double kStep = 1e-6;
  const Matrix64d jac_hi =
      jacobian_config_to_task(q + kStep * dq, ctx.model_params);
  const Matrix64d jac_lo =
      jacobian_config_to_task(q - kStep * dq, ctx.model_params);
  const Matrix64d jac_dot = (jac_hi - jac_lo) / (2.0 * kStep);
  frozen.imp = map_to_configuration(sample, jac, jac_dot, Vector6d::Zero());

  // Near the straight pose the plane-angle columns of the Jacobian vanish
  // and the congruences lose rank; anchor those directions with a scaled
  // copy of the task-space impedance so the reference stays bounded.
  const ProfileScalars scalars =
      profile_scalars(ctx.profile, t, ctx.profile.alpha);
  const double rel = ctx.scn->admittance_ridge;
  frozen.imp.inertia += rel * scalars.inertia * Matrix4d::Identity();
  frozen.imp.damping += rel * scalars.damping * Matrix4d::Identity();
  frozen.imp.stiffness += rel * scalars.stiffness * Matrix4d::Identity();
  return frozen;
}

Record make_record(double t, const StateVector& y, const ControlEval& eval,
                   const Vector4d& residual, const LoopContext& ctx,
                   const Vector6d& target_task) {
  Record rec;
  rec.t = t;
  rec.config = y.segment<4>(0);
  rec.rates = y.segment<4>(4);
  rec.e_p = eval.errors.e_p;
  rec.s = eval.errors.s;
  rec.tau_c = eval.tau_c;
  rec.residual = residual;
  rec.v3_dot_bound = eval.v3_dot_bound;
  try {
    rec.cables = configuration_to_actuators(rec.config, ctx.model_params);
  } catch (const std::domain_error& e) {
    throw SimulationError(std::string("cable map failed: ") + e.what(), t);
  }
  rec.task_error = task_state(rec.config, ctx.model_params) - target_task;
  return rec;
}

MetricsSummary compute_metrics(const std::vector<Record>& records,
                               const SimulationScenario& scn) {
  MetricsSummary m;
  m.controller = to_string(scn.controller);
  m.scenario_id = scn.id;
  std::vector<double> times;
  times.reserve(records.size());
  for (const Record& r : records) times.push_back(r.t);

  for (int i = 0; i < 4; ++i) {
    std::vector<double> e;
    e.reserve(records.size());
    for (const Record& r : records) e.push_back(r.e_p[i]);
    m.rmse[i] = metric_rmse(times, e, 0.0, scn.duration);
  }
  std::vector<double> curvature_error;
  curvature_error.reserve(records.size());
  for (const Record& r : records) {
    curvature_error.push_back(std::hypot(r.e_p[0], r.e_p[2]));
  }
  m.iae = metric_iae(times, curvature_error);
  m.itae = metric_itae(times, curvature_error);
  m.ise = metric_ise(times, curvature_error);
  return m;
}

}  // namespace

SimulationResult run_scenario(const SimulationScenario& scenario) {
  scenario.validate();

  LoopContext ctx;
  ctx.scn = &scenario;
  ctx.model_params = scenario.robot;
  ctx.plant_params =
      perturb_params(scenario.robot, scenario.uncertainty_fraction);
  ctx.shared_params = scenario.uncertainty_fraction == 0.0;
  ctx.impedance_on = scenario.impedance_mode != ImpedanceMode::kOff;

  SimulationResult result;
  if (ctx.impedance_on) {
    ctx.profile = scenario.impedance_mode == ImpedanceMode::kVariable
                      ? ImpedanceProfile::variable()
                      : ImpedanceProfile::invariable();
    const auto grid = make_time_grid(0.0, scenario.duration, 1e-3);
    ctx.profile.alpha = select_alpha(ctx.profile, grid);
    result.certified_alpha = ctx.profile.alpha;
  }

  StateVector y = StateVector::Zero();
  y.segment<4>(0) = scenario.initial_config;
  y.segment<4>(4) = scenario.initial_rates;
  y.segment<4>(12) = scenario.target;  // compliant reference starts on target

  LoadEstimator estimator(
      scenario.initial_config, scenario.initial_rates,
      scenario.estimator_true_params ? ctx.plant_params : ctx.model_params,
      scenario.estimator_gain);

  const Vector6d target_task = task_state(scenario.target, ctx.model_params);
  const int n_records =
      static_cast<int>(std::lround(scenario.duration / scenario.dt));
  const int total_steps = n_records * scenario.substeps;
  const double h = scenario.dt / scenario.substeps;

  result.records.reserve(n_records + 1);
  Vector4d tau_c_prev = Vector4d::Zero();

  for (int k = 0; k <= total_steps; ++k) {
    const int rec_index = k / scenario.substeps;
    const int sub_index = k % scenario.substeps;
    const double t = rec_index * scenario.dt + sub_index * h;

    if (k > 0) {
      estimator.update(y.segment<4>(0), y.segment<4>(4), tau_c_prev, h);
    }
    const StepFrozen frozen = freeze_step(t, y, ctx, estimator.residual());
    const ControlEval eval = evaluate(t, y, ctx, frozen);

    if (sub_index == 0) {
      result.records.push_back(
          make_record(t, y, eval, frozen.residual, ctx, target_task));
    }
    if (k == total_steps) break;

    // RK4 with the stage-1 derivative reused from the control evaluation
    if (!eval.dy.allFinite()) {
      throw SimulationError("non-finite derivative", t);
    }
    const auto f = [&](double ts, const StateVector& ys) {
      return evaluate(ts, ys, ctx, frozen).dy;
    };
    const StateVector k1 = eval.dy;
    const StateVector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const StateVector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const StateVector k4 = f(t + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      throw SimulationError("state diverged", t + h);
    }
    tau_c_prev = eval.tau_c;
  }

  result.metrics = compute_metrics(result.records, scenario);
  return result;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string csv_header() {
  return "t,kappa1,phi1,kappa2,phi2,dkappa1,dphi1,dkappa2,dphi2,"
         "e_p1,e_p2,e_p3,e_p4,s1,s2,s3,s4,tau1,tau2,tau3,tau4,"
         "r1,r2,r3,r4,v3_dot_bound,"
         "cable11,cable12,cable13,cable21,cable22,cable23,"
         "task_err_x,task_err_y,task_err_z,task_err_wx,task_err_wy,"
         "task_err_wz";
}

std::string records_to_csv(const std::vector<Record>& records) {
  std::string out = csv_header();
  out.push_back('\n');
  for (const Record& r : records) {
    append_number(out, r.t);
    const auto append4 = [&](const Vector4d& v) {
      for (int i = 0; i < 4; ++i) {
        out.push_back(',');
        append_number(out, v[i]);
      }
    };
    append4(r.config);
    append4(r.rates);
    append4(r.e_p);
    append4(r.s);
    append4(r.tau_c);
    append4(r.residual);
    out.push_back(',');
    append_number(out, r.v3_dot_bound);
    for (int i = 0; i < 6; ++i) {
      out.push_back(',');
      append_number(out, r.cables[i]);
    }
    for (int i = 0; i < 6; ++i) {
      out.push_back(',');
      append_number(out, r.task_error[i]);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv_file(const std::vector<Record>& records,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << records_to_csv(records);
}

}  // namespace softarm
