#include "dsm/flow.hpp"

#include <algorithm>
#include <cmath>

#include "dsm/errors.hpp"
#include "dsm/linalg.hpp"
#include "dsm/log.hpp"
#include "dsm/ode.hpp"
#include "dsm/resolvent.hpp"

namespace dsm {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_t_max: return "reached_t_max";
    case StopReason::discrepancy_below_tau: return "discrepancy_below_tau";
    case StopReason::step_underflow: return "step_underflow";
    case StopReason::rhs_failure: return "rhs_failure";
  }
  return "unknown";
}

namespace {

void check_singular(const Eigen::PartialPivLU<Matrix>& lu, Complex a, double t) {
  const auto d = lu.matrixLU().diagonal();
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double m = std::abs(d[i]);
    dmin = std::min(dmin, m);
    dmax = std::max(dmax, m);
  }
  if (dmax == 0.0 || dmin <= dmax * 1e-15 * static_cast<double>(d.size())) {
    throw SingularMatrixError("shifted solve failed at t = " + std::to_string(t) +
                              ", |a| = " + std::to_string(std::abs(a)));
  }
}

std::vector<double> sample_times(double t_max, int count) {
  std::vector<double> ts;
  ts.reserve(count);
  ts.push_back(0.0);
  if (count < 2) return ts;
  const double t_lo = t_max * 1e-6;
  const int denom = std::max(1, count - 2);
  for (int i = 1; i < count; ++i) {
    ts.push_back(t_lo * std::pow(t_max / t_lo, static_cast<double>(i - 1) / denom));
  }
  ts.back() = t_max;
  return ts;
}

struct FlowContext {
  const OperatorProblem& problem;
  const PathSpec& path;
  const DsmConfig& config;
  double t_max;
  double tau;

  // scratch reused across rhs evaluations
  Matrix M;
  Vector F, G;
  Eigen::PartialPivLU<Matrix> lu;

  // discrepancy cache; after an accepted step this reflects the accepted state
  double last_unshifted = std::numeric_limits<double>::infinity();

  // psi mode: warm start for the inner Newton
  Vector u_cache;

  explicit FlowContext(const OperatorProblem& pr, const PathSpec& pa, const DsmConfig& cf)
      : problem(pr), path(pa), config(cf), M(pr.dimension, pr.dimension), F(pr.dimension),
        G(pr.dimension), lu(pr.dimension) {}
};

void direct_rhs(FlowContext& ctx, double t, const Vector& u, Vector& dudt) {
  ctx.F = ctx.problem.op(u);
  const Complex a = path_a(ctx.path, t);
  ctx.G = ctx.F + a * u - ctx.problem.data;
  ctx.M = ctx.problem.derivative(u);
  ctx.M.diagonal().array() += a;
  ctx.lu.compute(ctx.M);
  check_singular(ctx.lu, a, t);
  dudt = -ctx.lu.solve(ctx.G);
  ctx.last_unshifted = (ctx.F - ctx.problem.data).norm();
}

void psi_rhs(FlowContext& ctx, double t, const Vector& psi, Vector& dpsidt) {
  const Complex a = path_a(ctx.path, t);
  NewtonOptions inner;
  inner.tol = std::max(ctx.config.abs_tol * 0.1, 1e-14);
  inner.max_iterations = 60;
  RegularizedSolveResult sol =
      newton_solve_shifted(ctx.problem, a, ctx.problem.data + psi, ctx.u_cache, inner);
  ctx.u_cache = sol.w;
  dpsidt = -psi + path_adot(ctx.path, t) * sol.w;
  ctx.last_unshifted = (psi - a * sol.w).norm();
}

TrajectoryRecord run_flow(const OperatorProblem& problem, const PathSpec& path,
                          const Vector& u0, const DsmConfig& config, FlowMode mode) {
  if (u0.size() != problem.dimension) throw DimensionError("integrate: u0 dimension mismatch");
  if (config.samples < 2) throw std::invalid_argument("integrate: need at least 2 samples");
  if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: tolerances must be positive");
  }
  if (!(config.max_step > 0.0)) {
    throw std::invalid_argument("integrate: max_step must be positive");
  }
  const ScheduleParams& sp = path.schedule;

  const double t_max =
      config.t_max > 0.0 ? config.t_max : schedule_time_for_radius(sp, 1e-4 * sp.r0);
  const double disc0 = (apply_operator(problem, u0) - problem.data).norm();
  // Default stop: the regularization floor at the horizon, but never above a
  // tenth of the starting discrepancy (short horizons would otherwise stop
  // the run before it moves).
  const double tau = config.tau >= 0.0
                         ? config.tau
                         : std::min(10.0 * schedule_r(sp, t_max) * (1.0 + u0.norm()),
                                    0.1 * disc0);

  TrajectoryRecord rec;
  rec.t_max = t_max;
  rec.tau = tau;

  FlowContext ctx(problem, path, config);
  ctx.u_cache = u0;

  OdeOptions oo;
  oo.rel_tol = config.rel_tol;
  oo.abs_tol = config.abs_tol;
  oo.initial_step = config.initial_step;
  oo.max_step = config.max_step;
  Dopri5 stepper(problem.dimension, oo);

  const bool psi_mode = (mode == FlowMode::psi);
  Dopri5::Rhs rhs;
  if (psi_mode) {
    rhs = [&ctx](double t, const Vector& y, Vector& dydt) { psi_rhs(ctx, t, y, dydt); };
  } else {
    rhs = [&ctx](double t, const Vector& y, Vector& dydt) { direct_rhs(ctx, t, y, dydt); };
  }

  // Diagnostics at one sample time; in psi mode the state is psi and u is recovered.
  Vector w_warm = u0;
  bool have_w = false;
  auto record_sample = [&](double t, const Vector& state) {
    TrajectorySample s;
    s.t = t;
    s.r = schedule_r(sp, t);
    s.bound = std::pow(s.r, sp.k) / sp.lambda;
    const Complex a = path_a(path, t);
    Vector u;
    if (psi_mode) {
      NewtonOptions inner;
      inner.tol = std::max(config.abs_tol * 0.1, 1e-14);
      inner.max_iterations = 60;
      u = newton_solve_shifted(problem, a, problem.data + state, ctx.u_cache, inner).w;
      ctx.u_cache = u;
      s.discrepancy = state.norm();
    } else {
      u = state;
      s.discrepancy = (problem.op(u) + a * u - problem.data).norm();
    }
    if (config.compute_w) {
      try {
        NewtonOptions wopts;
        w_warm = newton_solve_shifted(problem, a, problem.data, have_w ? w_warm : u, wopts).w;
        have_w = true;
        s.g = (u - w_warm).norm();
      } catch (const std::exception& e) {
        log_info(std::string("w diagnostic solve failed at t = ") + std::to_string(t) + ": " +
                 e.what());
      }
    }
    if (config.compute_err_y && problem.known_solution) {
      s.err_y = (u - *problem.known_solution).norm();
    }
    rec.samples.push_back(s);
    rec.states.push_back(u);
  };

  Vector state0 = u0;
  if (psi_mode) {
    const Complex a0 = path_a(path, 0.0);
    state0 = problem.op(u0) + a0 * u0 - problem.data;
  }

  auto finalize = [&](StopReason reason, double t, const Vector& state) {
    rec.stop_reason = reason;
    rec.t_stop = t;
    Vector u = state;
    if (psi_mode) u = ctx.u_cache;  // most recent recovered state
    rec.u_final = u;
    rec.final_discrepancy = (problem.op(u) - problem.data).norm();
    if (config.compute_err_y && problem.known_solution) {
      rec.final_err_y = (u - *problem.known_solution).norm();
    }
  };

  // The tau stop may already hold at t = 0.
  record_sample(0.0, state0);
  if (tau > 0.0 && disc0 <= tau) {
    finalize(StopReason::discrepancy_below_tau, 0.0, state0);
    return rec;
  }

  try {
    stepper.start(rhs, 0.0, state0);
  } catch (const std::exception& e) {
    rec.failure_context = e.what();
    finalize(StopReason::rhs_failure, 0.0, state0);
    return rec;
  }

  Dopri5::StepCallback stop_check;
  if (tau > 0.0) {
    stop_check = [&ctx, tau](double, const Vector&) { return ctx.last_unshifted > tau; };
  }

  const std::vector<double> ts = sample_times(t_max, config.samples);
  StopReason reason = StopReason::reached_t_max;
  bool stopped = false;
  for (std::size_t i = 1; i < ts.size() && !stopped; ++i) {
    OdeStatus st;
    try {
      st = stepper.advance_to(ts[i], stop_check);
    } catch (const std::exception& e) {
      rec.failure_context = e.what();
      reason = StopReason::rhs_failure;
      stopped = true;
      break;
    }
    switch (st) {
      case OdeStatus::done:
        record_sample(ts[i], stepper.state());
        break;
      case OdeStatus::halted:
        reason = StopReason::discrepancy_below_tau;
        stopped = true;
        break;
      case OdeStatus::underflow:
        rec.failure_context = "step-size underflow at t = " + std::to_string(stepper.time());
        reason = StopReason::step_underflow;
        stopped = true;
        break;
    }
  }

  if (stopped && stepper.time() > rec.samples.back().t) {
    record_sample(stepper.time(), stepper.state());
  }
  rec.steps = stepper.stats().accepted;
  rec.rejected_steps = stepper.stats().rejected;
  finalize(reason, stepper.time(), stepper.state());
  return rec;
}

}  // namespace

Vector dsm_rhs(const OperatorProblem& problem, const PathSpec& path, double t, const Vector& u) {
  if (u.size() != problem.dimension) throw DimensionError("dsm_rhs: dimension mismatch");
  DsmConfig cfg;
  FlowContext ctx(problem, path, cfg);
  Vector out(problem.dimension);
  direct_rhs(ctx, t, u, out);
  return out;
}

TrajectoryRecord integrate(const OperatorProblem& problem, const PathSpec& path,
                           const Vector& u0, const DsmConfig& config) {
  return run_flow(problem, path, u0, config, FlowMode::direct);
}

TrajectoryRecord integrate_psi(const OperatorProblem& problem, const PathSpec& path,
                               const Vector& u0, const DsmConfig& config) {
  return run_flow(problem, path, u0, config, FlowMode::psi);
}

BoundCheckReport verify_theorem_bound(const TrajectoryRecord& record,
                                      const ScheduleParams& params) {
  BoundCheckReport rep;
  for (const TrajectorySample& s : record.samples) {
    if (!s.g) continue;
    ++rep.checked;
    const double bound = std::pow(s.r, params.k) / params.lambda;
    const double margin = bound - *s.g;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (!(*s.g < bound)) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = BoundViolation{s.t, *s.g, bound};
    }
  }
  if (rep.checked == 0) {
    throw std::invalid_argument("verify_theorem_bound: record carries no g samples");
  }
  rep.holds_everywhere = rep.violations == 0;
  return rep;
}

}  // namespace dsm
