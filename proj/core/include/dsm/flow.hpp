#ifndef DSM_FLOW_HPP
#define DSM_FLOW_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/path.hpp"
#include "dsm/types.hpp"

namespace dsm {

enum class StopReason { reached_t_max, discrepancy_below_tau, step_underflow, rhs_failure };
const char* to_string(StopReason r);

enum class FlowMode { direct, psi };

struct DsmConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;
  double max_step = std::numeric_limits<double>::infinity();
  double t_max = -1.0;  // <= 0: time at which r(t) = 1e-4 * r0
  double tau = -1.0;    // < 0: 10 * r(t_max) * (1 + ||u0||); 0 disables the stop
  int samples = 256;    // diagnostic sample count (log-spaced times)
  FlowMode mode = FlowMode::direct;
  bool compute_w = true;      // g(t) = ||u - w_{a(t)}|| at sample times
  bool compute_err_y = true;  // ||u - y|| when the solution is known
};

struct TrajectorySample {
  double t = 0.0;
  double r = 0.0;
  double discrepancy = 0.0;  // shifted residual ||F(u) + a(t)u - f||
  double bound = 0.0;        // r(t)^k / lambda
  std::optional<double> g;
  std::optional<double> err_y;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  std::vector<Vector> states;  // u at sample times, parallel to samples
  StopReason stop_reason = StopReason::reached_t_max;
  double t_stop = 0.0;
  Vector u_final;
  double final_discrepancy = 0.0;  // ||F(u) - f|| at the stop time
  std::optional<double> final_err_y;
  long steps = 0;
  long rejected_steps = 0;
  std::string failure_context;  // set for step_underflow / rhs_failure
  double t_max = 0.0;           // resolved horizon
  double tau = 0.0;             // resolved stop threshold
};

/// One flow evaluation: -(A(u) + a(t)I)^-1 (F(u) + a(t)u - f).
Vector dsm_rhs(const OperatorProblem& problem, const PathSpec& path, double t, const Vector& u);

/// Adaptive integration of the flow from u0, diagnostics sampled at
/// config.samples log-spaced times. Stops at the first of: t >= t_max,
/// ||F(u) - f|| <= tau, step underflow.
TrajectoryRecord integrate(const OperatorProblem& problem, const PathSpec& path,
                           const Vector& u0, const DsmConfig& config);

/// Same trajectory through the residual form: psi = F(u) + a u - f evolves by
/// psidot = -psi + adot(t) u, u recovered from psi by warm-started Newton.
TrajectoryRecord integrate_psi(const OperatorProblem& problem, const PathSpec& path,
                               const Vector& u0, const DsmConfig& config);

struct BoundViolation {
  double t = 0.0;
  double g = 0.0;
  double bound = 0.0;
};

struct BoundCheckReport {
  bool holds_everywhere = false;
  int checked = 0;
  int violations = 0;
  std::optional<BoundViolation> first_violation;
  double worst_margin = std::numeric_limits<double>::infinity();  // min over samples of bound - g
};

/// Checks g(t_i) < r(t_i)^k / lambda at every sample carrying g.
BoundCheckReport verify_theorem_bound(const TrajectoryRecord& record, const ScheduleParams& params);

}  // namespace dsm

#endif
