#include "dsm/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsm/errors.hpp"
#include "dsm/log.hpp"

namespace dsm {

namespace {

struct Candidate {
  ScheduleParams params;
  AdmissibilityReport report;
  Vector w0;
  double g0, c2, c3;
  std::vector<std::string> notes;
};

std::string failing_conditions(const AdmissibilityReport& rep) {
  std::string out;
  auto add = [&out](const char* name) {
    if (!out.empty()) out += ",";
    out += name;
  };
  if (!rep.halving_ok) add("halving");
  if (!rep.g0_ok) add("g0");
  if (!rep.r0_ok) add("r0");
  return out;
}

}  // namespace

PlanResult plan_run(const OperatorProblem& problem, const Vector& u0, const PlanOptions& opts) {
  if (u0.size() != problem.dimension) throw DimensionError("plan_run: u0 dimension mismatch");
  if (!(problem.holder.kappa > 0.0) || problem.holder.kappa > 1.0) {
    throw PlanError("plan_run: problem lacks a usable Hoelder exponent");
  }

  const double epsilon0 = problem.resolvent.epsilon0;
  const double theta0 = problem.resolvent.theta0;
  const double c1 = problem.resolvent.c1;
  const double b = problem.resolvent.b;

  PlanResult result;
  double r0 = opts.r0_hint.value_or(0.5);
  if (!(r0 > 0.0)) throw PlanError("plan_run: r0 hint must be positive");
  if (r0 >= epsilon0) {
    throw PlanError("plan_run: r0 hint " + std::to_string(r0) +
                    " does not lie below epsilon0 = " + std::to_string(epsilon0));
  }

  Vector w_init = u0;
  std::optional<Candidate> accepted;
  for (int attempt = 0; attempt <= opts.max_doublings; ++attempt) {
    const Complex a0 = std::polar(r0, theta0);
    RegularizedSolveResult solve;
    try {
      solve = solve_regularized(problem, a0, w_init);
    } catch (const std::exception& e) {
      throw PlanError(std::string("plan_run: regularized solve diverged at a(0): ") + e.what());
    }
    w_init = solve.w;  // warm start for the next candidate

    Candidate cand;
    double g0 = (u0 - solve.w).norm();
    const double g0_floor = 1e-9 * (1.0 + solve.w.norm());
    if (g0 < g0_floor) {
      cand.notes.push_back("g0 floored at " + std::to_string(g0_floor) +
                           " (u0 starts on the regularized-solution manifold)");
      g0 = g0_floor;
    }
    double c2 = opts.c2_override.value_or(std::max(1.0, 1.5 * c1 * solve.w.norm()));
    double c3 = opts.c3_override.value_or(problem.holder.c0 * c1);
    if (!(c3 > 0.0)) {
      cand.notes.push_back("c3 floored at 1e-12 (derivative constant, c0 = 0)");
      c3 = 1e-12;
    }

    ScheduleInputs in{problem.holder.kappa, b, c2, c3, r0, g0};
    cand.params = derive_schedule(in);
    cand.report = check_admissibility(cand.params);
    cand.w0 = std::move(solve.w);
    cand.g0 = g0;
    cand.c2 = c2;
    cand.c3 = c3;

    result.adjustments.push_back(
        {r0, g0, c2, c3, cand.report.admissible(), failing_conditions(cand.report)});

    if (cand.report.admissible()) {
      accepted = std::move(cand);
      break;
    }
    log_debug("plan_run: r0 = " + std::to_string(r0) + " fails " +
              failing_conditions(cand.report));
    if (2.0 * r0 >= epsilon0) {
      std::ostringstream os;
      os << "plan_run: admissibility unattainable below epsilon0 = " << epsilon0
         << "; last failing condition(s): " << failing_conditions(cand.report)
         << " at r0 = " << r0;
      throw PlanError(os.str());
    }
    r0 *= 2.0;
  }
  if (!accepted) {
    throw PlanError("plan_run: admissibility not reached within " +
                    std::to_string(opts.max_doublings) + " doublings");
  }

  result.notes = std::move(accepted->notes);
  if (b > 1.0) {
    result.notes.push_back(
        "b > 1: only the halving and g0 conditions were enforced; no automatic r0 search");
  }

  result.path = make_path(accepted->params, ThetaProfile{theta0, 0.0}, epsilon0);
  result.admissibility = accepted->report;
  result.w0 = std::move(accepted->w0);
  result.g0 = accepted->g0;
  result.c2 = accepted->c2;
  result.c3 = accepted->c3;
  if (result.adjustments.size() > 1) {
    log_info("plan_run: raised r0 to " + std::to_string(accepted->params.r0) + " after " +
             std::to_string(result.adjustments.size() - 1) + " doubling(s)");
  }
  return result;
}

}  // namespace dsm
