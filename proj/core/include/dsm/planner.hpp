#ifndef DSM_PLANNER_HPP
#define DSM_PLANNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/path.hpp"
#include "dsm/resolvent.hpp"
#include "dsm/schedule.hpp"

namespace dsm {

struct PlanOptions {
  std::optional<double> r0_hint;       // default 0.5
  std::optional<double> c2_override;
  std::optional<double> c3_override;
  int max_doublings = 40;
};

struct PlanAttempt {
  double r0 = 0.0;
  double g0 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  bool admissible = false;
  std::string failed;  // names of failing conditions, empty when admissible
};

struct PlanResult {
  PathSpec path;
  AdmissibilityReport admissibility;
  Vector w0;       // regularized solution at a(0)
  double g0 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  std::vector<PlanAttempt> adjustments;
  std::vector<std::string> notes;
};

/// End-to-end parameter pipeline: solves the regularized equation at a(0),
/// measures g0 = ||u0 - w_{a(0)}||, sets c2 = max(1, 1.5 c1 ||w_{a(0)}||) and
/// c3 = c0 c1, derives the schedule and checks admissibility. When the r0
/// threshold fails (b <= 1), r0 is doubled (up to max_doublings, staying below
/// epsilon0) and everything re-derived. Throws PlanError when admissibility is
/// unattainable below epsilon0.
PlanResult plan_run(const OperatorProblem& problem, const Vector& u0,
                    const PlanOptions& opts = {});

}  // namespace dsm

#endif
