#ifndef DSM_SERIALIZE_HPP
#define DSM_SERIALIZE_HPP

#include <iosfwd>
#include <string>

#include "dsm/flow.hpp"
#include "dsm/majorant.hpp"
#include "dsm/planner.hpp"

namespace dsm {

/// {inputs, derived {p,k,lambda,c4,m}, admissibility {…, slacks}, adjustments[], path}
std::string schedule_report_json(const PlanResult& plan);

/// {stop_reason, t_stop, final_discrepancy, final_err_y, bound_violations,
///  steps, rejected_steps, t_max, tau}
std::string trajectory_summary_json(const TrajectoryRecord& record,
                                    const BoundCheckReport* bound = nullptr);

/// Header `t,r,discrepancy,g,err_y,bound`; missing diagnostics as empty fields.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

/// {cond9_ok, cond10_ok, worst_slack, worst_t, mu0_g0, bound_ok, max_g_mu, …}
std::string certificate_report_json(const ConditionReport& cond, const ComparisonResult* cmp);

}  // namespace dsm

#endif
