#include "dsm/serialize.hpp"

#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace dsm {

using nlohmann::json;

namespace {

json admissibility_json(const AdmissibilityReport& rep) {
  json j;
  j["halving_ok"] = rep.halving_ok;
  j["g0_ok"] = rep.g0_ok;
  j["r0_ok"] = rep.r0_ok;
  j["r0_checked"] = rep.r0_checked;
  j["slacks"] = {{"halving", rep.halving_slack}, {"g0", rep.g0_slack}, {"r0", rep.r0_slack}};
  j["halving_lhs"] = rep.halving_lhs;
  j["g0_bound"] = rep.g0_bound;
  j["r0_threshold"] = rep.r0_threshold;
  j["notes"] = rep.notes;
  return j;
}

}  // namespace

std::string schedule_report_json(const PlanResult& plan) {
  const ScheduleParams& p = plan.path.schedule;
  json j;
  j["inputs"] = {{"kappa", p.kappa}, {"b", p.b},   {"c2", p.c2},
                 {"c3", p.c3},       {"r0", p.r0}, {"g0", p.g0}};
  j["derived"] = {{"p", p.p}, {"k", p.k}, {"lambda", p.lambda}, {"c4", p.c4}, {"m", p.m}};
  j["admissibility"] = admissibility_json(plan.admissibility);
  json adj = json::array();
  for (const PlanAttempt& a : plan.adjustments) {
    adj.push_back({{"r0", a.r0},
                   {"g0", a.g0},
                   {"c2", a.c2},
                   {"c3", a.c3},
                   {"admissible", a.admissible},
                   {"failed", a.failed}});
  }
  j["adjustments"] = adj;
  j["path"] = {{"theta0", plan.path.theta.theta0},
               {"spiral_rate", plan.path.theta.spiral_rate},
               {"epsilon0", plan.path.epsilon0}};
  j["notes"] = plan.notes;
  return j.dump(2) + "\n";
}

std::string trajectory_summary_json(const TrajectoryRecord& record,
                                    const BoundCheckReport* bound) {
  json j;
  j["stop_reason"] = to_string(record.stop_reason);
  j["t_stop"] = record.t_stop;
  j["final_discrepancy"] = record.final_discrepancy;
  if (record.final_err_y) {
    j["final_err_y"] = *record.final_err_y;
  } else {
    j["final_err_y"] = nullptr;
  }
  if (bound) {
    j["bound_violations"] = bound->violations;
    j["bound_checked"] = bound->checked;
    j["bound_holds_everywhere"] = bound->holds_everywhere;
  } else {
    j["bound_violations"] = nullptr;
  }
  j["steps"] = record.steps;
  j["rejected_steps"] = record.rejected_steps;
  j["t_max"] = record.t_max;
  j["tau"] = record.tau;
  j["samples"] = record.samples.size();
  if (!record.failure_context.empty()) j["failure_context"] = record.failure_context;
  return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "t,r,discrepancy,g,err_y,bound\n";
  char buf[32];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const TrajectorySample& s : record.samples) {
    os << fmt(s.t) << ',' << fmt(s.r) << ',' << fmt(s.discrepancy) << ',';
    if (s.g) os << fmt(*s.g);
    os << ',';
    if (s.err_y) os << fmt(*s.err_y);
    os << ',' << fmt(s.bound) << '\n';
  }
}

std::string certificate_report_json(const ConditionReport& cond, const ComparisonResult* cmp) {
  json j;
  j["cond9_ok"] = cond.cond9_ok;
  j["cond10_ok"] = cond.cond10_ok;
  j["worst_slack"] = cond.worst_slack;
  j["worst_t"] = cond.worst_t;
  j["mu0_g0"] = cond.mu0_g0;
  if (cmp) {
    j["bound_ok"] = cmp->bound_ok;
    j["max_g_mu"] = cmp->max_g_mu;
    j["blew_up"] = cmp->blew_up;
    if (cmp->blew_up) j["blow_up_time"] = cmp->blow_up_time;
    j["g_final"] = cmp->g_final;
  }
  return j.dump(2) + "\n";
}

}  // namespace dsm
