#include "dsm/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsm {

ScheduleParams derive_schedule(const ScheduleInputs& in) {
  if (!(in.kappa > 0.0) || in.kappa > 1.0) {
    throw std::invalid_argument("derive_schedule: kappa must lie in (0, 1], got " +
                                std::to_string(in.kappa));
  }
  if (!(in.b > 0.0) || !(in.c2 > 0.0) || !(in.c3 > 0.0) || !(in.r0 > 0.0) || !(in.g0 > 0.0)) {
    throw std::invalid_argument("derive_schedule: b, c2, c3, r0, g0 must be strictly positive");
  }

  ScheduleParams p{};
  p.kappa = in.kappa;
  p.b = in.b;
  p.c2 = in.c2;
  p.c3 = in.c3;
  p.r0 = in.r0;
  p.g0 = in.g0;

  p.p = 1.0 + in.kappa;
  p.k = (in.b + 1.0) / (p.p - 1.0);  // makes k(p-1) - b = 1
  const double kp = p.k * p.p;
  if (!(kp > 2.0)) {
    throw std::invalid_argument("derive_schedule: decay form needs k*p > 2, got k*p = " +
                                std::to_string(kp));
  }
  p.m = kp - 2.0;
  p.lambda = std::pow(in.r0, p.k) / (2.0 * in.g0);  // makes mu(0) g0 = 1/2
  p.c4 = in.c2 * p.lambda;
  if (!std::isfinite(p.lambda) || !(p.lambda > 0.0) || !std::isfinite(p.c4)) {
    throw std::invalid_argument("derive_schedule: r0^k overflows or underflows (k = " +
                                std::to_string(p.k) + ")");
  }
  return p;
}

double schedule_r(const ScheduleParams& p, double t) {
  if (t < 0.0) throw std::invalid_argument("schedule_r: t must be >= 0");
  const double base = std::pow(p.r0, -p.m) + (p.m / (4.0 * p.c4)) * t;
  return std::pow(base, -1.0 / p.m);
}

double schedule_rdot(const ScheduleParams& p, double t) {
  const double r = schedule_r(p, t);
  // kp - 1 = m + 1
  return -std::pow(r, p.m + 1.0) / (4.0 * p.c4);
}

double schedule_time_for_radius(const ScheduleParams& p, double r_target) {
  if (!(r_target > 0.0) || r_target > p.r0) {
    throw std::invalid_argument("schedule_time_for_radius: need 0 < r_target <= r0");
  }
  return (4.0 * p.c4 / p.m) * (std::pow(r_target, -p.m) - std::pow(p.r0, -p.m));
}

AdmissibilityReport check_admissibility(const ScheduleParams& p) {
  AdmissibilityReport rep;

  // Halving condition at t = 0; r^{kp-2} decays, so t = 0 dominates.
  rep.halving_lhs = p.k * std::abs(schedule_rdot(p, 0.0)) / p.r0;
  rep.halving_ok = rep.halving_lhs <= 0.5;
  rep.halving_slack = 0.5 - rep.halving_lhs;

  rep.g0_bound = (p.c2 / p.k) * std::pow(p.r0, p.b - 1.0);
  rep.g0_ok = p.g0 <= rep.g0_bound;
  rep.g0_slack = rep.g0_bound - p.g0;

  if (p.b > 1.0) {
    rep.r0_checked = false;
    rep.r0_ok = true;
    rep.r0_threshold = 0.0;
    rep.r0_slack = 0.0;
    rep.notes.push_back(
        "b > 1: r0 threshold skipped (positivity of the exponent p(1-b)+2b is "
        "only guaranteed for b <= 1); a sufficiently large r0 is required instead");
  } else {
    rep.r0_checked = true;
    const double expo = p.p * (1.0 - p.b) + 2.0 * p.b;
    rep.r0_threshold =
        std::pow(4.0 * p.c3 * std::pow(2.0 * p.c2 / p.k, p.p - 1.0), 1.0 / expo);
    rep.r0_ok = p.r0 >= rep.r0_threshold;
    rep.r0_slack = p.r0 - rep.r0_threshold;
  }
  return rep;
}

}  // namespace dsm
