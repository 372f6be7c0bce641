#ifndef DSM_SCHEDULE_HPP
#define DSM_SCHEDULE_HPP

#include <string>
#include <vector>

namespace dsm {

/// Raw inputs of the decay-schedule derivation. All fields strictly positive,
/// kappa <= 1. c2 bounds c1*||w(t)||; c3 = c0*c1.
struct ScheduleInputs {
  double kappa = 1.0;
  double b = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double r0 = 1.0;
  double g0 = 0.5;
};

/// Derived schedule constants. Invariants (up to rounding):
///   p = 1 + kappa,  k(p-1) - b = 1,  k + b = kp - 1,  k(p-1) - 2 = b - 1,
///   lambda = r0^k / (2 g0),  c4 = c2 * lambda,  m = kp - 2 > 0.
struct ScheduleParams {
  double kappa, p, k, lambda, c4, m;
  double r0, g0, b, c2, c3;
};

ScheduleParams derive_schedule(const ScheduleInputs& in);

/// Closed-form decay r(t) = [ r0^{-m} + (m / (4 c4)) t ]^{-1/m}.
double schedule_r(const ScheduleParams& p, double t);

/// rdot(t) = -r(t)^{kp-1} / (4 c4); strictly negative, |rdot| decreasing.
double schedule_rdot(const ScheduleParams& p, double t);

/// Time at which r(t) reaches r_target (0 < r_target <= r0), in closed form.
double schedule_time_for_radius(const ScheduleParams& p, double r_target);

/// Admissibility of a derived schedule:
///   halving:  k |rdot(0)| / r(0) <= 1/2   (monotone in t, so t = 0 suffices)
///   g0:       g0 <= (c2/k) r0^{b-1}
///   r0:       r0 >= [ 4 c3 (2 c2 / k)^{p-1} ]^{1/(p(1-b)+2b)}   (b <= 1 only)
struct AdmissibilityReport {
  bool halving_ok = false;
  bool g0_ok = false;
  bool r0_ok = false;
  bool r0_checked = false;  // false when b > 1 (threshold argument not applicable)
  double halving_lhs = 0.0;
  double g0_bound = 0.0;
  double r0_threshold = 0.0;
  double halving_slack = 0.0;
  double g0_slack = 0.0;
  double r0_slack = 0.0;
  std::vector<std::string> notes;

  bool admissible() const { return halving_ok && g0_ok && r0_ok; }
};

AdmissibilityReport check_admissibility(const ScheduleParams& p);

}  // namespace dsm

#endif
