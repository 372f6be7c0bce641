#ifndef DSM_MAJORANT_HPP
#define DSM_MAJORANT_HPP

#include <functional>
#include <vector>

#include "dsm/schedule.hpp"

namespace dsm {

/// Certificate data for the comparison inequality
///   gdot <= -gamma(t) g + alpha(t) g^p + beta(t),  p > 1,
/// with candidate majorant mu(t) > 0 certifying g(t) <= 1/mu(t).
struct MajorantSpec {
  std::function<double(double)> gamma;
  std::function<double(double)> alpha;
  std::function<double(double)> beta;
  double p = 2.0;
  std::function<double(double)> mu;
  std::function<double(double)> mu_dot;
  double g0 = 0.0;
};

struct ConditionReport {
  bool cond9_ok = false;   // alpha mu^-p + beta <= mu^-1 (gamma - mudot/mu) on the grid
  bool cond10_ok = false;  // mu(0) g0 < 1
  double worst_slack = 0.0;
  double worst_t = 0.0;
  double mu0_g0 = 0.0;
};

/// Grid check of both certificate conditions; grid must be increasing and
/// start at 0. Throws on non-finite coefficient values.
ConditionReport verify_conditions(const MajorantSpec& spec, const std::vector<double>& grid);

/// t = 0 followed by `points - 1` log-spaced times up to t_end.
std::vector<double> log_spaced_grid(double t_end, int points);

struct ComparisonResult {
  bool bound_ok = false;
  double max_g_mu = 0.0;
  bool blew_up = false;
  double blow_up_time = 0.0;
  double g_final = 0.0;
  std::vector<double> sample_t;
  std::vector<double> sample_g;
};

/// Brute-force oracle: integrates the equality ODE gdot = -gamma g + alpha g^p + beta
/// from g(0) = g0 with fixed-step classical RK4 (steps >= 1000), reporting whether
/// g stays below 1/mu. Blow-up (g > 1e12) is located by within-step bisection.
ComparisonResult integrate_comparison(const MajorantSpec& spec, double t_end, long steps);

/// The schedule's own certificate: gamma = 1, alpha = c3 r^-b (the g^p
/// coefficient of the governing inequality), beta = c2 |rdot| r^-b,
/// mu = lambda r^-k. Setting alpha_uses_w_bound_constant swaps c3 -> c2 to
/// reproduce the weaker printed variant of the coefficient table.
MajorantSpec build_schedule_certificate(const ScheduleParams& params,
                                        bool alpha_uses_w_bound_constant = false);

}  // namespace dsm

#endif
