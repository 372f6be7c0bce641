#include "dsm/majorant.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dsm {

namespace {

constexpr double kBlowUp = 1e12;

double eval_checked(const std::function<double(double)>& f, double t, const char* name) {
  const double v = f(t);
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("majorant: non-finite ") + name + " at t = " +
                             std::to_string(t));
  }
  return v;
}

double comparison_rhs(const MajorantSpec& spec, double t, double g) {
  const double gp = g > 0.0 ? std::pow(g, spec.p) : 0.0;
  return -spec.gamma(t) * g + spec.alpha(t) * gp + spec.beta(t);
}

double rk4_step(const MajorantSpec& spec, double t, double g, double h) {
  const double k1 = comparison_rhs(spec, t, g);
  const double k2 = comparison_rhs(spec, t + 0.5 * h, g + 0.5 * h * k1);
  const double k3 = comparison_rhs(spec, t + 0.5 * h, g + 0.5 * h * k2);
  const double k4 = comparison_rhs(spec, t + h, g + h * k3);
  return g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<double> log_spaced_grid(double t_end, int points) {
  if (!(t_end > 0.0) || points < 2) {
    throw std::invalid_argument("log_spaced_grid: need t_end > 0 and points >= 2");
  }
  std::vector<double> grid;
  grid.reserve(points);
  grid.push_back(0.0);
  const double lo = t_end * 1e-6;
  for (int i = 1; i < points; ++i) {
    const double frac = static_cast<double>(i - 1) / std::max(1, points - 2);
    grid.push_back(lo * std::pow(t_end / lo, frac));
  }
  grid.back() = t_end;
  return grid;
}

ConditionReport verify_conditions(const MajorantSpec& spec, const std::vector<double>& grid) {
  if (grid.empty() || grid.front() != 0.0) {
    throw std::invalid_argument("verify_conditions: grid must be nonempty and start at 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("verify_conditions: grid must be increasing");
    }
  }
  if (!(spec.p > 1.0)) throw std::invalid_argument("verify_conditions: p must exceed 1");

  ConditionReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double gamma = eval_checked(spec.gamma, t, "gamma");
    const double alpha = eval_checked(spec.alpha, t, "alpha");
    const double beta = eval_checked(spec.beta, t, "beta");
    const double mu = eval_checked(spec.mu, t, "mu");
    const double mu_dot = eval_checked(spec.mu_dot, t, "mu_dot");
    if (!(alpha > 0.0) || !(mu > 0.0)) {
      throw std::runtime_error("verify_conditions: alpha and mu must stay positive (t = " +
                               std::to_string(t) + ")");
    }
    const double lhs = alpha * std::pow(mu, -spec.p) + beta;
    const double rhs = (gamma - mu_dot / mu) / mu;
    const double slack = rhs - lhs;
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_t = t;
    }
  }
  rep.cond9_ok = rep.worst_slack >= 0.0;
  rep.mu0_g0 = spec.mu(0.0) * spec.g0;
  rep.cond10_ok = rep.mu0_g0 < 1.0;
  return rep;
}

ComparisonResult integrate_comparison(const MajorantSpec& spec, double t_end, long steps) {
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_comparison: t_end must be positive");
  if (steps < 1000) throw std::invalid_argument("integrate_comparison: steps must be >= 1000");
  if (spec.g0 < 0.0) throw std::invalid_argument("integrate_comparison: g0 must be nonnegative");

  ComparisonResult out;
  const double h = t_end / static_cast<double>(steps);
  const long sample_stride = std::max<long>(1, steps / 2048);

  double t = 0.0;
  double g = spec.g0;
  out.max_g_mu = g * spec.mu(0.0);
  out.sample_t.push_back(0.0);
  out.sample_g.push_back(g);

  for (long i = 0; i < steps; ++i) {
    double g_next = rk4_step(spec, t, g, h);
    if (!std::isfinite(g_next) || g_next > kBlowUp) {
      // Locate the blow-up time by halving the step from the last good state.
      double tb = t, gb = g, hb = h;
      for (int halvings = 0; halvings < 60 && gb <= kBlowUp; ++halvings) {
        const double trial = rk4_step(spec, tb, gb, hb);
        if (std::isfinite(trial) && trial <= kBlowUp) {
          tb += hb;
          gb = trial;
        } else {
          hb *= 0.5;
        }
      }
      out.blew_up = true;
      out.blow_up_time = tb;
      out.bound_ok = false;
      out.g_final = gb;
      out.sample_t.push_back(tb);
      out.sample_g.push_back(gb);
      return out;
    }
    t = h * static_cast<double>(i + 1);
    g = g_next;
    out.max_g_mu = std::max(out.max_g_mu, g * spec.mu(t));
    if ((i + 1) % sample_stride == 0 || i + 1 == steps) {
      out.sample_t.push_back(t);
      out.sample_g.push_back(g);
    }
  }
  out.g_final = g;
  out.bound_ok = out.max_g_mu <= 1.0;
  return out;
}

MajorantSpec build_schedule_certificate(const ScheduleParams& params,
                                        bool alpha_uses_w_bound_constant) {
  MajorantSpec spec;
  const ScheduleParams P = params;
  const double alpha_const = alpha_uses_w_bound_constant ? P.c2 : P.c3;
  spec.gamma = [](double) { return 1.0; };
  spec.alpha = [P, alpha_const](double t) {
    return alpha_const * std::pow(schedule_r(P, t), -P.b);
  };
  spec.beta = [P](double t) {
    return P.c2 * std::abs(schedule_rdot(P, t)) * std::pow(schedule_r(P, t), -P.b);
  };
  spec.p = P.p;
  spec.mu = [P](double t) { return P.lambda * std::pow(schedule_r(P, t), -P.k); };
  spec.mu_dot = [P](double t) {
    const double r = schedule_r(P, t);
    const double rdot = schedule_rdot(P, t);
    return P.lambda * std::pow(r, -P.k) * (-P.k * rdot / r);
  };
  spec.g0 = P.g0;
  return spec;
}

}  // namespace dsm
