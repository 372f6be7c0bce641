#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dsm/errors.hpp"
#include "dsm/flow.hpp"
#include "dsm/gallery.hpp"
#include "dsm/planner.hpp"
#include "dsm/resolvent.hpp"
#include "test_util.hpp"

using namespace dsm;

namespace {

Vector cvec(std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = Complex(x, 0.0);
  return v;
}

PathSpec ray(double kappa, double r0, double g0, double c2 = 1.0, double c3 = 1.0) {
  return make_path(derive_schedule({kappa, 1.0, c2, c3, r0, g0}), ThetaProfile{0.0, 0.0}, 100.0);
}

// Identity-gallery reference: u' = -u + 1/(1 + r(t)). Only the last ~45 time
// units contribute above roundoff, so the variation-of-constants integral is
// evaluated over that window with dense Simpson.
double identity_scalar_reference(const ScheduleParams& P, double t) {
  const double window = std::min(t, 45.0);
  auto integrand = [&](double s) {
    const double time = t - window + s * window;
    return std::exp(time - t) / (1.0 + schedule_r(P, time)) * window;
  };
  double acc = 0.0;
  const long panels = 400000;
  for (long j = 0; j <= panels; ++j) {
    const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    acc += w * integrand(static_cast<double>(j) / panels);
  }
  return acc / (3.0 * panels);
}

double max_state_gap(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  REQUIRE(a.states.size() == b.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    worst = std::max(worst, (a.states[i] - b.states[i]).norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("dsm_rhs closed forms") {
  auto identity = make_gallery("identity", 1);
  auto path1 = ray(1.0, 1.0, 0.25);
  // -(2I)^{-1}(0 + 1*0 - 1) = 1/2
  Vector r1 = dsm_rhs(identity, path1, 0.0, Vector::Zero(1));
  CHECK(std::abs(r1[0] - Complex(0.5)) < 1e-15);

  auto cubic = make_gallery("cubic-monotone", 1);
  auto path01 = ray(1.0, 0.1, 0.25);
  Vector r2 = dsm_rhs(cubic, path01, 0.0, cvec({1.0}));
  CHECK(std::abs(r2[0] - Complex(-0.1 / 4.1)) < 1e-15);

  // at the regularized solution the field vanishes
  Vector w = solve_regularized(cubic, path_a(path01, 0.0), cvec({1.0})).w;
  Vector r3 = dsm_rhs(cubic, path01, 0.0, w);
  CHECK(r3.norm() < 1e-9);

  CHECK_THROWS_AS(dsm_rhs(identity, path1, 0.0, Vector::Zero(2)), DimensionError);

  DsmConfig bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate(identity, path1, Vector::Zero(1), bad), std::invalid_argument);
  DsmConfig one_sample;
  one_sample.samples = 1;
  CHECK_THROWS_AS(integrate(identity, path1, Vector::Zero(1), one_sample),
                  std::invalid_argument);
}

TEST_CASE("integrate tracks the identity-gallery reference solution") {
  auto identity = make_gallery("identity", 1);
  auto path = ray(1.0, 2.0, 1.0);  // k=2, p=2, lambda=2, c4=2
  CHECK(path.schedule.c4 == doctest::Approx(2.0));

  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(path.schedule, 0.02);  // r: 2 -> 0.02
  cfg.tau = 0.0;
  cfg.samples = 64;
  auto rec = integrate(identity, path, Vector::Zero(1), cfg);
  CHECK(rec.stop_reason == StopReason::reached_t_max);
  CHECK(rec.t_stop == cfg.t_max);

  const double u_ref = identity_scalar_reference(path.schedule, cfg.t_max);
  CHECK(std::abs(rec.u_final[0].real() - u_ref) < 1e-6);
  CHECK(std::abs(rec.u_final[0].imag()) < 1e-12);

  // sample times strictly increase, radii strictly decrease
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    CHECK(rec.samples[i].t > rec.samples[i - 1].t);
    CHECK(rec.samples[i].r < rec.samples[i - 1].r);
  }
}

TEST_CASE("integrate reaches the advertised accuracy on the flow example") {
  // n = 1, f = 1, schedule constants k = 2, p = 2, c4 = 2, r0 = 2:
  // at r(t_max) = 1e-3 the final error passes below 1e-3.
  auto identity = make_gallery("identity", 1);
  auto path = ray(1.0, 2.0, 1.0);
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(path.schedule, 0.95e-3);
  cfg.tau = 0.0;
  cfg.samples = 64;
  cfg.compute_w = false;  // keep the long run lean
  auto rec = integrate(identity, path, Vector::Zero(1), cfg);
  CHECK(rec.stop_reason == StopReason::reached_t_max);
  CHECK(schedule_r(path.schedule, rec.t_stop) <= 1e-3);
  REQUIRE(rec.final_err_y.has_value());
  CHECK(*rec.final_err_y <= 1e-3);
  const double u_ref = identity_scalar_reference(path.schedule, cfg.t_max);
  CHECK(std::abs(rec.u_final[0].real() - u_ref) < 1e-6);
}

TEST_CASE("starting at the solution keeps the discrepancy under r(t)||y||") {
  auto identity = make_gallery("identity", 2);
  const Vector y = *identity.known_solution;
  const double r0 = 1.0;
  const double g0 = (y - identity.data / Complex(1.0 + r0)).norm();
  auto path = ray(1.0, r0, g0);

  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(path.schedule, 0.01);
  cfg.tau = 0.0;
  cfg.samples = 200;
  auto rec = integrate(identity, path, y, cfg);
  const double yn = y.norm();
  for (const auto& s : rec.samples) {
    CHECK(s.discrepancy <= s.r * yn * (1.0 + 1e-6) + 1e-12);
  }
  auto bound = verify_theorem_bound(rec, path.schedule);
  CHECK(bound.holds_everywhere);
  CHECK(bound.violations == 0);
}

TEST_CASE("cubic-monotone run converges toward the known solution") {
  auto cubic = make_gallery("cubic-monotone", 1);
  auto plan = plan_run(cubic, Vector::Zero(1));
  REQUIRE(plan.admissibility.admissible());

  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 100.0);
  cfg.tau = 0.0;
  cfg.samples = 220;
  auto rec = integrate(cubic, plan.path, Vector::Zero(1), cfg);
  CHECK(rec.stop_reason == StopReason::reached_t_max);

  // two-term budget: envelope plus distance of the regularized solution
  REQUIRE(rec.final_err_y.has_value());
  Vector w_stop = solve_regularized(cubic, path_a(plan.path, rec.t_stop), rec.u_final).w;
  const double bound_stop =
      std::pow(schedule_r(plan.path.schedule, rec.t_stop), plan.path.schedule.k) /
      plan.path.schedule.lambda;
  const double budget =
      std::max(10.0 * bound_stop + (w_stop - *cubic.known_solution).norm(), 1e-8);
  CHECK(*rec.final_err_y <= budget);
  CHECK(*rec.final_err_y < plan.g0);  // made real progress toward y

  auto bound = verify_theorem_bound(rec, plan.path.schedule);
  CHECK(bound.holds_everywhere);

  // t = 0 sample: g(0) lambda / r0^k = 1/2 by construction
  REQUIRE(rec.samples.front().g.has_value());
  const double ratio = *rec.samples.front().g / rec.samples.front().bound;
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("verify_theorem_bound flags a sabotaged schedule") {
  auto identity = make_gallery("identity", 2);
  auto plan = plan_run(identity, Vector::Zero(2));
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 10.0);
  cfg.tau = 0.0;
  cfg.samples = 64;
  auto rec = integrate(identity, plan.path, Vector::Zero(2), cfg);

  ScheduleParams sabotaged = plan.path.schedule;
  sabotaged.lambda *= 1e6;  // shrinks the envelope way below the measured g
  auto report = verify_theorem_bound(rec, sabotaged);
  CHECK_FALSE(report.holds_everywhere);
  CHECK(report.violations > 0);
  REQUIRE(report.first_violation.has_value());
  CHECK(report.first_violation->g >= report.first_violation->bound);

  TrajectoryRecord no_g;
  no_g.samples.push_back(TrajectorySample{});
  CHECK_THROWS_AS(verify_theorem_bound(no_g, plan.path.schedule), std::invalid_argument);
}

TEST_CASE("fixed point: starting on the w-manifold keeps g at integrator scale") {
  // Planning *from* the manifold floors g0, which makes the decay clock so
  // slow that the tracking lag (proportional to |rdot|) sits far below the
  // integrator tolerance.
  auto identity = make_gallery("identity", 2);
  auto warmup = plan_run(identity, Vector::Zero(2));
  PlanOptions opts;
  opts.r0_hint = warmup.path.schedule.r0;
  auto plan = plan_run(identity, warmup.w0, opts);
  CHECK(plan.path.schedule.lambda > 1e6);  // floored g0
  REQUIRE(!plan.notes.empty());

  DsmConfig cfg;
  cfg.t_max = 1e3;
  cfg.tau = 0.0;
  cfg.samples = 100;
  auto rec = integrate(identity, plan.path, plan.w0, cfg);
  for (const auto& s : rec.samples) {
    REQUIRE(s.g.has_value());
    CHECK(*s.g <= 1e-6);
  }
}

TEST_CASE("psi form reproduces the direct trajectories") {
  // identity: psi(0) = 0 when u0 is the regularized solution at a(0)
  auto identity = make_gallery("identity", 1);
  auto path = ray(1.0, 1.0, 0.25);
  Vector w0 = identity.data / Complex(2.0);
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(path.schedule, 0.1);
  cfg.tau = 0.0;
  cfg.samples = 50;
  auto rec_psi0 = integrate_psi(identity, path, w0, cfg);
  CHECK(rec_psi0.samples.front().discrepancy < 1e-14);

  for (const char* id : {"identity", "cubic-monotone"}) {
    CAPTURE(id);
    auto problem = make_gallery(id, 2);
    auto plan = plan_run(problem, Vector::Zero(2));
    DsmConfig c2;
    c2.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 10.0);
    c2.tau = 0.0;
    c2.samples = 60;
    auto direct = integrate(problem, plan.path, Vector::Zero(2), c2);
    auto psi = integrate_psi(problem, plan.path, Vector::Zero(2), c2);
    CHECK(direct.stop_reason == StopReason::reached_t_max);
    CHECK(psi.stop_reason == StopReason::reached_t_max);
    const double cap = std::string(id) == "identity" ? 1e-6 : 1e-5;
    CHECK(max_state_gap(direct, psi) < cap);
  }
}

TEST_CASE("envelope holds on every admissible gallery run") {
  // rank-deficient is excluded: its resolvent constants describe the
  // normal-equations wrap, not the raw nonsymmetric operator.
  for (const char* id :
       {"identity", "cubic-monotone", "hoelder", "hilbert-linear", "normal-equations"}) {
    CAPTURE(id);
    const int n = 3;
    auto problem = make_gallery(id, n, 13);
    auto plan = plan_run(problem, Vector::Zero(n));
    REQUIRE(plan.admissibility.admissible());
    DsmConfig cfg;
    cfg.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 10.0);
    cfg.tau = 0.0;
    cfg.samples = 48;
    auto rec = integrate(problem, plan.path, Vector::Zero(n), cfg);
    CHECK(rec.stop_reason == StopReason::reached_t_max);
    auto bound = verify_theorem_bound(rec, plan.path.schedule);
    CHECK(bound.holds_everywhere);
  }
}

TEST_CASE("a gentle spiral path drives the complex machinery end to end") {
  auto identity = make_gallery("identity", 2);
  auto plan = plan_run(identity, Vector::Zero(2));
  plan.path.theta.spiral_rate = 1e-3;
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 20.0);
  cfg.tau = 0.0;
  cfg.samples = 60;
  auto rec = integrate(identity, plan.path, Vector::Zero(2), cfg);
  CHECK(rec.stop_reason == StopReason::reached_t_max);
  // the state picks up a genuine imaginary part and still closes in on y
  double max_im = 0.0;
  for (const auto& u : rec.states) max_im = std::max(max_im, oracle::max_imag(u) /* |Im| */);
  CHECK(max_im > 1e-8);
  REQUIRE(rec.final_err_y.has_value());
  CHECK(*rec.final_err_y < 0.2);
  auto bound = verify_theorem_bound(rec, plan.path.schedule);
  CHECK(bound.holds_everywhere);
}

TEST_CASE("halving the integrator tolerances barely moves the final state") {
  for (const char* id :
       {"identity", "cubic-monotone", "hoelder", "hilbert-linear", "normal-equations"}) {
    CAPTURE(id);
    auto problem = make_gallery(id, 2, 7);
    auto plan = plan_run(problem, Vector::Zero(2));
    DsmConfig coarse;
    coarse.rel_tol = 1e-6;
    coarse.abs_tol = 1e-8;
    coarse.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 10.0);
    coarse.tau = 0.0;
    coarse.samples = 16;
    coarse.compute_w = false;
    DsmConfig fine = coarse;
    fine.rel_tol = 5e-7;
    fine.abs_tol = 5e-9;
    auto u_coarse = integrate(problem, plan.path, Vector::Zero(2), coarse).u_final;
    auto u_fine = integrate(problem, plan.path, Vector::Zero(2), fine).u_final;
    CHECK((u_coarse - u_fine).norm() < 1e-6 * (1.0 + u_fine.norm()));
  }
}

TEST_CASE("discrepancy stop fires mid-run") {
  auto identity = make_gallery("identity", 1);
  auto path = ray(1.0, 2.0, 1.0);
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(path.schedule, 0.002);
  cfg.tau = 0.05;
  cfg.samples = 64;
  auto rec = integrate(identity, path, Vector::Zero(1), cfg);
  CHECK(rec.stop_reason == StopReason::discrepancy_below_tau);
  CHECK(rec.t_stop > 0.0);
  CHECK(rec.t_stop < cfg.t_max);
  CHECK(rec.final_discrepancy <= cfg.tau);
  // trajectory record still ends at the stop point with increasing times
  CHECK(rec.samples.back().t == doctest::Approx(rec.t_stop));

  // tau already satisfied at t = 0
  DsmConfig cfg0 = cfg;
  cfg0.tau = 10.0;
  auto rec0 = integrate(identity, path, Vector::Zero(1), cfg0);
  CHECK(rec0.stop_reason == StopReason::discrepancy_below_tau);
  CHECK(rec0.t_stop == 0.0);
  CHECK(rec0.steps == 0);
}

TEST_CASE("discrepancy stop works identically in psi mode") {
  auto cubic = make_gallery("cubic-monotone", 1);
  auto plan = plan_run(cubic, Vector::Zero(1));
  DsmConfig cfg;
  cfg.t_max = schedule_time_for_radius(plan.path.schedule, plan.path.schedule.r0 / 50.0);
  cfg.tau = 0.2;
  cfg.samples = 48;
  cfg.mode = FlowMode::psi;
  auto rec = integrate_psi(cubic, plan.path, Vector::Zero(1), cfg);
  CHECK(rec.stop_reason == StopReason::discrepancy_below_tau);
  CHECK(rec.final_discrepancy <= cfg.tau * (1.0 + 1e-9));
  CHECK(rec.t_stop > 0.0);
}

TEST_CASE("a path crossing the spectrum is reported, not hidden") {
  // A = -I/2 is not monotone; the shifted matrix A + a(t)I turns singular when
  // r(t) reaches 1/2 (t = 12 for the reference schedule).
  OperatorProblem p;
  p.name = "negative-linear";
  p.dimension = 1;
  p.op = [](const Vector& u) { return Vector(-0.5 * u); };
  p.derivative = [](const Vector&) {
    Matrix A(1, 1);
    A(0, 0) = -0.5;
    return A;
  };
  p.data = cvec({1.0});
  p.resolvent = {1.0, 1.0, 100.0, 0.0};

  auto path = ray(1.0, 1.0, 0.25);
  DsmConfig cfg;
  cfg.t_max = 50.0;
  cfg.tau = 0.0;
  cfg.samples = 32;
  cfg.compute_w = false;
  cfg.compute_err_y = false;
  auto rec = integrate(p, path, Vector::Zero(1), cfg);
  CHECK((rec.stop_reason == StopReason::rhs_failure ||
         rec.stop_reason == StopReason::step_underflow));
  CHECK(rec.t_stop < 13.0);
  CHECK(rec.t_stop > 8.0);
  CHECK_FALSE(rec.failure_context.empty());
}
