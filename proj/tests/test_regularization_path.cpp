#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dsm/errors.hpp"
#include "dsm/gallery.hpp"
#include "dsm/path.hpp"
#include "dsm/planner.hpp"
#include "dsm/resolvent.hpp"
#include "dsm/schedule.hpp"
#include "test_util.hpp"

using namespace dsm;

namespace {

ScheduleParams reference_params() {
  // kappa = 1, b = 1, c2 = 1, r0 = 1, g0 = 1/4  =>  p = 2, k = 2, lambda = 2, c4 = 2
  return derive_schedule({1.0, 1.0, 1.0, 1.0, 1.0, 0.25});
}

Vector cvec1(double x) {
  Vector v(1);
  v[0] = Complex(x, 0.0);
  return v;
}

}  // namespace

TEST_CASE("derive_schedule closed forms") {
  auto p1 = derive_schedule({1.0, 1.0, 1.0, 1.0, 1.0, 0.5});
  CHECK(p1.p == 2.0);
  CHECK(p1.k == 2.0);

  auto p2 = derive_schedule({0.5, 1.0, 1.0, 1.0, 1.0, 0.5});
  CHECK(p2.p == 1.5);
  CHECK(p2.k == 4.0);
  CHECK(p2.m == 4.0);

  auto p3 = reference_params();
  CHECK(p3.lambda == 2.0);
  CHECK(p3.c4 == 2.0);
  CHECK(p3.m == 2.0);

  CHECK_THROWS_AS(derive_schedule({1.5, 1.0, 1.0, 1.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(derive_schedule({1.0, -1.0, 1.0, 1.0, 1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(derive_schedule({1.0, 1.0, 1.0, 1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("exponent identities hold for 1000 random parameter pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ukappa(1e-3, 1.0);
  std::uniform_real_distribution<double> ub(0.1, 3.0);
  std::uniform_real_distribution<double> upos(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double kappa = ukappa(rng), b = ub(rng);
    // r0 = 1 keeps r0^k representable for the extreme exponents (k up to ~4000).
    auto P = derive_schedule({kappa, b, upos(rng), upos(rng), 1.0, upos(rng)});
    const double kp = P.k * P.p;
    CHECK(std::abs(P.k * (P.p - 1.0) - b - 1.0) <= 1e-12 * (1.0 + P.k));
    CHECK(std::abs(P.k + b - (kp - 1.0)) <= 1e-12 * (1.0 + kp));
    CHECK(std::abs(P.k * (P.p - 1.0) - 2.0 - (b - 1.0)) <= 1e-12 * (1.0 + P.k));
    CHECK(kp > 2.0);
    // majorant seed: lambda g0 r0^-k = 1/2 by construction
    CHECK(std::abs(P.lambda * P.g0 * std::pow(P.r0, -P.k) - 0.5) <= 1e-12);
  }
}

TEST_CASE("majorant seed identity with varied r0") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ukappa(0.2, 1.0);
  std::uniform_real_distribution<double> ub(0.3, 2.0);
  std::uniform_real_distribution<double> ur0(0.5, 4.0);
  std::uniform_real_distribution<double> upos(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    auto P = derive_schedule({ukappa(rng), ub(rng), upos(rng), upos(rng), ur0(rng), upos(rng)});
    CHECK(std::abs(P.lambda * P.g0 * std::pow(P.r0, -P.k) - 0.5) <= 1e-12);
  }
}

TEST_CASE("schedule_r closed form") {
  auto P = reference_params();
  CHECK(schedule_r(P, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // r(t) = (1 + t/4)^{-1/2}
  CHECK(schedule_r(P, 12.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(schedule_rdot(P, 0.0) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK_THROWS_AS(schedule_r(P, -1.0), std::invalid_argument);

  // closed-form inverse
  const double t_half = schedule_time_for_radius(P, 0.5);
  CHECK(t_half == doctest::Approx(12.0).epsilon(1e-13));
}

TEST_CASE("schedule_r matches a fine-step integration of the decay law") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ukappa(0.3, 1.0);
  std::uniform_real_distribution<double> ub(0.5, 1.5);
  for (int trial = 0; trial < 3; ++trial) {
    auto P = derive_schedule({ukappa(rng), ub(rng), 1.0, 1.0, 1.0, 0.25});
    const double kp = P.k * P.p;
    auto rhs = [&](double, double r) { return -std::pow(r, kp - 1.0) / (4.0 * P.c4); };
    const double r_oracle = oracle::rk4_scalar(rhs, 0.0, P.r0, 100.0, 200000);
    const double r_closed = schedule_r(P, 100.0);
    CHECK(std::abs(r_closed - r_oracle) <= 1e-8 * r_oracle);
  }
}

TEST_CASE("rdot identity and finite differences") {
  auto P = reference_params();
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    const double lhs = P.c4 * std::abs(schedule_rdot(P, t)) *
                       std::pow(schedule_r(P, t), 1.0 - P.k * P.p);
    CHECK(std::abs(lhs - 0.25) <= 1e-12);
  }
  const double h = 1e-6;
  for (double t : {0.0, 2.0, 50.0}) {
    const double fd = (schedule_r(P, t + h) - schedule_r(P, t)) / h;
    CHECK(std::abs(fd - schedule_rdot(P, t)) < 1e-5);
  }
}

TEST_CASE("monotone decay on a log grid up to 1e6") {
  auto P = derive_schedule({0.7, 0.9, 1.3, 2.0, 0.8, 0.2});
  double prev_r = schedule_r(P, 0.0);
  double prev_rd = std::abs(schedule_rdot(P, 0.0));
  CHECK(schedule_rdot(P, 0.0) < 0.0);
  for (int i = 1; i <= 60; ++i) {
    const double t = std::pow(10.0, -3.0 + 9.0 * i / 60.0);
    const double r = schedule_r(P, t);
    const double rd = std::abs(schedule_rdot(P, t));
    CHECK(r < prev_r);
    CHECK(rd < prev_rd);
    prev_r = r;
    prev_rd = rd;
  }
  CHECK(schedule_r(P, 1e6) < P.r0 / 10.0);
}

TEST_CASE("path evaluation on rays and spirals") {
  auto P = reference_params();

  auto ray = make_path(P, ThetaProfile{0.0, 0.0}, 10.0);
  for (double t : {0.0, 1.0, 7.5}) {
    CHECK(path_a(ray, t).imag() == 0.0);
    CHECK(path_a(ray, t).real() == doctest::Approx(schedule_r(P, t)).epsilon(1e-15));
    CHECK(path_adot(ray, t).real() == doctest::Approx(schedule_rdot(P, t)).epsilon(1e-15));
    CHECK(path_adot(ray, t).imag() == 0.0);
  }

  auto diag = make_path(P, ThetaProfile{M_PI / 4.0, 0.0}, 10.0);
  for (double t : {0.0, 2.0, 30.0}) {
    CHECK(std::abs(path_a(diag, t)) == doctest::Approx(schedule_r(P, t)).epsilon(1e-14));
    CHECK(std::abs(path_adot(diag, t)) ==
          doctest::Approx(std::abs(schedule_rdot(P, t))).epsilon(1e-14));
  }

  auto spiral = make_path(P, ThetaProfile{0.0, 0.1}, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double t = 0.5 * i;
    const double r = schedule_r(P, t);
    const double rd = schedule_rdot(P, t);
    const double expected = std::sqrt(rd * rd + 0.01 * r * r);
    CHECK(std::abs(path_adot(spiral, t)) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(std::abs(rd) <= std::abs(path_adot(spiral, t)));
    CHECK(std::abs(path_a(spiral, t)) == doctest::Approx(r).epsilon(1e-14));
  }

  CHECK_THROWS_AS(make_path(P, ThetaProfile{}, 0.5), std::invalid_argument);
}

TEST_CASE("check_admissibility closed forms") {
  // b = 1, c2 = 1, k = 2: the g0 condition reduces to g0 <= 1/2.
  auto P = reference_params();
  auto rep = check_admissibility(P);
  CHECK(rep.g0_bound == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rep.g0_ok);  // g0 = 0.25

  // halving at t = 0: k |rdot(0)| / r0 = 2 * (1/8) / 1 = 0.25 <= 1/2
  CHECK(rep.halving_lhs == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(rep.halving_ok);

  // threshold for b = 1, p = 2, k = 2, c2 = 1, c3 = 1: [4 * (2/2)]^{1/2} = 2
  CHECK(rep.r0_checked);
  CHECK(rep.r0_threshold == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_FALSE(rep.r0_ok);  // r0 = 1 < 2
  CHECK_FALSE(rep.admissible());

  auto big = derive_schedule({1.0, 1.0, 1.0, 1.0, 4.0, 0.25});
  auto rep_big = check_admissibility(big);
  CHECK(rep_big.r0_ok);
  CHECK(rep_big.admissible());

  auto b_gt_1 = derive_schedule({1.0, 1.5, 1.0, 1.0, 1.0, 0.25});
  auto rep_b = check_admissibility(b_gt_1);
  CHECK_FALSE(rep_b.r0_checked);
  CHECK(rep_b.r0_ok);
  REQUIRE(!rep_b.notes.empty());
}

TEST_CASE("plan_run on the identity gallery") {
  auto identity = make_gallery("identity", 1);
  PlanOptions opts;
  opts.r0_hint = 1.0;
  auto plan = plan_run(identity, Vector::Zero(1), opts);
  // (1 + a) w = f with a = 1, f = 1  =>  w = 1/2, g0 = 1/2
  CHECK(std::abs(plan.w0[0] - Complex(0.5)) < 1e-14);
  CHECK(plan.g0 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(plan.adjustments.size() == 1);
  CHECK(plan.admissibility.admissible());
  CHECK(plan.path.schedule.r0 == 1.0);
}

TEST_CASE("plan_run measures g0 through the regularized solve (cubic)") {
  auto cubic = make_gallery("cubic-monotone", 1);
  // oracle for w + w^3 + 2w = 2
  const double w_ref = oracle::bisect([](double w) { return w + w * w * w + 2.0 * w - 2.0; },
                                      0.0, 1.0);
  auto sol = solve_regularized(cubic, Complex(2.0, 0.0), Vector::Zero(1));
  CHECK(std::abs(sol.w[0].real() - w_ref) < 1e-9);

  PlanOptions opts;
  opts.r0_hint = 2.0;
  auto plan = plan_run(cubic, Vector::Zero(1), opts);
  REQUIRE(!plan.adjustments.empty());
  CHECK(plan.adjustments.front().r0 == 2.0);
  CHECK(plan.adjustments.front().g0 == doctest::Approx(w_ref).epsilon(1e-8));
  CHECK(plan.admissibility.admissible());
  // planner had to raise r0 past the threshold
  CHECK(plan.path.schedule.r0 > 2.0);
}

TEST_CASE("planner doubles r0 until the threshold passes") {
  // Linear evaluator with declared c0 = c1 = 1 and small data: threshold is
  // exactly 2, so a 0.5 hint needs two doublings.
  OperatorProblem p;
  p.name = "declared-linear";
  p.dimension = 1;
  p.op = [](const Vector& u) { return u; };
  p.derivative = [](const Vector&) { return Matrix::Identity(1, 1); };
  p.data = cvec1(0.3);
  p.holder = {1.0, 1.0};
  p.resolvent = {1.0, 1.0, 100.0, 0.0};

  PlanOptions opts;
  opts.r0_hint = 0.5;
  auto plan = plan_run(p, Vector::Zero(1), opts);
  CHECK(plan.path.schedule.r0 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(plan.adjustments.size() == 3);
  CHECK(plan.admissibility.r0_threshold == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(plan.adjustments[0].admissible);
  CHECK_FALSE(plan.adjustments[1].admissible);
  CHECK(plan.adjustments[2].admissible);
}

TEST_CASE("planner handles b > 1 without the threshold search") {
  auto identity = make_gallery("identity", 2);
  identity.resolvent.b = 1.5;
  auto plan = plan_run(identity, Vector::Zero(2));
  CHECK(plan.admissibility.admissible());
  CHECK_FALSE(plan.admissibility.r0_checked);
  bool noted = false;
  for (const auto& n : plan.notes) noted = noted || n.find("b > 1") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("planner reports unattainable admissibility below epsilon0") {
  auto identity = make_gallery("identity", 1);
  identity.data = cvec1(10.0);
  identity.resolvent.epsilon0 = 1.0;
  PlanOptions opts;
  opts.r0_hint = 0.5;
  CHECK_THROWS_AS(plan_run(identity, Vector::Zero(1), opts), PlanError);
}
