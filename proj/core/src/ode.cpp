#include "dsm/ode.hpp"

#include <algorithm>
#include <cmath>

#include "dsm/errors.hpp"

namespace dsm {

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0;
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0,
                 A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights.
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

constexpr double kMinFactor = 0.2;   // strongest shrink per step
constexpr double kMaxFactor = 6.0;   // strongest growth per step
constexpr double kBeta = 0.04;       // Lund stabilization exponent
constexpr double kExpo = 0.2 - kBeta * 0.75;

double step_floor(double t) { return 1e-14 * std::max(1.0, std::abs(t)); }

}  // namespace

Dopri5::Dopri5(int dim, OdeOptions opts) : n_(dim), opt_(opts) {
  y_.resize(n_);
  ynew_.resize(n_);
  yerr_.resize(n_);
  k1_.resize(n_);
  k2_.resize(n_);
  k3_.resize(n_);
  k4_.resize(n_);
  k5_.resize(n_);
  k6_.resize(n_);
  k7_.resize(n_);
  ystage_.resize(n_);
}

void Dopri5::start(Rhs rhs, double t0, const Vector& y0) {
  rhs_ = std::move(rhs);
  t_ = t0;
  y_ = y0;
  rhs_(t_, y_, k1_);
  stats_ = OdeStats{};
  facold_ = 1e-4;
  last_rejected_ = false;
  h_ = opt_.initial_step;
}

void Dopri5::reset_state(const Vector& y) {
  y_ = y;
  rhs_(t_, y_, k1_);
}

double Dopri5::error_norm(const Vector& ynew) const {
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
    const double e = std::abs(yerr_[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / n_);
}

double Dopri5::initial_step_guess(double t_target) const {
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
    d0 += std::norm(y_[i] / sc);
    d1 += std::norm(k1_[i] / sc);
  }
  d0 = std::sqrt(d0 / n_);
  d1 = std::sqrt(d1 / n_);
  double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, std::abs(t_target - t_));
  return std::max(h, step_floor(t_));
}

OdeStatus Dopri5::advance_to(double t_target, const StepCallback& after_step) {
  if (t_target <= t_) return OdeStatus::done;
  if (h_ <= 0.0) h_ = initial_step_guess(t_target);

  while (t_ < t_target) {
    if (stats_.accepted + stats_.rejected >= opt_.max_steps) {
      throw OdeError("Dopri5: step budget exceeded");
    }

    const double h_proposal = std::min(h_, opt_.max_step);
    double h = h_proposal;
    bool truncated = false;
    if (t_ + h >= t_target) {
      h = t_target - t_;
      truncated = h < h_proposal;
    }
    if (h < step_floor(t_)) {
      if (t_target - t_ < step_floor(t_)) {
        t_ = t_target;  // within roundoff of the target
        return OdeStatus::done;
      }
      return OdeStatus::underflow;
    }

    // Stages (k1 carried over, FSAL).
    ystage_ = y_ + h * (A21 * k1_);
    rhs_(t_ + C2 * h, ystage_, k2_);
    ystage_ = y_ + h * (A31 * k1_ + A32 * k2_);
    rhs_(t_ + C3 * h, ystage_, k3_);
    ystage_ = y_ + h * (A41 * k1_ + A42 * k2_ + A43 * k3_);
    rhs_(t_ + C4 * h, ystage_, k4_);
    ystage_ = y_ + h * (A51 * k1_ + A52 * k2_ + A53 * k3_ + A54 * k4_);
    rhs_(t_ + C5 * h, ystage_, k5_);
    ystage_ = y_ + h * (A61 * k1_ + A62 * k2_ + A63 * k3_ + A64 * k4_ + A65 * k5_);
    rhs_(t_ + h, ystage_, k6_);
    ynew_ = y_ + h * (B1 * k1_ + B3 * k3_ + B4 * k4_ + B5 * k5_ + B6 * k6_);
    rhs_(t_ + h, ynew_, k7_);
    yerr_ = h * (E1 * k1_ + E3 * k3_ + E4 * k4_ + E5 * k5_ + E6 * k6_ + E7 * k7_);

    double err = error_norm(ynew_);
    if (!std::isfinite(err)) err = 10.0;  // force rejection

    if (err <= 1.0) {
      const double fac11 = std::pow(std::max(err, 1e-10), kExpo);
      double fac = fac11 / std::pow(facold_, kBeta);
      fac = std::clamp(fac / opt_.safety, 1.0 / kMaxFactor, 1.0 / kMinFactor);
      if (last_rejected_) fac = std::max(fac, 1.0);  // no growth right after a rejection
      facold_ = std::max(err, 1e-4);
      last_rejected_ = false;

      t_ += h;
      y_.swap(ynew_);
      k1_.swap(k7_);
      ++stats_.accepted;
      h_ = h / fac;
      // A step truncated to land on the target must not shrink later proposals.
      if (truncated) h_ = std::max(h_, h_proposal);

      if (after_step && !after_step(t_, y_)) return OdeStatus::halted;
    } else {
      const double fac11 = std::pow(err, kExpo);
      h_ = h / std::min(1.0 / kMinFactor, fac11 / opt_.safety);
      last_rejected_ = true;
      ++stats_.rejected;
    }
  }
  return OdeStatus::done;
}

}  // namespace dsm
