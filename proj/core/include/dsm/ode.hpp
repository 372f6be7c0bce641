#ifndef DSM_ODE_HPP
#define DSM_ODE_HPP

#include <functional>
#include <limits>

#include "dsm/types.hpp"

namespace dsm {

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;  // <= 0: pick from the first derivative evaluation
  double max_step = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  long max_steps = 500'000'000;  // accepted + rejected
};

enum class OdeStatus { done, halted, underflow };

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Dormand–Prince 5(4) embedded pair with PI (Lund-stabilized) step control
/// and FSAL reuse, over complex state vectors.
class Dopri5 {
 public:
  /// rhs(t, y, dydt); dydt is preallocated with the state dimension.
  using Rhs = std::function<void(double, const Vector&, Vector&)>;
  /// Called after each accepted step; return false to halt the integration.
  using StepCallback = std::function<bool(double, const Vector&)>;

  Dopri5(int dim, OdeOptions opts);

  /// Prime the integrator at (t0, y0). Evaluates the rhs once.
  void start(Rhs rhs, double t0, const Vector& y0);

  /// Advance until t == t_target, landing on it exactly.
  OdeStatus advance_to(double t_target, const StepCallback& after_step = {});

  /// Replace the current state in place (e.g. after a projection) and re-prime.
  void reset_state(const Vector& y);

  double time() const { return t_; }
  const Vector& state() const { return y_; }
  const OdeStats& stats() const { return stats_; }

 private:
  double error_norm(const Vector& ynew) const;
  double initial_step_guess(double t_target) const;

  int n_;
  OdeOptions opt_;
  Rhs rhs_;
  double t_ = 0.0;
  double h_ = 0.0;
  double facold_ = 1e-4;
  bool last_rejected_ = false;
  Vector y_, ynew_, yerr_;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, ystage_;
  OdeStats stats_;
};

}  // namespace dsm

#endif
