#include "dsm/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsm/errors.hpp"
#include "dsm/linalg.hpp"
#include "dsm/ode.hpp"
#include "dsm/rng.hpp"

namespace dsm {

namespace {

std::string complex_str(Complex a) {
  std::ostringstream os;
  os << a.real() << (a.imag() < 0 ? "" : "+") << a.imag() << "i";
  return os.str();
}

void throw_if_singular(const Eigen::PartialPivLU<Matrix>& lu, Complex a) {
  const auto d = lu.matrixLU().diagonal();
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double m = std::abs(d[i]);
    dmin = std::min(dmin, m);
    dmax = std::max(dmax, m);
  }
  if (dmax == 0.0 || dmin <= dmax * 1e-15 * static_cast<double>(d.size())) {
    throw SingularMatrixError("shifted matrix numerically singular at a = " + complex_str(a));
  }
}

}  // namespace

std::pair<Vector, ShiftedSolveReport> solve_shifted(const Matrix& A, Complex a, const Vector& v) {
  if (A.rows() != A.cols()) throw DimensionError("solve_shifted: matrix must be square");
  if (v.size() != A.rows()) throw DimensionError("solve_shifted: vector/matrix size mismatch");

  Matrix M = A;
  M.diagonal().array() += a;
  Eigen::PartialPivLU<Matrix> lu(M);
  throw_if_singular(lu, a);

  Vector x = lu.solve(v);
  const double vn = v.norm();
  Vector res = M * x - v;
  double rn = res.norm();
  for (int pass = 0; pass < 3 && rn > kTolLinear * vn; ++pass) {
    x -= lu.solve(res);
    res = M * x - v;
    const double rn_new = res.norm();
    if (rn_new >= rn) break;  // refinement stalled
    rn = rn_new;
  }

  ShiftedSolveReport rep;
  rep.shift = a;
  rep.residual = rn;
  const double rc = lu.rcond();
  rep.condition_estimate = (rc > 0.0) ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return {std::move(x), rep};
}

ResolventFit estimate_resolvent_bound(const OperatorProblem& problem, const PathSpec& path,
                                      const std::vector<double>& moduli, int samples,
                                      std::uint64_t seed) {
  if (samples < 5) throw std::invalid_argument("estimate_resolvent_bound: samples must be >= 5");
  if (moduli.size() < 2) {
    throw std::invalid_argument("estimate_resolvent_bound: need at least two moduli");
  }
  for (double r : moduli) {
    if (!(r > 0.0) || !(r < path.epsilon0)) {
      throw std::invalid_argument(
          "estimate_resolvent_bound: moduli must lie in (0, epsilon0)");
    }
  }

  Rng rng(seed);
  std::vector<double> xs, ys;
  for (double r : moduli) {
    const Complex a = std::polar(r, path.theta.theta0);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
      Vector u = random_real_ball(problem.dimension, 1.0, rng);
      Matrix M = apply_derivative(problem, u);
      M.diagonal().array() += a;
      Eigen::PartialPivLU<Matrix> lu(M);
      try {
        throw_if_singular(lu, a);
      } catch (const SingularMatrixError& e) {
        throw SingularMatrixError(std::string(e.what()) + " (while sampling the resolvent bound)");
      }
      best = std::max(best, inverse_norm_estimate(lu));
    }
    xs.push_back(-std::log(r));
    ys.push_back(std::log(best));
  }
  const LineFit fit = fit_line(xs, ys);
  return ResolventFit{std::exp(fit.intercept), fit.slope};
}

RegularizedSolveResult newton_solve_shifted(const OperatorProblem& problem, Complex a,
                                            const Vector& rhs, const Vector& init,
                                            const NewtonOptions& opts) {
  if (init.size() != problem.dimension || rhs.size() != problem.dimension) {
    throw DimensionError("newton_solve_shifted: dimension mismatch");
  }
  Vector u = init;
  Vector G = apply_operator(problem, u) + a * u - rhs;
  double gn = G.norm();

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    if (gn <= opts.tol) return {std::move(u), iter, gn};

    Matrix M = apply_derivative(problem, u);
    M.diagonal().array() += a;
    Eigen::PartialPivLU<Matrix> lu(M);
    throw_if_singular(lu, a);
    Vector step = -lu.solve(G);

    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      Vector u_trial = u + t * step;
      Vector G_trial = problem.op(u_trial) + a * u_trial - rhs;
      const double gt = G_trial.norm();
      if (std::isfinite(gt) && gt <= (1.0 - 1e-4 * t) * gn) {
        u = std::move(u_trial);
        G = std::move(G_trial);
        gn = gt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw NewtonError("newton_solve_shifted: line search failed after " +
                        std::to_string(opts.max_backtracks) + " halvings at a = " +
                        complex_str(a) + ", residual = " + std::to_string(gn));
    }
  }
  if (gn <= opts.tol) return {std::move(u), opts.max_iterations, gn};
  throw NewtonError("newton_solve_shifted: no convergence in " +
                    std::to_string(opts.max_iterations) + " iterations at a = " +
                    complex_str(a) + ", residual = " + std::to_string(gn));
}

RegularizedSolveResult solve_regularized(const OperatorProblem& problem, Complex a,
                                         const Vector& w_init, const NewtonOptions& opts) {
  if (std::abs(a) == 0.0) {
    throw std::invalid_argument("solve_regularized: shift must be nonzero");
  }
  return newton_solve_shifted(problem, a, problem.data, w_init, opts);
}

PropagationResult propagate_w(const OperatorProblem& problem, const PathSpec& path,
                              const Vector& w0, const std::vector<double>& t_grid,
                              double drift_tol) {
  if (t_grid.empty()) throw std::invalid_argument("propagate_w: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("propagate_w: time grid must be strictly increasing");
    }
  }
  {
    const Complex a0 = path_a(path, t_grid.front());
    const double res0 = (apply_operator(problem, w0) + a0 * w0 - problem.data).norm();
    if (res0 > drift_tol) {
      throw std::invalid_argument(
          "propagate_w: w0 does not solve the regularized equation at the grid start "
          "(residual " + std::to_string(res0) + ")");
    }
  }

  PropagationResult out;
  out.states.reserve(t_grid.size());
  out.states.push_back(w0);
  if (t_grid.size() == 1) return out;

  OdeOptions oo;
  oo.rel_tol = 1e-9;
  oo.abs_tol = 1e-11;
  Dopri5 stepper(problem.dimension, oo);
  stepper.start(
      [&](double t, const Vector& w, Vector& dwdt) {
        Matrix M = apply_derivative(problem, w);
        const Complex a = path_a(path, t);
        M.diagonal().array() += a;
        Eigen::PartialPivLU<Matrix> lu(M);
        throw_if_singular(lu, a);
        dwdt = -path_adot(path, t) * lu.solve(w);
      },
      t_grid.front(), w0);

  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const OdeStatus st = stepper.advance_to(t_grid[i]);
    if (st == OdeStatus::underflow) {
      throw OdeError("propagate_w: step-size underflow at t = " + std::to_string(stepper.time()));
    }
    Vector w = stepper.state();
    const Complex a = path_a(path, t_grid[i]);
    Vector G = apply_operator(problem, w) + a * w - problem.data;
    if (G.norm() > drift_tol) {
      // One Newton correction back onto the regularized-equation manifold.
      Matrix M = apply_derivative(problem, w);
      M.diagonal().array() += a;
      Eigen::PartialPivLU<Matrix> lu(M);
      throw_if_singular(lu, a);
      w -= lu.solve(G);
      ++out.reprojections;
      stepper.reset_state(w);
    }
    out.states.push_back(std::move(w));
  }
  return out;
}

NormalSolutionResult normal_solution(const Matrix& A, const Vector& f,
                                     const std::vector<double>& a_sequence) {
  if (A.rows() != A.cols()) throw DimensionError("normal_solution: matrix must be square");
  if (f.size() != A.rows()) throw DimensionError("normal_solution: vector/matrix size mismatch");
  if (a_sequence.size() < 3) {
    throw std::invalid_argument("normal_solution: need at least three shifts");
  }
  for (std::size_t i = 0; i < a_sequence.size(); ++i) {
    if (!(a_sequence[i] > 0.0)) {
      throw std::invalid_argument("normal_solution: shifts must be positive");
    }
    if (i > 0 && !(a_sequence[i] < a_sequence[i - 1])) {
      throw std::invalid_argument("normal_solution: shifts must be strictly decreasing");
    }
  }

  const Matrix T = A.adjoint() * A;
  const Vector rhs = A.adjoint() * f;

  NormalSolutionResult out;
  out.shifts = a_sequence;
  Vector prev, cur;
  for (double a : a_sequence) {
    Vector next = solve_shifted(T, Complex(a, 0.0), rhs).first;
    if (cur.size()) out.diffs.push_back((next - cur).norm());
    prev = std::move(cur);
    cur = std::move(next);
  }

  // First-order Richardson in a from the last two iterates.
  const double a_last = a_sequence.back();
  const double a_prev = a_sequence[a_sequence.size() - 2];
  out.y_extrapolated = cur + (a_last / (a_prev - a_last)) * (cur - prev);
  out.y_last = std::move(cur);
  return out;
}

}  // namespace dsm
