#ifndef DSM_RESOLVENT_HPP
#define DSM_RESOLVENT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "dsm/operator_model.hpp"
#include "dsm/path.hpp"
#include "dsm/types.hpp"

namespace dsm {

/// Relative residual target of the dense shifted solves; one order below the
/// trajectory tolerances so linear error never dominates.
inline constexpr double kTolLinear = 1e-12;

/// Absolute residual target of the regularized Newton solves.
inline constexpr double kTolNewton = 1e-10;

struct ShiftedSolveReport {
  Complex shift;
  double residual = 0.0;            // ||(A + aI)x - v||
  double condition_estimate = 0.0;  // 1 / rcond of the factorization
};

/// x with (A + aI) x = v by partial-pivoting LU, with iterative refinement
/// until the relative residual is below kTolLinear (or stalls).
/// Throws SingularMatrixError when a pivot falls below threshold.
std::pair<Vector, ShiftedSolveReport> solve_shifted(const Matrix& A, Complex a,
                                                    const Vector& v);

struct ResolventFit {
  double c1_hat = 0.0;
  double b_hat = 0.0;
};

/// Fits log ||(A(u) + aI)^-1|| against -log r over the given moduli, with a on
/// the path's ray and u sampled from the unit ball; returns (c1_hat, b_hat).
ResolventFit estimate_resolvent_bound(const OperatorProblem& problem, const PathSpec& path,
                                      const std::vector<double>& moduli, int samples,
                                      std::uint64_t seed);

struct NewtonOptions {
  double tol = kTolNewton;
  int max_iterations = 100;
  int max_backtracks = 30;
};

struct RegularizedSolveResult {
  Vector w;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton for F(u) + a u = rhs, steps from the shifted Jacobian and
/// Armijo backtracking on the residual norm. Throws NewtonError on stall.
RegularizedSolveResult newton_solve_shifted(const OperatorProblem& problem, Complex a,
                                            const Vector& rhs, const Vector& init,
                                            const NewtonOptions& opts = {});

/// Solves F(w) + a w - f = 0 (the regularized equation).
RegularizedSolveResult solve_regularized(const OperatorProblem& problem, Complex a,
                                         const Vector& w_init, const NewtonOptions& opts = {});

struct PropagationResult {
  std::vector<Vector> states;  // one per grid time, states[0] == w0
  int reprojections = 0;       // Newton corrections applied at grid times
};

/// Transports w along the path by integrating
///   wdot = -adot(t) (A(w) + a(t)I)^-1 w
/// with the adaptive embedded stepper, re-projecting onto the regularized
/// equation whenever the algebraic residual drifts past drift_tol.
PropagationResult propagate_w(const OperatorProblem& problem, const PathSpec& path,
                              const Vector& w0, const std::vector<double>& t_grid,
                              double drift_tol = 1e-6);

struct NormalSolutionResult {
  Vector y_last;
  Vector y_extrapolated;        // Richardson in a from the last two iterates
  std::vector<double> shifts;
  std::vector<double> diffs;    // ||y_{a_i} - y_{a_{i+1}}||
};

/// Normal (minimal-norm) solution of A u = f as the a -> 0 limit of
/// (A^H A + aI)^-1 A^H f over a strictly decreasing positive sequence.
NormalSolutionResult normal_solution(const Matrix& A, const Vector& f,
                                     const std::vector<double>& a_sequence);

}  // namespace dsm

#endif
