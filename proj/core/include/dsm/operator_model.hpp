#ifndef DSM_OPERATOR_MODEL_HPP
#define DSM_OPERATOR_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "dsm/types.hpp"

namespace dsm {

/// A finite-dimensional operator equation F(u) = f together with its
/// derivative evaluator A(u) = F'(u) and the structural constants used by the
/// schedule machinery. Evaluators are pure; problems are safe to share across
/// threads.
struct OperatorProblem {
  int dimension = 0;
  std::function<Vector(const Vector&)> op;          // F
  std::function<Matrix(const Vector&)> derivative;  // A(u) = F'(u), dense n x n
  Vector data;                                      // f
  HoelderModulus holder;
  ResolventBoundSpec resolvent;
  std::optional<Vector> known_solution;             // y with F(y) = f, when available
  std::string name;
};

Vector apply_operator(const OperatorProblem& problem, const Vector& u);
Matrix apply_derivative(const OperatorProblem& problem, const Vector& u);

/// || F(u) - F(w) - Q ||, where Q approximates the line integral of
/// A(w + s(u-w)) (u-w) over s in [0,1] by composite Simpson on `quad_points`
/// panels (rounded up to an even count). Order-4 convergence on smooth problems.
double check_mean_value_identity(const OperatorProblem& problem, const Vector& u,
                                 const Vector& w, int quad_points);

struct HoelderEstimate {
  double c0_hat = 0.0;
  double kappa_hat = 1.0;
  double raw_slope = 0.0;          // unclamped fit slope, for diagnostics
  bool derivative_constant = false;
};

/// Empirical fit of the derivative modulus over random pairs in the ball of
/// the given radius. Pairs are grouped by log-spaced distances and the fit
/// runs on per-distance maxima, so coordinate-crossing singularities are seen.
/// Deterministic for a fixed seed.
HoelderEstimate estimate_hoelder_constants(const OperatorProblem& problem, int samples,
                                           double radius, std::uint64_t seed);

}  // namespace dsm

#endif
