#include "dsm/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dsm/errors.hpp"
#include "dsm/linalg.hpp"
#include "dsm/rng.hpp"

namespace dsm {

namespace {

void check_dimension(const OperatorProblem& problem, const Vector& u, const char* where) {
  if (u.size() != problem.dimension) {
    throw DimensionError(std::string(where) + ": state has dimension " +
                         std::to_string(u.size()) + ", problem expects " +
                         std::to_string(problem.dimension));
  }
}

}  // namespace

Vector apply_operator(const OperatorProblem& problem, const Vector& u) {
  check_dimension(problem, u, "apply_operator");
  Vector out = problem.op(u);
  if (out.size() != problem.dimension) {
    throw DimensionError("apply_operator: evaluator returned wrong dimension");
  }
  if (!all_finite(out)) {
    throw std::runtime_error("apply_operator: non-finite result (evaluator bug or overflow)");
  }
  return out;
}

Matrix apply_derivative(const OperatorProblem& problem, const Vector& u) {
  check_dimension(problem, u, "apply_derivative");
  Matrix out = problem.derivative(u);
  if (out.rows() != problem.dimension || out.cols() != problem.dimension) {
    throw DimensionError("apply_derivative: evaluator returned wrong shape");
  }
  if (!all_finite(out)) {
    throw std::runtime_error("apply_derivative: non-finite result");
  }
  return out;
}

double check_mean_value_identity(const OperatorProblem& problem, const Vector& u,
                                 const Vector& w, int quad_points) {
  check_dimension(problem, u, "check_mean_value_identity");
  check_dimension(problem, w, "check_mean_value_identity");
  if (quad_points < 2) {
    throw std::invalid_argument("check_mean_value_identity: quad_points must be >= 2");
  }
  const Vector z = u - w;
  if (z.norm() == 0.0) {
    throw std::invalid_argument("check_mean_value_identity: u and w coincide");
  }

  int panels = quad_points;
  if (panels % 2 != 0) ++panels;  // Simpson needs an even panel count
  const double h = 1.0 / panels;

  Vector quad = Vector::Zero(problem.dimension);
  for (int j = 0; j <= panels; ++j) {
    const double s = h * j;
    double weight;
    if (j == 0 || j == panels) {
      weight = 1.0;
    } else if (j % 2 == 1) {
      weight = 4.0;
    } else {
      weight = 2.0;
    }
    quad += weight * (apply_derivative(problem, w + s * z) * z);
  }
  quad *= h / 3.0;

  const Vector lhs = apply_operator(problem, u) - apply_operator(problem, w);
  return (lhs - quad).norm();
}

HoelderEstimate estimate_hoelder_constants(const OperatorProblem& problem, int samples,
                                           double radius, std::uint64_t seed) {
  if (samples < 10) {
    throw std::invalid_argument("estimate_hoelder_constants: samples must be >= 10");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("estimate_hoelder_constants: degenerate sample set (radius <= 0)");
  }

  Rng rng(seed);
  const int n_dist = 8;
  const int per_bucket = std::max(2, (samples + n_dist - 1) / n_dist);
  const double d_min = radius * 1e-2;

  std::vector<double> xs, ys;
  double overall_max = 0.0;
  for (int j = 0; j < n_dist; ++j) {
    const double d =
        d_min * std::pow(radius / d_min, static_cast<double>(j) / (n_dist - 1));
    double bucket_max = 0.0;
    for (int s = 0; s < per_bucket; ++s) {
      Vector u = random_real_ball(problem.dimension, radius, rng);
      Vector dir = random_real_direction(problem.dimension, rng);
      Vector v = u + d * dir;
      Matrix diff = apply_derivative(problem, u) - apply_derivative(problem, v);
      bucket_max = std::max(bucket_max, operator_norm_estimate(diff));
    }
    overall_max = std::max(overall_max, bucket_max);
    if (bucket_max > 0.0) {
      xs.push_back(std::log(d));
      ys.push_back(std::log(bucket_max));
    }
  }

  const double scale = operator_norm_estimate(apply_derivative(problem, Vector::Zero(problem.dimension)));
  if (overall_max < 1e-12 * (1.0 + scale) || xs.size() < 2) {
    return HoelderEstimate{0.0, 1.0, 0.0, true};
  }

  LineFit fit = fit_line(xs, ys);
  HoelderEstimate est;
  est.raw_slope = fit.slope;
  est.kappa_hat = std::clamp(fit.slope, 1e-6, 1.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += ys[i] - est.kappa_hat * xs[i];
  est.c0_hat = std::exp(acc / static_cast<double>(xs.size()));
  est.derivative_constant = false;
  return est;
}

}  // namespace dsm
