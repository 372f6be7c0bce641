#ifndef DSM_LINALG_HPP
#define DSM_LINALG_HPP

#include <Eigen/LU>

#include "dsm/types.hpp"

namespace dsm {

/// Largest singular value of M estimated by power iteration on M M^H.
/// Deterministic start vector; stops early once the estimate is stable to `tol`.
double operator_norm_estimate(const Matrix& M, int iterations = 50, double tol = 1e-10);

/// Largest singular value of M^-1 (= 1/sigma_min(M)) from an existing factorization.
double inverse_norm_estimate(const Eigen::PartialPivLU<Matrix>& lu, int iterations = 50,
                             double tol = 1e-10);

/// Least-squares line fit y = intercept + slope * x.
struct LineFit {
  double slope;
  double intercept;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dsm

#endif
