#ifndef DSM_TYPES_HPP
#define DSM_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace dsm {

using Real = double;
using Complex = std::complex<double>;

// All state lives over complex scalars even for real problems: the
// regularization path may leave the real axis.
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/// Modulus of continuity of the derivative: ||A(u) - A(v)|| <= c0 ||u - v||^kappa.
struct HoelderModulus {
  double c0 = 0.0;
  double kappa = 1.0;  // in (0, 1]
};

/// Shifted-inverse growth: ||(A(u) + aI)^-1|| <= c1 / |a|^b for a on the path,
/// 0 < |a| < epsilon0. theta0 is the default ray argument of the path.
struct ResolventBoundSpec {
  double c1 = 1.0;
  double b = 1.0;
  double epsilon0 = 1.0;
  double theta0 = 0.0;
};

}  // namespace dsm

#endif
