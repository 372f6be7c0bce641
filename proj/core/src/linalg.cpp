#include "dsm/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dsm {

bool all_finite(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  }
  return true;
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

namespace {

// Deterministic, not axis-aligned start vector.
Vector power_start(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = Complex(1.0 + 0.37 * std::sin(1.0 + static_cast<double>(i)), 0.0);
  }
  v /= v.norm();
  return v;
}

}  // namespace

double operator_norm_estimate(const Matrix& M, int iterations, double tol) {
  const Eigen::Index n = M.cols();
  if (n == 0 || M.rows() == 0) return 0.0;
  Vector v = power_start(n);
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = M * v;
    double wn = w.norm();
    if (wn == 0.0) return 0.0;
    double prev = sigma;
    sigma = wn;
    v = M.adjoint() * w;
    double vn = v.norm();
    if (vn == 0.0) return sigma;
    v /= vn;
    if (it > 0 && std::abs(sigma - prev) <= tol * sigma) break;
  }
  return sigma;
}

double inverse_norm_estimate(const Eigen::PartialPivLU<Matrix>& lu, int iterations, double tol) {
  const Eigen::Index n = lu.rows();
  if (n == 0) return 0.0;
  Vector v = power_start(n);
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = lu.solve(v);
    double wn = w.norm();
    if (!std::isfinite(wn)) return wn;
    double prev = sigma;
    sigma = wn;
    v = lu.adjoint().solve(w);
    double vn = v.norm();
    if (vn == 0.0) return sigma;
    v /= vn;
    if (it > 0 && std::abs(sigma - prev) <= tol * sigma) break;
  }
  return sigma;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace dsm
