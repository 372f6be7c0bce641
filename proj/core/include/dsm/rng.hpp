#ifndef DSM_RNG_HPP
#define DSM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "dsm/types.hpp"

namespace dsm {

using Rng = std::mt19937_64;

/// Real vector (zero imaginary parts) uniform in the Euclidean ball of the given radius.
inline Vector random_real_ball(int n, double radius, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector g(n);
  for (int i = 0; i < n; ++i) g[i] = gauss(rng);
  double nn = g.norm();
  if (nn == 0.0) nn = 1.0;
  double scale = radius * std::pow(unif(rng), 1.0 / n) / nn;
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = Complex(g[i] * scale, 0.0);
  return out;
}

/// Real unit vector (zero imaginary parts).
inline Vector random_real_direction(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RealVector g(n);
  do {
    for (int i = 0; i < n; ++i) g[i] = gauss(rng);
  } while (g.norm() == 0.0);
  g /= g.norm();
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = Complex(g[i], 0.0);
  return out;
}

}  // namespace dsm

#endif
