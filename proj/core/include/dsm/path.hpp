#ifndef DSM_PATH_HPP
#define DSM_PATH_HPP

#include "dsm/schedule.hpp"
#include "dsm/types.hpp"

namespace dsm {

/// Argument profile of the path: theta(t) = theta0 + spiral_rate * t.
/// spiral_rate = 0 gives a straight ray.
struct ThetaProfile {
  double theta0 = 0.0;
  double spiral_rate = 0.0;

  double angle(double t) const { return theta0 + spiral_rate * t; }
  double rate(double) const { return spiral_rate; }
};

/// The complex path a(t) = r(t) e^{i theta(t)} traced toward the origin;
/// r strictly decreasing and below epsilon0 throughout.
struct PathSpec {
  ScheduleParams schedule;
  ThetaProfile theta;
  double epsilon0 = 1.0;
};

/// Validates r(0) < epsilon0.
PathSpec make_path(const ScheduleParams& schedule, ThetaProfile theta, double epsilon0);

Complex path_a(const PathSpec& path, double t);

/// adot(t) = (rdot + i thetadot r) e^{i theta}; always |rdot| <= |adot|.
Complex path_adot(const PathSpec& path, double t);

}  // namespace dsm

#endif
