#include "dsm/path.hpp"

#include <cmath>
#include <stdexcept>

namespace dsm {

PathSpec make_path(const ScheduleParams& schedule, ThetaProfile theta, double epsilon0) {
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("make_path: epsilon0 must be positive");
  if (!(schedule.r0 < epsilon0)) {
    throw std::invalid_argument("make_path: r(0) must stay below epsilon0");
  }
  return PathSpec{schedule, theta, epsilon0};
}

Complex path_a(const PathSpec& path, double t) {
  return std::polar(schedule_r(path.schedule, t), path.theta.angle(t));
}

Complex path_adot(const PathSpec& path, double t) {
  const double r = schedule_r(path.schedule, t);
  const double rdot = schedule_rdot(path.schedule, t);
  const Complex phase = std::polar(1.0, path.theta.angle(t));
  return phase * Complex(rdot, path.theta.rate(t) * r);
}

}  // namespace dsm
