#ifndef DSM_ERRORS_HPP
#define DSM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsm {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GalleryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Shifted matrix numerically singular (pivot below threshold).
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Damped Newton failed (line search stalled or iteration budget spent).
struct NewtonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Admissibility unattainable below epsilon0, or the regularized solve at a(0) diverged.
struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OdeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsm

#endif
