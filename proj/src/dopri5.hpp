#pragma once

// Scalar Dormand-Prince 5(4) with PI step-size control. Accepted steps are
// stored as quintic Hermite segments; second(t, y, y') supplies y''.
// Internal to the radial solver.

#include <functional>
#include <vector>

#include "rsc/radial_ode.hpp"

namespace rsc::detail {

struct Dopri5Settings {
  double tol = 1e-10;  // local error per step, relative while |y| < 1
  double initial_step = 1e-7;
  double max_step = 1.0;
  double min_step = 1e-13;
};

struct Dopri5Result {
  std::vector<DenseSegment> segments;
  double max_local_error = 0.0;
  std::size_t rejected = 0;
};

// Integrates y' = f(t, y) from (t0, y0) to t1. f may return a non-finite
// value to signal that a trial stage left the domain; the step is rejected.
// on_accept is called after every accepted step and may throw.
Dopri5Result dopri5(const std::function<double(double, double)>& f, double t0, double y0,
                    double t1, const Dopri5Settings& settings,
                    const std::function<double(double, double, double)>& second,
                    const std::function<void(double, double)>& on_accept = {});

}  // namespace rsc::detail
