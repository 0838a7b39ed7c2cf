#include "dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsc/error.hpp"

namespace rsc {

double DenseSegment::value(double r) const {
  const double t = (r - r0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double b1 = t - 6 * t3 + 8 * t3 * t - 3 * t3 * t2;
  const double b2 = 0.5 * (t2 - 3 * t3 + 3 * t3 * t - t3 * t2);
  const double b3 = 0.5 * (t3 - 2 * t3 * t + t3 * t2);
  const double b4 = -4 * t3 + 7 * t3 * t - 3 * t3 * t2;
  const double b5 = 10 * t3 - 15 * t3 * t + 6 * t3 * t2;
  return y0 + (y1 - y0) * b5 + h * (d0 * b1 + d1 * b4) + h * h * (g0 * b2 + g1 * b3);
}

double DenseSegment::derivative(double r) const {
  const double t = (r - r0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t2 * t2;
  const double b1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double b2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double b3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double b4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double b5 = 30 * t2 - 60 * t3 + 30 * t4;
  return (y1 - y0) * b5 / h + d0 * b1 + d1 * b4 + h * (g0 * b2 + g1 * b3);
}

namespace detail {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double safety = 0.9;
constexpr double beta = 0.04;
constexpr double expo1 = 0.2 - beta * 0.75;

}  // namespace

Dopri5Result dopri5(const std::function<double(double, double)>& f, double t0, double y0,
                    double t1, const Dopri5Settings& settings,
                    const std::function<double(double, double, double)>& second,
                    const std::function<void(double, double)>& on_accept) {
  Dopri5Result out;
  double t = t0;
  double y = y0;
  double k1 = f(t, y);
  if (!std::isfinite(k1)) throw Error(Errc::singular_point, "non-finite slope at start");
  double g = second(t, y, k1);
  double h = std::min(settings.initial_step, t1 - t0);
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t1) {
    bool final_step = false;
    if (t + h >= t1 || t1 - (t + h) < 1e-12 * std::max(1.0, std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }
    if (h < settings.min_step) {
      std::ostringstream msg;
      msg << "step collapsed to " << h << " at r = " << t;
      throw Error(Errc::step_underflow, msg.str());
    }

    const double k2 = f(t + c2 * h, y + h * a21 * k1);
    const double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double y6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const double k6 = f(t + h, y6);
    const double y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = final_step ? t1 : t + h;
    const double k7 = f(t_new, y_new);

    const double err_abs = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    // Local error <= tol, tightened to tol * |y| while |y| < 1 (near-pole
    // regime) and to tol * h for 0.01 < h < 1 (error per unit step, so the
    // interpolant defect scales with tol rather than tol^(4/5)).
    const double scale = settings.tol * std::min(1.0, std::max(std::abs(y), std::abs(y_new))) *
                         std::clamp(h, 0.01, 1.0);
    const double err = err_abs / scale;

    if (!std::isfinite(err) || !std::isfinite(y_new)) {
      h *= 0.25;
      last_rejected = true;
      final_step = false;
      ++out.rejected;
      continue;
    }

    if (err <= 1.0) {
      DenseSegment seg;
      seg.r0 = t;
      seg.h = t_new - t;
      const double g_new = second(t_new, y_new, k7);
      seg.y0 = y;
      seg.y1 = y_new;
      seg.d0 = k1;
      seg.d1 = k7;
      seg.g0 = g;
      seg.g1 = g_new;
      g = g_new;
      out.segments.push_back(seg);
      out.max_local_error = std::max(out.max_local_error, err_abs);

      t = t_new;
      y = y_new;
      k1 = k7;
      if (on_accept) on_accept(t, y);

      double fac = safety * std::pow(std::max(err, 1e-10), -expo1) * std::pow(err_old, beta);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = std::max(err, 1e-4);
      h = std::min(h * fac, settings.max_step);
      last_rejected = false;
    } else {
      const double fac = std::max(0.2, safety * std::pow(err, -expo1));
      h *= fac;
      last_rejected = true;
      ++out.rejected;
    }
  }
  return out;
}

}  // namespace detail
}  // namespace rsc
