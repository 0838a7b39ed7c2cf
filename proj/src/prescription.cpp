#include "rsc/prescription.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsc/error.hpp"

namespace rsc {

namespace {

// Fritsch-Carlson monotone piecewise cubic Hermite interpolant.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0) {
    const std::size_t n = x_.size();
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double operator()(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
  }

 private:
  static double end_slope(double h0, double h1, double del0, double del1) {
    double d = ((2 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if (d * del0 <= 0.0) return 0.0;
    if (del0 * del1 <= 0.0 && std::abs(d) > std::abs(3 * del0)) return 3 * del0;
    return d;
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace

RadialPrescription::RadialPrescription(int dimension, std::function<double(double)> h,
                                       std::string name, bool flat_near_zero,
                                       double limit_at_infinity)
    : dimension_(dimension),
      h_(std::move(h)),
      name_(std::move(name)),
      flat_near_zero_(flat_near_zero),
      limit_(limit_at_infinity) {
  if (dimension_ < 2 || dimension_ > 16) {
    throw Error(Errc::domain_error, "dimension must lie in [2, 16]");
  }
}

RadialPrescription RadialPrescription::tabulated(int dimension, std::vector<double> r,
                                                 std::vector<double> h, std::string name,
                                                 bool flat_near_zero, double limit_at_infinity) {
  if (r.size() != h.size() || r.size() < 4) {
    throw Error(Errc::domain_error, "tabulated prescription needs >= 4 matching samples");
  }
  if (r.front() != 0.0) throw Error(Errc::domain_error, "first tabulated sample must be r = 0");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw Error(Errc::domain_error, "tabulated grid must increase");
  }
  const double r_last = r.back();
  const double h_last = h.back();
  auto interp = std::make_shared<const MonotoneCubic>(r, h);
  RadialPrescription out(
      dimension,
      [interp, r_last, h_last](double x) { return x >= r_last ? h_last : (*interp)(x); },
      std::move(name), flat_near_zero, limit_at_infinity);
  out.kind_ = PrescriptionKind::tabulated;
  out.table_r_ = std::move(r);
  out.table_h_ = std::move(h);
  return out;
}

double RadialPrescription::operator()(double r) const {
  if (!(r >= 0.0)) throw Error(Errc::domain_error, "prescription queried at r < 0");
  const double value = h_(r);
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << name_ << " is not positive at r = " << r << " (h = " << value << ")";
    throw Error(Errc::non_positive_prescription, msg.str());
  }
  return value;
}

RadialPrescription RadialPrescription::with_dimension(int dimension) const {
  RadialPrescription out = *this;
  if (dimension < 2 || dimension > 16) {
    throw Error(Errc::domain_error, "dimension must lie in [2, 16]");
  }
  out.dimension_ = dimension;
  return out;
}

DirectionalPrescription::DirectionalPrescription(
    int dimension, std::function<double(const HyperbolicPoint&)> h, std::string name)
    : dimension_(dimension), h_(std::move(h)), name_(std::move(name)) {
  if (dimension_ < 2 || dimension_ > 16) {
    throw Error(Errc::domain_error, "dimension must lie in [2, 16]");
  }
}

DirectionalPrescription DirectionalPrescription::from_radial(const RadialPrescription& radial) {
  return DirectionalPrescription(
      radial.dimension(), [radial](const HyperbolicPoint& x) { return radial(x.radius()); },
      radial.name());
}

double DirectionalPrescription::operator()(const HyperbolicPoint& x) const {
  if (static_cast<int>(x.dimension()) != dimension_) {
    throw Error(Errc::domain_error, "point dimension does not match prescription");
  }
  const double value = h_(x);
  if (!(value > 0.0)) {
    throw Error(Errc::non_positive_prescription, name_ + " is not positive at a sampled point");
  }
  return value;
}

namespace families {

namespace {

std::string label(const char* family, double a, const char* an, double b, const char* bn) {
  std::ostringstream os;
  os << family << "(" << an << "=" << a << "," << bn << "=" << b << ")";
  return os.str();
}

}  // namespace

RadialPrescription constant(int n, double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  return RadialPrescription(n, [value](double) { return value; }, os.str(), true, value);
}

RadialPrescription power_deficit(int n, double c, double p) {
  return RadialPrescription(
      n, [c, p](double r) { return 1.0 - c * std::pow(1.0 + r, -p); },
      label("power-deficit", c, "c", p, "p"));
}

RadialPrescription power_excess(int n, double c, double p) {
  return RadialPrescription(
      n, [c, p](double r) { return 1.0 + c * std::pow(1.0 + r, -p); },
      label("power-excess", c, "c", p, "p"));
}

RadialPrescription bertrand(int n, double c, double q) {
  return RadialPrescription(
      n,
      [c, q](double r) {
        return 1.0 - c / (1.0 + r) * std::pow(std::log(std::exp(1.0) + r), -q);
      },
      label("bertrand", c, "c", q, "q"));
}

DirectionalPrescription directional(int n, double a0, double p) {
  return DirectionalPrescription(
      n,
      [a0, p](const HyperbolicPoint& x) {
        const double a = a0 * std::pow(1.0 + x.radius(), -p);
        return 1.0 + a * x.chart()[0] / x.height();
      },
      label("directional", a0, "a", p, "p"));
}

double directional_sup(double a0, double p, double r) {
  return 1.0 + a0 * std::pow(1.0 + r, -p) * std::tanh(r);
}

double directional_inf(double a0, double p, double r) {
  return 1.0 - a0 * std::pow(1.0 + r, -p) * std::tanh(r);
}

RadialPrescription directional_radial_member(int n, double a0, double p) {
  return RadialPrescription(
      n, [a0, p](double r) { return directional_sup(a0, p, r); },
      label("directional-radial", a0, "a", p, "p"));
}

}  // namespace families

}  // namespace rsc
