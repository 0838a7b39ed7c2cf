#include "rsc/cartesian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "rsc/error.hpp"

namespace rsc {

CartesianPatch::CartesianPatch(int n, double lo, double spacing, std::size_t points,
                               std::vector<double> u)
    : n_(n), lo_(lo), spacing_(spacing), points_(points), u_(std::move(u)) {
  if (n_ < 2) throw Error(Errc::domain_error, "patch dimension must be >= 2");
  if (!(spacing_ > 0.0)) throw Error(Errc::domain_error, "spacing must be positive");
  if (points_ < 3) throw Error(Errc::domain_error, "patch needs >= 3 points per axis");
  stride_.assign(static_cast<std::size_t>(n_), 1);
  std::size_t total = 1;
  for (int j = n_ - 1; j >= 0; --j) {
    stride_[static_cast<std::size_t>(j)] = total;
    total *= points_;
  }
  if (u_.size() != total) throw Error(Errc::domain_error, "patch value count mismatch");
}

std::vector<std::size_t> CartesianPatch::index_of(std::size_t flat) const {
  std::vector<std::size_t> idx(static_cast<std::size_t>(n_));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    idx[j] = flat / stride_[j];
    flat %= stride_[j];
  }
  return idx;
}

std::size_t CartesianPatch::flat_of(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t j = 0; j < index.size(); ++j) flat += index[j] * stride_[j];
  return flat;
}

std::vector<double> CartesianPatch::position(std::size_t flat) const {
  const auto idx = index_of(flat);
  std::vector<double> x(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) x[j] = lo_ + spacing_ * static_cast<double>(idx[j]);
  return x;
}

bool CartesianPatch::interior(std::size_t flat) const {
  for (std::size_t k : index_of(flat)) {
    if (k == 0 || k + 1 >= points_) return false;
  }
  return true;
}

std::vector<std::size_t> CartesianPatch::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < u_.size(); ++f) {
    if (interior(f)) out.push_back(f);
  }
  return out;
}

std::vector<double> CartesianPatch::gradient(std::size_t flat) const {
  if (!interior(flat)) throw Error(Errc::domain_error, "gradient needs an interior node");
  std::vector<double> g(static_cast<std::size_t>(n_));
  for (std::size_t j = 0; j < g.size(); ++j) {
    g[j] = (u_[flat + stride_[j]] - u_[flat - stride_[j]]) / (2.0 * spacing_);
  }
  return g;
}

std::vector<double> CartesianPatch::hessian(std::size_t flat) const {
  if (!interior(flat)) throw Error(Errc::domain_error, "hessian needs an interior node");
  const std::size_t n = static_cast<std::size_t>(n_);
  const double h2 = spacing_ * spacing_;
  std::vector<double> hs(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t sa = stride_[a];
    hs[a * n + a] = (u_[flat + sa] - 2.0 * u_[flat] + u_[flat - sa]) / h2;
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t sb = stride_[b];
      const double v = (u_[flat + sa + sb] - u_[flat + sa - sb] - u_[flat - sa + sb] +
                        u_[flat - sa - sb]) /
                       (4.0 * h2);
      hs[a * n + b] = v;
      hs[b * n + a] = v;
    }
  }
  return hs;
}

namespace {

std::size_t lattice_points(double lo, double hi, double spacing) {
  if (!(hi > lo) || !(spacing > 0.0)) throw Error(Errc::domain_error, "invalid patch box");
  return static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
}

double min_phi(const RadialSolution& solution) {
  return *std::min_element(solution.phi().begin(), solution.phi().end());
}

}  // namespace

CartesianPatch patch_from_function(int n, double lo, double hi, double spacing,
                                   const std::function<double(std::span<const double>)>& u) {
  const std::size_t m = lattice_points(lo, hi, spacing);
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= m;
  std::vector<double> values(total);
  CartesianPatch shape(n, lo, spacing, m, std::vector<double>(total, 0.0));
  for (std::size_t f = 0; f < total; ++f) values[f] = u(shape.position(f));
  return CartesianPatch(n, lo, spacing, m, std::move(values));
}

double invert_radial_map(const RadialSolution& solution, double rho) {
  if (!(rho >= 0.0)) throw Error(Errc::domain_error, "negative radius");
  if (rho == 0.0) return 0.0;
  const double log_rho = std::log(rho);
  auto residual = [&](double r) { return solution.phi_at(r) + std::log(std::sinh(r)) - log_rho; };
  double lo = 0.0;
  double hi = std::min(std::asinh(rho * std::exp(-min_phi(solution)) + 10.0), solution.r_max());
  if (residual(hi) < 0.0) {
    std::ostringstream msg;
    msg << "|X'| = " << rho << " lies beyond the solution range r <= " << solution.r_max();
    throw Error(Errc::inversion_failed, msg.str());
  }
  int iter = 0;
  for (; iter < 200 && hi - lo > 1e-6 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (; iter < 200; ++iter) {
    const double f = residual(r);
    if (std::abs(std::expm1(f)) <= 1e-13) return r;
    // d/dr [phi + log sinh r] = coth r - tanh(r - s)
    const double df = 1.0 / std::tanh(r) - std::tanh(solution.eps_at(r));
    r = std::clamp(r - f / df, lo, hi);
  }
  throw Error(Errc::inversion_failed, "radial map inversion did not converge in 200 iterations");
}

CartesianPatch to_cartesian(const RadialSolution& solution, double lo, double hi, double spacing) {
  if (!solution.has_phi()) throw Error(Errc::domain_error, "phi not populated");
  const int n = solution.dimension();
  const std::size_t m = lattice_points(lo, hi, spacing);
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= m;
  CartesianPatch shape(n, lo, spacing, m, std::vector<double>(total, 0.0));

  // Nodes with equal integer |k|^2 share the inversion when 0 is a lattice point.
  const double offset = lo / spacing;
  const bool integral = std::abs(offset - std::round(offset)) < 1e-9;
  const long long o = std::llround(offset);
  std::unordered_map<long long, double> cache;

  std::vector<double> values(total);
  for (std::size_t f = 0; f < total; ++f) {
    const auto idx = shape.index_of(f);
    long long key = 0;
    double rho2 = 0.0;
    for (std::size_t k : idx) {
      const long long c = static_cast<long long>(k) + o;
      key += c * c;
      const double x = lo + spacing * static_cast<double>(k);
      rho2 += x * x;
    }
    if (integral) {
      if (auto it = cache.find(key); it != cache.end()) {
        values[f] = it->second;
        continue;
      }
      rho2 = spacing * spacing * static_cast<double>(key);
    }
    const double r = invert_radial_map(solution, std::sqrt(rho2));
    const double u = std::exp(solution.phi_at(r)) * std::cosh(r);
    values[f] = u;
    if (integral) cache.emplace(key, u);
  }
  return CartesianPatch(n, lo, spacing, m, std::move(values));
}

double big_h(const SpacetimePoint& x, const DirectionalPrescription& h) {
  const PolarDecomposition pd = polar_decompose(x);
  const int n = static_cast<int>(x.dimension());
  const double v = h(pd.direction);
  return binomial(n, 2) / (pd.rho * pd.rho) * v * v;
}

CurvatureSpectrum discrete_shape_operator(const CartesianPatch& patch, std::size_t flat) {
  const int n = patch.dimension();
  const auto grad = patch.gradient(flat);
  const auto hess = patch.hessian(flat);
  Eigen::Map<const Eigen::VectorXd> p(grad.data(), n);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> d2u(
      hess.data(), n, n);
  const double p2 = p.squaredNorm();
  const double w = 1.0 - p2;
  if (!(w >= 1e-10)) throw Error(Errc::metric_degenerate, "1 - |Du|^2 < 1e-10");
  Eigen::MatrixXd g_inv_half = Eigen::MatrixXd::Identity(n, n);
  if (p2 > 0.0) g_inv_half += (1.0 / std::sqrt(w) - 1.0) * (p * p.transpose()) / p2;
  const Eigen::MatrixXd b = d2u / std::sqrt(w);
  Eigen::MatrixXd s = g_inv_half * b * g_inv_half;
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  std::vector<double> kappas(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  return CurvatureSpectrum::from_kappas(std::move(kappas), 2);
}

std::vector<double> h2_residual_field(const CartesianPatch& patch,
                                      const DirectionalPrescription& h) {
  std::vector<double> out;
  for (std::size_t f : patch.interior_nodes()) {
    const CurvatureSpectrum spec = discrete_shape_operator(patch, f);
    const double target = big_h(SpacetimePoint{patch.position(f), patch.u()[f]}, h);
    out.push_back(std::abs(spec.sigma(2) - target) / target);
  }
  return out;
}

bool hyperboloid_bounds_check(const CartesianPatch& patch, double phi_min, double phi_max) {
  const double a = std::exp(2.0 * phi_min);
  const double b = std::exp(2.0 * phi_max);
  for (std::size_t f = 0; f < patch.size(); ++f) {
    double rho2 = 0.0;
    for (double x : patch.position(f)) rho2 += x * x;
    const double u = patch.u()[f];
    const double slack = 1e-12 * std::max(1.0, u);
    if (u < std::sqrt(a + rho2) - slack || u > std::sqrt(b + rho2) + slack) return false;
  }
  return true;
}

Admissibility admissibility_field(const CartesianPatch& patch) {
  Admissibility out;
  out.worst_sigma2 = HUGE_VAL;
  std::size_t good = 0;
  for (std::size_t f : patch.interior_nodes()) {
    ++out.nodes;
    try {
      const CurvatureSpectrum spec = discrete_shape_operator(patch, f);
      out.worst_sigma2 = std::min(out.worst_sigma2, spec.sigma(2));
      if (spec.admissible_up_to >= 2) ++good;
    } catch (const Error& e) {
      if (e.code() != Errc::metric_degenerate) throw;
      out.worst_sigma2 = -HUGE_VAL;
    }
  }
  out.fraction = out.nodes == 0 ? 0.0 : static_cast<double>(good) / static_cast<double>(out.nodes);
  return out;
}

CartesianPatch dilate(const CartesianPatch& patch, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::domain_error, "dilation factor must be positive");
  std::vector<double> u = patch.u();
  for (double& v : u) v *= lambda;
  return CartesianPatch(patch.dimension(), lambda * patch.lo(), lambda * patch.spacing(),
                        patch.points_per_axis(), std::move(u));
}

PatchResiduals summarize_patch(const CartesianPatch& patch, const DirectionalPrescription& h) {
  PatchResiduals out;
  out.spacing = patch.spacing();
  const auto res = h2_residual_field(patch, h);
  double sum2 = 0.0;
  for (double v : res) {
    out.max_residual = std::max(out.max_residual, v);
    sum2 += v * v;
  }
  out.nodes = res.size();
  out.rms_residual = res.empty() ? 0.0 : std::sqrt(sum2 / static_cast<double>(res.size()));
  const Admissibility adm = admissibility_field(patch);
  out.admissible_fraction = adm.fraction;
  out.worst_sigma2_margin = adm.worst_sigma2;
  return out;
}

}  // namespace rsc
