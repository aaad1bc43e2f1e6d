#include "rectconv/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

// Boost 1.74's pchip.hpp calls unqualified isnan; math.h puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rectconv/error.hpp"

namespace rectconv {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;

// Mass of rho on [lambda_+ - b^2, lambda_+ - a^2] in the variable u = sqrt(lambda_+ - E).
class EdgeIntegrand {
 public:
  EdgeIntegrand(const Spectrum& spec, const ModelParams& params, double lambda_plus,
                const SolverConfig& cfg)
      : spec_(spec), params_(params), lambda_(lambda_plus), cfg_(cfg) {}

  double operator()(double u) const {
    return 2.0 * u * density_sample_warm(spec_, params_, lambda_ - u * u, hint_, cfg_).rho;
  }

  double panel(double a, double b, double* error) const {
    double err = 0.0;
    const double v = Rule::integrate(*this, a, b, 0, 0.0, &err);
    if (!std::isfinite(v)) throw NumericalError("classical_locations: quadrature produced a non-finite value");
    if (error != nullptr) *error = err;
    return v;
  }

 private:
  const Spectrum& spec_;
  const ModelParams& params_;
  double lambda_;
  const SolverConfig& cfg_;
  // Nodes are visited in order along the edge, so each warm-starts the next.
  mutable cplx hint_{0.0, 0.0};
};

}  // namespace

QuantileTable classical_locations(const Spectrum& spec, const ModelParams& params, std::size_t j_max,
                                  const EdgeData& edge, const SolverConfig& cfg,
                                  const QuantileOptions& opt) {
  if (j_max < 1 || j_max > params.p)
    throw std::invalid_argument("classical_locations: require 1 <= j_max <= p");
  if (!(params.t > 0.0)) throw std::invalid_argument("classical_locations: require t > 0");
  if (opt.grid_points < 2) throw std::invalid_argument("classical_locations: grid_points must be >= 2");

  const double lambda = edge.lambda_plus;
  QuantileTable table;
  table.j_max = j_max;
  table.gamma.assign(1, lambda);
  if (j_max == 1) return table;

  const double low = opt.window_low > 0.0 ? opt.window_low : 1e-12 * std::max(1.0, lambda);
  if (!(low < lambda)) throw std::invalid_argument("classical_locations: window_low must lie below lambda_plus");

  const EdgeIntegrand f(spec, params, lambda, cfg);
  const std::size_t panels = opt.grid_points - 1;
  const double u_end = std::sqrt(lambda - low);
  const double p = static_cast<double>(params.p);
  const double needed = static_cast<double>(j_max - 1) / p;

  // Panels are integrated from the edge inward and only as far as the
  // deepest requested mass (plus a few for the spline).
  std::vector<double> u(1, 0.0), cum(1, 0.0);
  double error_sum = 0.0;
  std::size_t extra = 0;
  for (std::size_t k = 0; k < panels && extra < 3; ++k) {
    const double a = u_end * static_cast<double>(k) / static_cast<double>(panels);
    const double b = u_end * static_cast<double>(k + 1) / static_cast<double>(panels);
    double err = 0.0;
    const double mass = f.panel(a, b, &err);
    if (cum.back() < needed) error_sum += err;
    else ++extra;
    u.push_back(b);
    cum.push_back(cum.back() + mass);
  }
  table.quad_error = error_sum + 1e-15 * cum.back();

  if (needed > cum.back() + table.quad_error) {
    std::ostringstream msg;
    msg << "classical_locations: requested mass " << needed << " exceeds the mass " << cum.back()
        << " found above E = " << low;
    throw std::invalid_argument(msg.str());
  }

  const auto& cum_ref = cum;
  const boost::math::interpolators::pchip<std::vector<double>> spline{std::vector<double>(u),
                                                                       std::vector<double>(cum)};

  for (std::size_t j = 2; j <= j_max; ++j) {
    const double target = static_cast<double>(j - 1) / p;
    // First panel whose right end reaches the target mass.
    auto it = std::lower_bound(cum_ref.begin() + 1, cum_ref.end(), target);
    if (it == cum_ref.end()) --it;
    const auto k = static_cast<std::size_t>(it - cum_ref.begin()) - 1;
    double lo = u[k], hi = u[k + 1];

    // Bracketing guess from the cached spline.
    double a = lo, b = hi;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (a + b);
      (spline(mid) < target ? a : b) = mid;
    }
    double x = 0.5 * (a + b);

    // Polish against exact panel integrals with a safeguarded Newton iteration.
    for (int iter = 0; iter < 60; ++iter) {
      const double g = cum[k] + (x > u[k] ? f.panel(u[k], x, nullptr) : 0.0) - target;
      if (g < 0.0) lo = x; else hi = x;
      const double slope = f(x);
      double next = slope > 0.0 ? x - g / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x);
      x = next;
      if (step <= 1e-15 * u_end || hi - lo <= 1e-15 * u_end) break;
    }
    table.gamma.push_back(lambda - x * x);
  }
  return table;
}

double eta_lower(const ModelParams& params, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("eta_lower: require kappa >= 0");
  if (!(params.t >= 0.0) || params.n < 1) throw std::invalid_argument("eta_lower: invalid params");
  const double n = static_cast<double>(params.n);
  const auto f = [&](double eta) { return n * eta * (params.t + std::sqrt(kappa + eta)) - 1.0; };
  double lo = 0.0;
  double hi = 1.0 / n;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool in_domain(const ModelParams& params, const EdgeData& edge, ComplexPoint z, double vartheta,
               double c_v) {
  const double cv = c_v > 0.0 ? c_v : 0.5 * edge.lambda_plus;
  const double E = z.re;
  const double eta = z.im;
  if (!(eta > 0.0) || eta > 10.0) return false;
  const double n = static_cast<double>(params.n);
  const double t = params.t;
  const double lp = edge.lambda_plus;
  const double kappa = std::abs(E - lp);
  const double floor = std::pow(n, vartheta);
  const bool inner = lp - 0.75 * cv <= E && E <= lp + t * t / vartheta &&
                     n * eta * (t + std::sqrt(kappa + eta)) >= floor;
  const bool outer = lp <= E && E <= lp + 0.75 * cv && n * eta * std::sqrt(kappa + eta) >= floor;
  return inner || outer;
}

}  // namespace rectconv
