#include "rectconv/edge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "rectconv/error.hpp"

namespace rectconv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RealJet {
  double m = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// m_V and its first two derivatives at a real x > d_1.
RealJet real_jet(const Spectrum& spec, double x) {
  RealJet j;
  for (double d : spec.values()) {
    const double r = 1.0 / (d - x);
    j.m += r;
    j.d1 += r * r;
    j.d2 += r * r * r;
  }
  const double inv_p = 1.0 / static_cast<double>(spec.size());
  j.m *= inv_p;
  j.d1 *= inv_p;
  j.d2 *= 2.0 * inv_p;
  return j;
}

struct RealPhi {
  double ct;
  double a;

  double value(const RealJet& j, double x) const {
    const double g = 1.0 - ct * j.m;
    return x * g * g + a * g;
  }
  double first(const RealJet& j, double x) const {
    const double g = 1.0 - ct * j.m;
    return g * g - 2.0 * ct * j.d1 * x * g - ct * a * j.d1;
  }
  double second(const RealJet& j, double x) const {
    const double g = 1.0 - ct * j.m;
    const double q = ct * j.d1;
    return -2.0 * ct * j.d2 * x * g - 4.0 * q * g + 2.0 * x * q * q - ct * a * j.d2;
  }
};

}  // namespace

EdgeData find_right_edge(const Spectrum& spec, const ModelParams& params, const SolverConfig& cfg) {
  cfg.validate();
  if (!(params.t >= 0.0)) throw std::invalid_argument("find_right_edge: require t >= 0");
  const double d1 = spec.top();
  EdgeData e;
  if (params.t == 0.0) {
    e.lambda_plus = d1;
    e.zeta_plus = d1;
    e.xi_plus = 0.0;
    e.velocity = kNaN;
    e.sqrt_coeff = kNaN;
    e.phi_second = kNaN;
    return e;
  }

  const RealPhi f{params.c() * params.t, params.t * (1.0 - params.c())};
  const auto dphi = [&](double x) { return f.first(real_jet(spec, x), x); };

  const double eps = 1e-8 * std::max(1.0, std::abs(d1));
  double lo = d1 + eps;
  double hi = lo;
  double step = eps;
  double f_lo = dphi(lo);
  double f_hi = f_lo;
  while (!(f_hi > 0.0)) {
    lo = hi;
    f_lo = f_hi;
    step *= 2.0;
    hi = d1 + step;
    if (hi > d1 + 1e6) {
      std::ostringstream msg;
      msg << "find_right_edge: no sign change of Phi' on (" << d1 << ", " << d1 + 1e6 << ")";
      throw NumericalError(msg.str());
    }
    f_hi = dphi(hi);
  }
  if (!(f_lo < 0.0)) throw NumericalError("find_right_edge: Phi' is not negative next to d_1");

  std::uintmax_t max_iter = 200;
  const auto tol = [](double a, double b) {
    return std::abs(b - a) <= 1e-13 * std::max(std::abs(a), std::abs(b));
  };
  const auto bracket = boost::math::tools::toms748_solve(dphi, lo, hi, f_lo, f_hi, tol, max_iter);
  if (max_iter >= 200) throw NumericalError("find_right_edge: bracket solve hit the iteration cap");

  const double zeta = 0.5 * (bracket.first + bracket.second);
  const RealJet j = real_jet(spec, zeta);
  e.zeta_plus = zeta;
  e.xi_plus = zeta - d1;
  e.lambda_plus = f.value(j, zeta);
  e.phi_second = f.second(j, zeta);
  e.velocity = edge_velocity(spec, params, e, cfg);
  e.sqrt_coeff = sqrt_coefficient(spec, params, e);
  return e;
}

double edge_velocity(const Spectrum& spec, const ModelParams& params, const EdgeData& edge,
                     const SolverConfig&) {
  if (!(edge.zeta_plus > 0.0)) throw std::invalid_argument("edge_velocity: require zeta_plus > 0");
  const double c = params.c();
  const double t = params.t;
  const double zp = edge.zeta_plus;
  const double mv = real_jet(spec, zp).m;
  const double root = std::sqrt(t * t * (1.0 - c) * (1.0 - c) + 4.0 * zp * edge.lambda_plus);
  return ((1.0 - c) / (2.0 * zp) - c * mv) * root - (1.0 - c) * (1.0 - c) * t / (2.0 * zp);
}

double edge_velocity_via_mwt(const Spectrum& spec, const ModelParams& params, const EdgeData& edge,
                             const SolverConfig& cfg) {
  if (!(edge.zeta_plus > 0.0))
    throw std::invalid_argument("edge_velocity_via_mwt: require zeta_plus > 0");
  const double c = params.c();
  const double t = params.t;
  const double zp = edge.zeta_plus;
  // m_{w,t} is continuous up to the real axis; the error of sitting at eta is O(sqrt(eta)).
  const auto cp = solve_point(spec, params, {edge.lambda_plus, 1e-12}, cfg);
  const double ratio = (cp.m / cp.b).real();
  const double root = std::sqrt(t * t * (1.0 - c) * (1.0 - c) + 4.0 * zp * edge.lambda_plus);
  return ((1.0 - c) / (2.0 * zp) - c * ratio) * root - (1.0 - c) * (1.0 - c) * t / (2.0 * zp);
}

double sqrt_coefficient(const Spectrum&, const ModelParams& params, const EdgeData& edge) {
  if (!(edge.phi_second > 0.0)) throw std::invalid_argument("sqrt_coefficient: require phi_second > 0");
  const double c = params.c();
  const double t = params.t;
  const double bracket = 4.0 * edge.lambda_plus * edge.zeta_plus + (1.0 - c) * (1.0 - c) * t * t;
  return std::sqrt(2.0 / (bracket * c * c * t * t * edge.phi_second)) / std::numbers::pi;
}

double bbp_threshold(const Spectrum&, const ModelParams&, const EdgeData& edge) {
  return edge.zeta_plus;
}

double outlier_location(const Spectrum& spec, const ModelParams& params, double d,
                        const EdgeData& edge) {
  const double threshold = bbp_threshold(spec, params, edge);
  if (!(d > threshold)) {
    std::ostringstream msg;
    msg << "outlier_location: spike " << d << " is not above the threshold " << threshold;
    throw std::invalid_argument(msg.str());
  }
  const RealPhi f{params.c() * params.t, params.t * (1.0 - params.c())};
  return f.value(real_jet(spec, d), d);
}

}  // namespace rectconv
