#include "rectconv/freeconv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rectconv/error.hpp"
#include "rectconv/kernels.hpp"

namespace rectconv {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be >= 1");
  if (!(eta_start > 0.0)) throw std::invalid_argument("solver: eta_start must be positive");
  if (!(homotopy_factor > 0.0 && homotopy_factor < 1.0))
    throw std::invalid_argument("solver: homotopy_factor must lie in (0, 1)");
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("solver: damping must lie in (0, 1]");
}

namespace {

struct Model {
  double c;
  double t;
  double ct;  // c t
  double a;   // t (1 - c)

  explicit Model(const ModelParams& p) : c(p.c()), t(p.t), ct(p.c() * p.t), a(p.t * (1.0 - p.c())) {}
};

struct Jet {
  cplx m;
  cplx m1;
};

// m_V and m_V' in one pass; callers keep zeta off the real axis.
Jet jet(const Spectrum& spec, cplx zeta) {
  double s_re = 0.0, s_im = 0.0, q_re = 0.0, q_im = 0.0;
  for (double d : spec.values()) {
    const double wr = d - zeta.real();
    const double wi = -zeta.imag();
    const double inv = 1.0 / (wr * wr + wi * wi);
    const double rr = wr * inv;
    const double ri = -wi * inv;
    s_re += rr;
    s_im += ri;
    q_re += rr * rr - ri * ri;
    q_im += 2.0 * rr * ri;
  }
  const double inv_p = 1.0 / static_cast<double>(spec.size());
  return {{s_re * inv_p, s_im * inv_p}, {q_re * inv_p, q_im * inv_p}};
}

double phi_residual(const Model& k, cplx zeta, cplx mv, cplx z) {
  const cplx g = 1.0 - k.ct * mv;
  return std::abs(zeta * g * g + k.a * g - z);
}

// Root of z b^2 - a b - zeta = 0 nearest to the reference value.
cplx branch_b(const Model& k, cplx z, cplx zeta, cplx b_ref) {
  const cplx s = std::sqrt(k.a * k.a + 4.0 * zeta * z);
  const cplx b1 = (k.a + s) / (2.0 * z);
  const cplx b2 = (k.a - s) / (2.0 * z);
  return std::abs(b1 - b_ref) <= std::abs(b2 - b_ref) ? b1 : b2;
}

bool herglotz_ok(const Model& k, cplx zeta, cplx mv) {
  if (!(zeta.imag() > 0.0) || !std::isfinite(zeta.real())) return false;
  const cplx g = 1.0 - k.ct * mv;
  // Im m = Im m_V / |g|^2 and b = 1/g, computed without cancellation.
  const double im_m = mv.imag() / std::norm(g);
  const double re_b = g.real() / std::norm(g);
  return im_m > 0.0 && re_b > 0.0;
}

// One damped fixed-point solve of m = (1/p) sum 1/(d_i/b - b z + t(1-c)).
struct FixedPointResult {
  bool ok = false;
  cplx m;
  int iterations = 0;
};

FixedPointResult fixed_point(const Spectrum& spec, const Model& k, cplx z, cplx m0,
                             const SolverConfig& cfg, int max_iterations) {
  FixedPointResult r;
  cplx m = m0;
  double omega = cfg.damping;
  double prev = INFINITY;
  for (int it = 1; it <= max_iterations; ++it) {
    const cplx b = 1.0 + k.ct * m;
    const cplx zeta = b * b * z - k.a * b;
    if (!(zeta.imag() > 0.0)) {
      // Left the domain; pull back toward the previous iterate.
      omega = std::max(omega * 0.5, 1e-4);
      m = 0.5 * (m + m0);
      continue;
    }
    const cplx m_new = b * jet(spec, zeta).m;
    const double diff = std::abs(m_new - m);
    r.iterations = it;
    if (!std::isfinite(diff)) return r;
    if (diff <= cfg.tolerance * std::max(1.0, std::abs(m))) {
      r.ok = true;
      r.m = m_new;
      return r;
    }
    if (diff > prev) omega = std::max(omega * 0.5, 1e-4);
    prev = diff;
    m += omega * (m_new - m);
  }
  r.m = m;
  return r;
}

// Eta-homotopy state along a vertical line Re z = E.
class Homotopy {
 public:
  Homotopy(const Spectrum& spec, const ModelParams& params, const SolverConfig& cfg, double energy)
      : spec_(spec), k_(params), cfg_(cfg), energy_(energy) {}

  void start(double eta) {
    const cplx z(energy_, eta);
    const auto fp = fixed_point(spec_, k_, z, m_v(spec_, z), cfg_, 50 * cfg_.max_iterations);
    iterations_ += fp.iterations;
    if (!fp.ok) {
      std::ostringstream msg;
      msg << "solve_point: fixed-point start did not converge at z = " << energy_ << " + " << eta << "i";
      throw NumericalError(msg.str());
    }
    const cplx b = 1.0 + k_.ct * fp.m;
    cplx zeta = b * b * z - k_.a * b;
    b_ = b;
    if (!newton(z, zeta, b, tolerance_for(eta, eta))) {
      std::ostringstream msg;
      msg << "solve_point: Newton polish failed at starting level eta = " << eta;
      throw NumericalError(msg.str());
    }
    eta_ = eta;
  }

  // Newton directly at eta from a nearby solution; false if it does not converge.
  bool start_from(double eta, cplx zeta_guess) {
    if (!(zeta_guess.imag() > 0.0)) return false;
    const cplx z(energy_, eta);
    const cplx b_guess = 1.0 / (1.0 - k_.ct * m_v(spec_, zeta_guess));
    if (!newton(z, zeta_guess, b_guess, cfg_.tolerance)) return false;
    eta_ = eta;
    return true;
  }

  // Walk down to eta_target by geometric steps, shortening a step on failure.
  void descend(double eta_target) {
    int failures = 0;
    while (eta_ > eta_target) {
      double next = std::max(eta_ * step_factor_, eta_target);
      bool done = false;
      while (!done) {
        const cplx z(energy_, next);
        cplx zeta = predict(next);
        cplx b = b_;
        if (newton(z, zeta, b, tolerance_for(next, eta_target))) {
          eta_ = next;
          done = true;
        } else {
          ++failures;
          const double ratio = next / eta_;
          if (ratio > 1.0 - 1e-6 || failures > 200) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "solve_point: no convergence descending from eta = " << eta_ << " to " << next
                << " at E = " << energy_;
            throw NumericalError(msg.str());
          }
          next = eta_ * std::sqrt(ratio);
        }
      }
    }
  }

  cplx zeta() const { return zeta_; }
  int iterations() const { return iterations_; }

 private:
  double tolerance_for(double eta, double eta_target) const {
    // Intermediate levels only need to land inside the next level's basin.
    if (eta <= eta_target) return cfg_.tolerance;
    return std::max(cfg_.tolerance, 1e-9 * std::max(1.0, std::hypot(energy_, eta)));
  }

  // First-order predictor along the homotopy: d zeta / d eta = i / Phi'(zeta).
  cplx predict(double eta_next) const {
    const Jet j = jet(spec_, zeta_);
    const cplx g = 1.0 - k_.ct * j.m;
    const cplx dphi = g * g - 2.0 * k_.ct * j.m1 * zeta_ * g - k_.ct * k_.a * j.m1;
    const cplx guess = zeta_ + cplx(0.0, eta_next - eta_) / dphi;
    if (std::isfinite(guess.real()) && std::isfinite(guess.imag()) && guess.imag() > 0.0)
      return guess;
    return zeta_;
  }

  // Newton on F_t(z, zeta) = 1 - 1/b - c t m_V(zeta), merit |Phi_t(zeta) - z|.
  bool newton(cplx z, cplx zeta, cplx b, double tol) {
    b = branch_b(k_, z, zeta, b);
    Jet j = jet(spec_, zeta);
    double res = phi_residual(k_, zeta, j.m, z);
    bool polished = false;
    for (int it = 0; it < cfg_.max_iterations; ++it) {
      if (!std::isfinite(res)) return false;
      if (res <= tol) {
        if (polished) break;
        polished = true;
      }
      const cplx db = 1.0 / (2.0 * b * z - k_.a);
      const cplx f = 1.0 - 1.0 / b - k_.ct * j.m;
      const cplx df = db / (b * b) - k_.ct * j.m1;
      const cplx delta = -f / df;
      if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) return false;
      ++iterations_;

      double lambda = 1.0;
      bool accepted = false;
      cplx cand;
      Jet cj{};
      double cres = INFINITY;
      for (int bt = 0; bt < 40; ++bt, lambda *= 0.5) {
        cand = zeta + lambda * delta;
        if (!(cand.imag() > 0.0)) continue;
        cj = jet(spec_, cand);
        cres = phi_residual(k_, cand, cj.m, z);
        if (cres < res) {
          accepted = true;
          break;
        }
        if (polished) break;
      }
      if (!accepted) {
        if (res <= tol) break;
        return false;
      }
      zeta = cand;
      j = cj;
      res = cres;
      b = branch_b(k_, z, zeta, b);
    }
    if (!(res <= tol) || !herglotz_ok(k_, zeta, j.m)) return false;
    zeta_ = zeta;
    b_ = 1.0 / (1.0 - k_.ct * j.m);
    return true;
  }

  const Spectrum& spec_;
  Model k_;
  const SolverConfig& cfg_;
  double energy_;
  double eta_ = 0.0;
  double step_factor_ = cfg_.homotopy_factor;
  cplx zeta_;
  cplx b_;
  int iterations_ = 0;
};

void check_solve_inputs(const ModelParams& params, ComplexPoint z, const SolverConfig& cfg) {
  cfg.validate();
  if (!(z.im > 0.0) || !std::isfinite(z.re) || !std::isfinite(z.im))
    throw std::invalid_argument("solve_point: require Im z > 0");
  if (!(params.t >= 0.0)) throw std::invalid_argument("solve_point: require t >= 0");
}

ConvolutionPoint t_zero_point(const Spectrum& spec, ComplexPoint z, double c) {
  ConvolutionPoint cp;
  cp.z = z;
  cp.m = m_v(spec, z.value());
  cp.b = 1.0;
  cp.zeta = z.value();
  cp.m_under = c * cp.m - (1.0 - c) / z.value();
  cp.residual = 0.0;
  cp.iterations = 0;
  return cp;
}

}  // namespace

cplx phi(const Spectrum& spec, const ModelParams& params, cplx zeta) {
  const Model k(params);
  const cplx g = 1.0 - k.ct * m_v(spec, zeta);
  return zeta * g * g + k.a * g;
}

cplx phi_derivative(const Spectrum& spec, const ModelParams& params, cplx zeta, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("phi_derivative: order must be 1 or 2");
  const Model k(params);
  const StieltjesJet j = m_v_jet(spec, zeta);
  const cplx g = 1.0 - k.ct * j.m;
  if (order == 1) return g * g - 2.0 * k.ct * j.d1 * zeta * g - k.ct * k.a * j.d1;
  return -2.0 * k.ct * j.d2 * zeta * g - 4.0 * k.ct * j.d1 * g +
         2.0 * zeta * (k.ct * j.d1) * (k.ct * j.d1) - k.ct * k.a * j.d2;
}

cplx f_equation(const Spectrum& spec, const ModelParams& params, cplx z, cplx zeta) {
  const Model k(params);
  const cplx s = std::sqrt(k.a * k.a + 4.0 * zeta * z);
  // b = 1 + c t m inherits Im b > 0 and Im(z b) > Im z from m. Near the
  // origin both roots can have Re b > 0, so Re b only breaks ties.
  const auto herglotz = [&](cplx b) { return b.imag() > 0.0 && (z * b).imag() > z.imag(); };
  const cplx b_plus = (k.a + s) / (2.0 * z);
  const cplx b_minus = (k.a - s) / (2.0 * z);
  bool plus = b_plus.real() > 0.0;
  if (herglotz(b_plus) != herglotz(b_minus)) plus = herglotz(b_plus);
  const cplx root = plus ? s : -s;
  return 1.0 + (k.a - root) / (2.0 * zeta) - k.ct * m_v(spec, zeta);
}

ConvolutionPoint point_from_zeta(const Spectrum& spec, const ModelParams& params, ComplexPoint z,
                                 cplx zeta, int iterations) {
  const Model k(params);
  const cplx mv = m_v(spec, zeta);
  const cplx g = 1.0 - k.ct * mv;
  ConvolutionPoint cp;
  cp.z = z;
  cp.zeta = zeta;
  cp.m = mv / g;
  cp.b = 1.0 + k.ct * cp.m;
  cp.m_under = k.c * cp.m - (1.0 - k.c) / z.value();
  cp.residual = std::abs(zeta * g * g + k.a * g - z.value());
  cp.iterations = iterations;
  return cp;
}

ConvolutionPoint solve_point(const Spectrum& spec, const ModelParams& params, ComplexPoint z,
                             const SolverConfig& cfg) {
  check_solve_inputs(params, z, cfg);
  if (params.t == 0.0) return t_zero_point(spec, z, params.c());
  Homotopy h(spec, params, cfg, z.re);
  h.start(std::max(z.im, cfg.eta_start));
  h.descend(z.im);
  return point_from_zeta(spec, params, z, h.zeta(), h.iterations());
}

ConvolutionPoint solve_point_fixed_point(const Spectrum& spec, const ModelParams& params,
                                         ComplexPoint z, const SolverConfig& cfg) {
  check_solve_inputs(params, z, cfg);
  if (params.t == 0.0) return t_zero_point(spec, z, params.c());
  const Model k(params);
  double eta = std::max(z.im, cfg.eta_start);
  cplx m = m_v(spec, cplx(z.re, eta));
  int iterations = 0;
  while (true) {
    const cplx zl(z.re, eta);
    const auto fp = fixed_point(spec, k, zl, m, cfg, 50 * cfg.max_iterations);
    iterations += fp.iterations;
    if (!fp.ok) {
      std::ostringstream msg;
      msg << "solve_point_fixed_point: no convergence at eta = " << eta;
      throw NumericalError(msg.str());
    }
    m = fp.m;
    if (eta <= z.im) break;
    eta = std::max(eta * cfg.homotopy_factor, z.im);
  }
  const cplx b = 1.0 + k.ct * m;
  const cplx zeta = b * b * z.value() - k.a * b;
  auto cp = point_from_zeta(spec, params, z, zeta, iterations);
  // Report the iterate itself rather than the value re-derived from zeta.
  cp.m = m;
  cp.b = b;
  cp.m_under = k.c * m - (1.0 - k.c) / z.value();
  return cp;
}

namespace {

DensitySample finish_density(const Spectrum& spec, const ModelParams& params, double E,
                             Homotopy& h, cplx* zeta_high) {
  DensitySample s;
  s.E = E;
  s.eta_used = kDensityEtaLow;
  const auto hi = point_from_zeta(spec, params, {E, kDensityEtaHigh}, h.zeta(), 0);
  if (zeta_high != nullptr) *zeta_high = h.zeta();
  h.descend(kDensityEtaLow);
  const auto lo = point_from_zeta(spec, params, {E, kDensityEtaLow}, h.zeta(), 0);
  s.residual = std::max(hi.residual, lo.residual);
  s.iterations = h.iterations();
  const double rho = (2.0 * lo.m.imag() - hi.m.imag()) / std::numbers::pi;
  if (rho < kDensityClamp) {
    std::ostringstream msg;
    msg << "density: extrapolated value " << rho << " at E = " << E << " is negative";
    throw NumericalError(msg.str());
  }
  s.rho = std::max(rho, 0.0);
  return s;
}

void check_density_inputs(double E, const SolverConfig& cfg) {
  cfg.validate();
  if (E == 0.0 || !std::isfinite(E))
    throw std::invalid_argument("density: E = 0 is excluded (the law may be singular there)");
}

DensitySample atoms_only_density(const Spectrum& spec, double E) {
  DensitySample s;
  s.E = E;
  s.eta_used = kDensityEtaLow;
  const double im_high = m_v(spec, cplx(E, kDensityEtaHigh)).imag();
  const double im_low = m_v(spec, cplx(E, kDensityEtaLow)).imag();
  s.rho = std::max((2.0 * im_low - im_high) / std::numbers::pi, 0.0);
  return s;
}

}  // namespace

DensitySample density_sample(const Spectrum& spec, const ModelParams& params, double E,
                             const SolverConfig& cfg) {
  check_density_inputs(E, cfg);
  if (params.t == 0.0) return atoms_only_density(spec, E);
  Homotopy h(spec, params, cfg, E);
  h.start(cfg.eta_start);
  h.descend(kDensityEtaHigh);
  return finish_density(spec, params, E, h, nullptr);
}

DensitySample density_sample_warm(const Spectrum& spec, const ModelParams& params, double E,
                                  cplx& zeta_hint, const SolverConfig& cfg) {
  check_density_inputs(E, cfg);
  if (params.t == 0.0) return atoms_only_density(spec, E);
  {
    Homotopy h(spec, params, cfg, E);
    try {
      if (h.start_from(kDensityEtaHigh, zeta_hint)) return finish_density(spec, params, E, h, &zeta_hint);
    } catch (const NumericalError&) {
    }
  }
  Homotopy h(spec, params, cfg, E);
  h.start(cfg.eta_start);
  h.descend(kDensityEtaHigh);
  return finish_density(spec, params, E, h, &zeta_hint);
}

double density(const Spectrum& spec, const ModelParams& params, double E, const SolverConfig& cfg) {
  return density_sample(spec, params, E, cfg).rho;
}

SupportScan support_scan(const Spectrum& spec, const ModelParams& params, double lo, double hi,
                         double step, const SolverConfig& cfg) {
  if (!(lo < hi)) throw std::invalid_argument("support_scan: require lo < hi");
  if (!(step > 0.0)) throw std::invalid_argument("support_scan: require step > 0");
  if (!(params.t > 0.0)) throw std::invalid_argument("support_scan: require t > 0");

  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = std::min(lo + step * static_cast<double>(i), hi);
  if (grid.back() < hi) grid.push_back(hi);

  // The law lives on (0, inf); the origin itself is never evaluated.
  const auto inside = [&](double e) {
    return e > 0.0 && density(spec, params, e, cfg) > kDensityThreshold;
  };
  const auto flags = map_indices(grid.size(), [&](std::size_t i) { return inside(grid[i]) ? 1 : 0; });

  const double resolution = step / 100.0;
  const auto refine = [&](double out, double in) {
    while (std::abs(in - out) > resolution) {
      const double mid = 0.5 * (in + out);
      (inside(mid) ? in : out) = mid;
    }
    return 0.5 * (in + out);
  };

  SupportScan scan;
  scan.grid_step = step;
  std::size_t i = 0;
  while (i < grid.size()) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() && flags[j + 1]) ++j;
    const double left = i == 0 ? grid[0] : refine(grid[i - 1], grid[i]);
    const double right = j + 1 == grid.size() ? grid[j] : refine(grid[j + 1], grid[j]);
    if (left < right) scan.intervals.emplace_back(std::max(left, 0.0), right);
    i = j + 1;
  }
  return scan;
}

}  // namespace rectconv
