#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rectconv/spectrum.hpp"
#include "rectconv/stieltjes.hpp"

namespace rectconv {

/// Controls for the eta-homotopy solver.
struct SolverConfig {
  double tolerance = 1e-12;
  int max_iterations = 200;
  double eta_start = 10.0;
  double homotopy_factor = 0.7;
  double damping = 0.5;

  void validate() const;
};

/// Solution of the self-consistent equation at one spectral parameter.
struct ConvolutionPoint {
  ComplexPoint z;
  cplx m;        // m_{w,t}(z)
  cplx b;        // 1 + c t m
  cplx zeta;     // subordination function zeta_t(z) = b^2 z - b t (1-c)
  cplx m_under;  // c m - (1-c)/z
  double residual = 0.0;  // |Phi_t(zeta) - z|
  int iterations = 0;
};

/// Phi_t(zeta) = zeta (1 - c t m_V)^2 + (1-c) t (1 - c t m_V); inverse of zeta_t.
cplx phi(const Spectrum& spec, const ModelParams& params, cplx zeta);

/// First or second zeta-derivative of Phi_t.
cplx phi_derivative(const Spectrum& spec, const ModelParams& params, cplx zeta, int order);

/// F_t(z, zeta) = 1 + (t(1-c) - sqrt(t^2(1-c)^2 + 4 zeta z)) / (2 zeta) - c t m_V(zeta),
/// with the square-root branch fixed so that b = (t(1-c) + sqrt(.)) / (2z)
/// satisfies Im b > 0 and Im(z b) > Im z; Re b > 0 decides if both or neither do.
cplx f_equation(const Spectrum& spec, const ModelParams& params, cplx z, cplx zeta);

/// Unique Herglotz solution at z (Im z > 0).
///
/// Starts from a damped fixed-point iteration at E + i eta_start, then walks
/// eta down geometrically to the target, warm-starting Newton's method on
/// F_t(z, zeta) = 0 at each level. A level that fails to converge is retried
/// with a shorter step; NumericalError names the level when retries run out.
/// t = 0 returns m = m_V(z), zeta = z, b = 1 without iterating.
ConvolutionPoint solve_point(const Spectrum& spec, const ModelParams& params, ComplexPoint z,
                             const SolverConfig& cfg = {});

/// Same solution through damped fixed-point iteration of the m-equation only
/// (no Newton). Independent route for cross-checking solve_point.
ConvolutionPoint solve_point_fixed_point(const Spectrum& spec, const ModelParams& params,
                                         ComplexPoint z, const SolverConfig& cfg = {});

/// Assemble the record from a converged subordination value.
ConvolutionPoint point_from_zeta(const Spectrum& spec, const ModelParams& params, ComplexPoint z,
                                 cplx zeta, int iterations);

struct DensitySample {
  double E = 0.0;
  double rho = 0.0;
  double eta_used = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDensityEtaHigh = 1e-7;
inline constexpr double kDensityEtaLow = 5e-8;
inline constexpr double kDensityClamp = -1e-9;
inline constexpr double kDensityThreshold = 1e-6;

/// rho_{w,t}(E) = Im m_{w,t}(E + i0) / pi, extrapolated linearly in eta from
/// eta = 1e-7 and 5e-8. Values in [-1e-9, 0) are clamped to zero; anything
/// more negative is a NumericalError. E = 0 is rejected.
DensitySample density_sample(const Spectrum& spec, const ModelParams& params, double E,
                             const SolverConfig& cfg = {});
double density(const Spectrum& spec, const ModelParams& params, double E,
               const SolverConfig& cfg = {});

/// density_sample started by Newton from `zeta_hint`, the subordination value
/// at a nearby energy and eta = kDensityEtaHigh. Falls back to the full
/// homotopy when that start does not converge. On return `zeta_hint` holds
/// the value at E, ready for the next neighbour.
DensitySample density_sample_warm(const Spectrum& spec, const ModelParams& params, double E,
                                  cplx& zeta_hint, const SolverConfig& cfg = {});

struct SupportScan {
  std::vector<std::pair<double, double>> intervals;
  double grid_step = 0.0;
};

/// Maximal intervals in [lo, hi] where the density exceeds kDensityThreshold.
/// Boundaries are refined by bisection to step / 100. Requires t > 0.
SupportScan support_scan(const Spectrum& spec, const ModelParams& params, double lo, double hi,
                         double step, const SolverConfig& cfg = {});

}  // namespace rectconv
