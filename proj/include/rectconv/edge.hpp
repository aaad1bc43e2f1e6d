#pragma once

#include "rectconv/freeconv.hpp"

namespace rectconv {

/// Right-most edge of the convolved law and its preimage under Phi_t.
/// At t = 0 the derivative quantities are undefined and stored as NaN.
struct EdgeData {
  double lambda_plus = 0.0;  // lambda_{+,t} = Phi_t(zeta_plus)
  double zeta_plus = 0.0;    // unique critical point of Phi_t on (d_1, inf)
  double xi_plus = 0.0;      // zeta_plus - d_1
  double velocity = 0.0;     // d lambda_{+,t} / dt
  double sqrt_coeff = 0.0;   // rho(E) ~ sqrt_coeff * sqrt(lambda_plus - E)
  double phi_second = 0.0;   // Phi_t''(zeta_plus)
};

/// Brackets the zero of the real function Phi_t' on (d_1, inf) by doubling
/// the offset from d_1 + 1e-8 max(1, d_1), then solves it with a safeguarded
/// bracketing method to relative 1e-12. Throws std::invalid_argument for t < 0
/// and NumericalError when no sign change is found below d_1 + 1e6.
EdgeData find_right_edge(const Spectrum& spec, const ModelParams& params,
                         const SolverConfig& cfg = {});

/// d lambda_{+,t}/dt from the closed form in terms of m_V(zeta_plus):
/// [(1-c)/(2 zeta_+) - c m_V(zeta_+)] sqrt(t^2 (1-c)^2 + 4 zeta_+ lambda_+) - (1-c)^2 t / (2 zeta_+).
double edge_velocity(const Spectrum& spec, const ModelParams& params, const EdgeData& edge,
                     const SolverConfig& cfg = {});

/// Same derivative written through m_{w,t}(lambda_plus) / b(lambda_plus); needs a solve
/// just right of the edge. Kept as a cross-check of edge_velocity.
double edge_velocity_via_mwt(const Spectrum& spec, const ModelParams& params,
                             const EdgeData& edge, const SolverConfig& cfg = {});

/// Prefactor of the square-root vanishing of the density at lambda_plus:
/// (1/pi) sqrt(2 / ([4 lambda_+ zeta_+ + (1-c)^2 t^2] c^2 t^2 Phi_t''(zeta_+))).
double sqrt_coefficient(const Spectrum& spec, const ModelParams& params, const EdgeData& edge);

/// Critical spike strength: atoms above zeta_plus produce an outlier.
double bbp_threshold(const Spectrum& spec, const ModelParams& params, const EdgeData& edge);

/// Predicted outlier location Phi_t(d) for a strictly supercritical atom d.
/// Throws std::invalid_argument when d <= bbp_threshold.
double outlier_location(const Spectrum& spec, const ModelParams& params, double d,
                        const EdgeData& edge);

}  // namespace rectconv
