#pragma once

#include <cstddef>
#include <vector>

#include "rectconv/edge.hpp"

namespace rectconv {

struct QuantileTable {
  std::vector<double> gamma;  // gamma[0] = lambda_plus, decreasing
  std::size_t j_max = 0;
  double quad_error = 0.0;
};

/// Options for the cumulative-mass grid used by classical_locations.
struct QuantileOptions {
  std::size_t grid_points = 2000;
  // Lower end of the integration window; defaults to just above the origin.
  double window_low = 0.0;
};

/// Classical eigenvalue locations: gamma_1 = lambda_plus and, for j >= 2,
/// the point where the density mass above it equals (j-1)/p.
///
/// The cumulative mass is tabulated on a grid uniform in u = sqrt(lambda_+ - E)
/// with a Gauss-Kronrod 7/15 rule per panel, interpolated by a monotone cubic
/// for bracketing, then each gamma_j is polished against exact panel integrals.
QuantileTable classical_locations(const Spectrum& spec, const ModelParams& params,
                                  std::size_t j_max, const EdgeData& edge,
                                  const SolverConfig& cfg = {}, const QuantileOptions& opt = {});

/// Positive root of n eta (t + sqrt(kappa + eta)) = 1.
double eta_lower(const ModelParams& params, double kappa);

/// Membership in the spectral domain D_theta (with its outer part).
/// c_v <= 0 selects the default 0.5 * lambda_plus.
bool in_domain(const ModelParams& params, const EdgeData& edge, ComplexPoint z, double vartheta,
               double c_v = 0.0);

}  // namespace rectconv
