#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rectconv {

/// Eigenvalues d_1 >= ... >= d_p >= 0 of the signal Gram matrix YY^T.
///
/// The counting measure of these atoms is the t = 0 spectral law; every
/// downstream quantity (Stieltjes transform, edge, quantiles) is a functional
/// of it. Instances are immutable and always sorted descending.
class Spectrum {
 public:
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Right edge of the t = 0 law, i.e. the largest atom d_1.
  double top() const noexcept { return values_.front(); }

 private:
  friend Spectrum make_spectrum(std::vector<double> values);
  explicit Spectrum(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

/// Sorts descending. Throws std::invalid_argument on an empty list or on a
/// negative / non-finite entry. Ties are legitimate atoms and are kept.
Spectrum make_spectrum(std::vector<double> values);

/// d_i = edge * (1 - ((i-1)/p)^{2/3}), i = 1..p: quantile atoms of a law whose
/// density vanishes like a square root at `edge`. Requires p >= 2, edge > 0.
Spectrum canonical_sqrt_spectrum(std::size_t p, double edge);

/// p atoms at the origin; the t > 0 convolution is the pure Marchenko-Pastur law.
Spectrum zero_spectrum(std::size_t p);

/// Dimensions and noise level. c = p / n is the aspect ratio.
struct ModelParams {
  std::size_t p = 1;
  std::size_t n = 1;
  double t = 0.0;

  double c() const noexcept { return static_cast<double>(p) / static_cast<double>(n); }
};

/// Validates 1 <= p <= n and finite t >= 0.
ModelParams make_params(std::size_t p, std::size_t n, double t);

struct RegularityReport {
  double eta_star = 0.0;
  double ratio_low_inside = 0.0;
  double ratio_high_inside = 0.0;
  double ratio_low_outside = 0.0;
  double ratio_high_outside = 0.0;
  // Window half-width c_V and constant C_V used for the grid and edge bounds.
  double c_v = 0.0;
  double big_c_v = 0.0;
  bool edge_bounds_ok = false;
  bool pass = false;
};

/// Grid check of square-root regularity of Im m_V around the top atom down to
/// scale eta_star.
///
/// Below the edge (E in [d_1 - c_V, d_1]) the ratio Im m_V / sqrt(|d_1-E|+eta)
/// is sampled for eta from eta_star + sqrt(eta_star |d_1-E|) up to 10; above
/// the edge (E in [d_1, d_1 + c_V]) the ratio Im m_V (|d_1-E|+eta) / eta is
/// sampled for eta from eta_star up to 10. The constants are derived from the
/// budget as C_V = C_budget and c_V = 1 / C_budget, and the report passes iff
/// all four extremal ratios lie in [1/C_budget, C_budget] and
/// 2 c_V <= d_1 <= C_V / 2.
RegularityReport regularity_check(const Spectrum& spec, double eta_star, double c_budget);

// Serialization: one eigenvalue per line, or {"values": [...]}.
void write_spectrum_text(std::ostream& os, const Spectrum& spec);
Spectrum read_spectrum_text(std::istream& is);
std::string spectrum_to_json(const Spectrum& spec);
Spectrum spectrum_from_json(const std::string& text);

}  // namespace rectconv
