#include "rectconv/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rectconv/stieltjes.hpp"

namespace rectconv {

Spectrum make_spectrum(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("spectrum: empty list");
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("spectrum: entries must be finite and >= 0");
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return Spectrum(std::move(values));
}

Spectrum canonical_sqrt_spectrum(std::size_t p, double edge) {
  if (p < 2) throw std::invalid_argument("canonical_sqrt_spectrum: p must be >= 2");
  if (!(edge > 0.0) || !std::isfinite(edge))
    throw std::invalid_argument("canonical_sqrt_spectrum: edge must be positive");
  std::vector<double> d(p);
  const double pd = static_cast<double>(p);
  for (std::size_t i = 0; i < p; ++i)
    d[i] = edge * (1.0 - std::pow(static_cast<double>(i) / pd, 2.0 / 3.0));
  return make_spectrum(std::move(d));
}

Spectrum zero_spectrum(std::size_t p) {
  if (p == 0) throw std::invalid_argument("zero_spectrum: p must be >= 1");
  return make_spectrum(std::vector<double>(p, 0.0));
}

ModelParams make_params(std::size_t p, std::size_t n, double t) {
  if (p == 0 || n == 0) throw std::invalid_argument("params: p and n must be positive");
  if (p > n) throw std::invalid_argument("params: require p <= n");
  if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("params: require t >= 0");
  return ModelParams{p, n, t};
}

namespace {

constexpr int kEtaPerDecade = 40;
constexpr int kEnergyPoints = 60;
constexpr double kEtaMax = 10.0;

std::vector<double> log_grid(double lo, double hi) {
  std::vector<double> out;
  if (lo >= hi) {
    out.push_back(hi);
    return out;
  }
  const double decades = std::log10(hi / lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * kEtaPerDecade)) + 1);
  out.reserve(count);
  for (int k = 0; k < count; ++k)
    out.push_back(lo * std::pow(10.0, decades * k / (count - 1)));
  return out;
}

}  // namespace

RegularityReport regularity_check(const Spectrum& spec, double eta_star, double c_budget) {
  if (!(eta_star > 0.0 && eta_star < 1.0))
    throw std::invalid_argument("regularity_check: eta_star must lie in (0, 1)");
  if (!(c_budget > 1.0)) throw std::invalid_argument("regularity_check: C_budget must exceed 1");

  RegularityReport r;
  r.eta_star = eta_star;
  r.big_c_v = c_budget;
  r.c_v = std::isfinite(c_budget) ? 1.0 / c_budget : 0.0;
  const double top = spec.top();

  double lo_in = INFINITY, hi_in = 0.0, lo_out = INFINITY, hi_out = 0.0;
  for (int k = 0; k < kEnergyPoints; ++k) {
    const double frac = static_cast<double>(k) / (kEnergyPoints - 1);
    // Below the edge.
    {
      const double e = top - r.c_v * frac;
      const double kappa = top - e;
      for (double eta : log_grid(eta_star + std::sqrt(eta_star * kappa), kEtaMax)) {
        const double im = m_v(spec, {e, eta}).imag();
        const double ratio = im / std::sqrt(kappa + eta);
        lo_in = std::min(lo_in, ratio);
        hi_in = std::max(hi_in, ratio);
      }
    }
    // Above the edge.
    {
      const double e = top + r.c_v * frac;
      const double kappa = e - top;
      for (double eta : log_grid(eta_star, kEtaMax)) {
        const double im = m_v(spec, {e, eta}).imag();
        const double ratio = im * (kappa + eta) / eta;
        lo_out = std::min(lo_out, ratio);
        hi_out = std::max(hi_out, ratio);
      }
    }
  }
  r.ratio_low_inside = lo_in;
  r.ratio_high_inside = hi_in;
  r.ratio_low_outside = lo_out;
  r.ratio_high_outside = hi_out;

  // ||V|| = d_1, so the polynomial norm bound is implied by d_1 <= C_V / 2.
  r.edge_bounds_ok = 2.0 * r.c_v <= top && top <= r.big_c_v / 2.0;
  const auto within = [&](double x) { return x >= 1.0 / c_budget && x <= c_budget; };
  r.pass = r.edge_bounds_ok && within(lo_in) && within(hi_in) && within(lo_out) && within(hi_out);
  return r;
}

void write_spectrum_text(std::ostream& os, const Spectrum& spec) {
  std::ostringstream buf;
  buf.precision(17);
  for (double v : spec.values()) buf << v << '\n';
  os << buf.str();
}

Spectrum read_spectrum_text(std::istream& is) {
  std::vector<double> values;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string field = line.substr(first);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || field.find_first_not_of(" \t\r", used) != std::string::npos)
      throw std::invalid_argument("spectrum: cannot parse line '" + line + "'");
    values.push_back(v);
  }
  return make_spectrum(std::move(values));
}

std::string spectrum_to_json(const Spectrum& spec) {
  nlohmann::json j;
  j["values"] = spec.values();
  return j.dump();
}

Spectrum spectrum_from_json(const std::string& text) {
  std::vector<double> values;
  try {
    const auto j = nlohmann::json::parse(text);
    values = (j.is_array() ? j : j.at("values")).get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("spectrum: bad JSON: ") + e.what());
  }
  return make_spectrum(std::move(values));
}

}  // namespace rectconv
