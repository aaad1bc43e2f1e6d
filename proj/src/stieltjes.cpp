#include "rectconv/stieltjes.hpp"

#include <cmath>
#include <stdexcept>

namespace rectconv {

namespace {

constexpr double kAtomGuard = 1e-14;

void check_atom_distance(const Spectrum& spec, cplx zeta) {
  const double guard = kAtomGuard * std::max(1.0, std::abs(zeta));
  if (std::abs(zeta.imag()) > guard) return;
  for (double d : spec.values()) {
    if (std::abs(d - zeta.real()) <= guard && std::abs(cplx(d, 0.0) - zeta) <= guard)
      throw std::invalid_argument("m_v: argument coincides with an atom");
  }
}

// 1 / w without the inf/nan bookkeeping of the library complex division.
inline cplx reciprocal(cplx w) {
  const double s = w.real() * w.real() + w.imag() * w.imag();
  return {w.real() / s, -w.imag() / s};
}

}  // namespace

cplx m_v(const Spectrum& spec, cplx zeta) {
  check_atom_distance(spec, zeta);
  cplx sum = 0.0;
  for (double d : spec.values()) sum += reciprocal(d - zeta);
  return sum / static_cast<double>(spec.size());
}

cplx m_v_derivative(const Spectrum& spec, cplx zeta, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("m_v_derivative: order must be 1, 2 or 3");
  check_atom_distance(spec, zeta);
  cplx sum = 0.0;
  for (double d : spec.values()) {
    const cplx r = reciprocal(d - zeta);
    cplx term = r * r;
    for (int k = 1; k < order; ++k) term *= r;
    sum += term;
  }
  static constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0};
  return kFactorial[order] * sum / static_cast<double>(spec.size());
}

StieltjesJet m_v_jet(const Spectrum& spec, cplx zeta) {
  check_atom_distance(spec, zeta);
  cplx s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (double d : spec.values()) {
    const cplx r = reciprocal(d - zeta);
    const cplx r2 = r * r;
    s1 += r;
    s2 += r2;
    s3 += r2 * r;
  }
  const double inv_p = 1.0 / static_cast<double>(spec.size());
  return {s1 * inv_p, s2 * inv_p, 2.0 * s3 * inv_p};
}

}  // namespace rectconv
