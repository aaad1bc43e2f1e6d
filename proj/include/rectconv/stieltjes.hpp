#pragma once

#include <complex>

#include "rectconv/spectrum.hpp"

namespace rectconv {

using cplx = std::complex<double>;

/// z = E + i eta. Upper half-plane operations require im > 0.
struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;

  cplx value() const noexcept { return {re, im}; }
};

/// m_V(zeta) = (1/p) sum_i 1 / (d_i - zeta).
///
/// Throws std::invalid_argument when zeta lies within 1e-14 max(1, |zeta|) of
/// an atom.
cplx m_v(const Spectrum& spec, cplx zeta);

/// k-th derivative, k in {1, 2, 3}: (k!/p) sum_i (d_i - zeta)^{-(k+1)}.
cplx m_v_derivative(const Spectrum& spec, cplx zeta, int order);

/// m_V and its first two derivatives from a single pass over the atoms.
struct StieltjesJet {
  cplx m;
  cplx d1;
  cplx d2;
};
StieltjesJet m_v_jet(const Spectrum& spec, cplx zeta);

}  // namespace rectconv
