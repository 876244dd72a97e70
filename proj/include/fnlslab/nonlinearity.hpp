#pragma once

#include "fnlslab/equation.hpp"

namespace fnls {

// Cubic product |u|^2 u in coefficient space, exact for band-limited input:
// the input is truncated to the dealias band, the product is formed on a
// zero-padded 2K grid (no aliasing anywhere in |n| <= K/2), and the output is
// truncated back to the band. Time stamp is preserved.
SpectralField cubic_term(const SpectralField& u);

// Direct O(K^3) sum over the nonresonant set
//   Gamma(n) = { n = n1 - n2 + n3, n1 != n2, n2 != n3 }
// of v1 conj(v2) v3, output restricted to the dealias band. Reference path for
// the FFT-based evaluations; intended for small K.
SpectralField nonresonant_sum_direct(const SpectralField& v);

// Same sum with the interaction phase e^{i kappa t Psi(n1,n2,n3,n)} attached,
// Psi built from the frozen spectrum u0. Reference path for the gauged form.
SpectralField phased_nonresonant_sum_direct(const SpectralField& w, const SpectralField& u0,
                                            double kappa);

// N2(w)(n): the phased Gamma(n) sum at w.time, computed at FFT speed via the
// per-mode phase factorization (one padded convolution of the dressed field
// plus diagonal corrections). Agrees with phased_nonresonant_sum_direct.
SpectralField gauged_nonresonant_sum(const SpectralField& w, const SpectralField& u0,
                                     double kappa);

// The form-specific nonlinear term (see equation.hpp):
//   original:      |u|^2 u
//   renormalized:  (|v|^2 - 2 fint|v|^2) v  =  N1(v) - R1(v) on coefficients
//   gauged:        -i N2(w) + i R2(w), phases evaluated at u.time with the
//                  spec's phase coupling
// The integrator multiplies this by -i*kappa (original/renormalized) or kappa
// (gauged) to build du/dt minus the linear part.
SpectralField nonlinearity(const SpectralField& u, const EquationSpec& spec);

} // namespace fnls
