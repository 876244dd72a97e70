#pragma once

#include "fnlslab/sigma4.hpp"

namespace fnls {

// M(Iu) = sum_n m(xi(n))^2 |u(n)|^2 = ||apply_I(u)||_{L2}^2.
double modified_mass(const SpectralField& u, const IOperatorSpec& spec);

struct CorrectedMass {
    double value;         // modified mass + coupling * correction
    double correction;    // real part of the quadrilinear correction sum
    double imag_residual; // |imaginary part| of that sum; asserted ~0
};

// Corrected modified mass along the coupling-kappa flow:
//   line  (psi null): M(Iu)    + kappa * Lambda_4(sigma4; u)
//   torus (psi set):  M(I_M w) + kappa * Lambda_4(e^{i k0 t Psi} sigma4_M; w),
// phases at u.time with k0 = psi->coupling. The correction scales with the
// equation's coupling (zero for a free run), which is what makes the free flow
// conserve this quantity exactly. The sum is provably real; an imaginary
// residue above 1e-12 (relative to max(1, |sum|)) throws. The quadrilinear
// loop parallelizes over global_jobs with a fixed pairwise reduction, so
// results are bit-identical for any job count.
CorrectedMass corrected_mass_detailed(const SpectralField& u, const IOperatorSpec& spec,
                                      double alpha, double coupling = 1.0,
                                      const PsiContext* psi = nullptr);
double corrected_mass(const SpectralField& u, const IOperatorSpec& spec, double alpha,
                      double coupling = 1.0, const PsiContext* psi = nullptr);

// Right side of the derivative identity for the band-truncated flow:
//   order 4: d/dt M(Iu)  = kappa   * Lambda_4(M4; u)          (torus: phased,
//            over the nonresonant set)
//   order 6: d/dt M4(Iu) = kappa^2 * 4 Re[i * order-6 sum]    (torus: plus the
//            diagonal quartic term II)
// The order-6 sums carry the indicator |n1 - n2 + n3| <= cutoff inherited from
// the truncated convolution, making the identities exact (up to rounding) for
// the flow the integrator actually runs. order 6 is guarded to K <= 32.
double mass_derivative_rhs(const SpectralField& u, const IOperatorSpec& spec, double alpha,
                           int order, double coupling = 1.0, const PsiContext* psi = nullptr);

// Per-mode transfer integrand 2 kappa Im(conj(w(n)) N2(w)(n)) in storage
// order: the integrand of d/dt |w(t,n)|^2 along the gauged flow (the resonant
// part contributes nothing). Time-quadrature of this recovers
// |w(t,n)|^2 - |u0(n)|^2.
std::vector<double> mode_mass_transfer_integrand(const SpectralField& w, const SpectralField& u0,
                                                 double coupling);

} // namespace fnls
