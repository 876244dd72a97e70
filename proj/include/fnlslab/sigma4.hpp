#pragma once

#include "fnlslab/imethod.hpp"
#include "fnlslab/multilinear.hpp"

namespace fnls {

// Phase context for the torus corrections: the frozen reference spectrum
// entering Psi and the coupling sign kappa of e^{i kappa t Psi}.
struct PsiContext {
    SpectralField reference_spectrum;
    double coupling = 1.0;
};

// Psi(n1,n2,n3,n4) = |u0(n1)|^2 - |u0(n2)|^2 + |u0(n3)|^2 - |u0(n4)|^2.
double psi_phase(const PsiContext& ctx, int n1, int n2, int n3, int n4);

// Correction multiplier on the quadruple hyperplane, in mode variables with
// the alternating convention n1 - n2 + n3 - n4 = 0:
//   sigma4 = -i M4 / phi,  M4 = (i/2)(m1^2 - m2^2 + m3^2 - m4^2),
//   phi = |xi1|^alpha - |xi2|^alpha + |xi3|^alpha - |xi4|^alpha,
// a real number. On the resonant set {n1 = n2} u {n2 = n3} (exactly where phi
// vanishes for alpha > 1) the value is 0; the numerator is asserted to vanish
// there, and a nonzero numerator over a zero denominator throws (convention
// bug). With a PsiContext the factor e^{i kappa t Psi} is attached; the torus
// family's indicator is this same resonant-set convention.
cplx sigma4(const GridSpec& grid, const IOperatorSpec& iop, double alpha, int n1, int n2, int n3,
            int n4, const PsiContext* psi = nullptr, double time = 0.0);

// Multiplier objects for the generic multilinear form. The sigma4 multiplier
// detects the resonant set from its direct slots (xi1 + xi2 = 0 or
// xi2 + xi3 = 0, exact for grid frequencies), which stays valid under the
// slot-4 elongation used by the order-6 identities.
MultiplierOrderD multiplier_mass2(const IOperatorSpec& iop);              // m(xi1) m(xi2)
MultiplierOrderD multiplier_M4(const IOperatorSpec& iop);                 // (i/2) alternating m^2
MultiplierOrderD multiplier_sigma4(const IOperatorSpec& iop, double alpha);
MultiplierOrderD multiplier_M6(const IOperatorSpec& iop, double alpha);   // i X^2_4(sigma4)

} // namespace fnls
