#include "fnlslab/sigma4.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

double psi_phase(const PsiContext& ctx, int n1, int n2, int n3, int n4) {
    const SpectralField& u0 = ctx.reference_spectrum;
    return std::norm(u0.at(n1)) - std::norm(u0.at(n2)) + std::norm(u0.at(n3)) -
           std::norm(u0.at(n4));
}

namespace {

// Core quotient on xi variables. `resonant` must be the exact resonant-set
// indicator for the tuple; phi vanishes only there (alpha > 1 on a grid).
double sigma4_core(const IOperatorSpec& iop, double alpha, double xi1, double xi2, double xi3,
                   double xi4, bool resonant) {
    const double m1 = i_multiplier(xi1, iop);
    const double m2 = i_multiplier(xi2, iop);
    const double m3 = i_multiplier(xi3, iop);
    const double m4 = i_multiplier(xi4, iop);
    const double numerator = m1 * m1 - m2 * m2 + m3 * m3 - m4 * m4; // = -2i * M4
    const double phi = std::pow(std::abs(xi1), alpha) - std::pow(std::abs(xi2), alpha) +
                       std::pow(std::abs(xi3), alpha) - std::pow(std::abs(xi4), alpha);
    if (resonant || phi == 0.0) {
        if (numerator != 0.0)
            throw std::logic_error("sigma4: nonzero numerator over vanishing denominator");
        return 0.0;
    }
    // -i M4 / phi = -i (i/2) numerator / phi = numerator / (2 phi), real.
    return 0.5 * numerator / phi;
}

} // namespace

cplx sigma4(const GridSpec& grid, const IOperatorSpec& iop, double alpha, int n1, int n2, int n3,
            int n4, const PsiContext* psi, double time) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("sigma4: resonance classification requires alpha > 1");
    if (n1 - n2 + n3 - n4 != 0)
        throw std::invalid_argument("sigma4: modes must satisfy n1 - n2 + n3 - n4 = 0");
    const bool resonant = (n1 == n2) || (n2 == n3);
    const double value = sigma4_core(iop, alpha, grid.xi(n1), grid.xi(n2), grid.xi(n3),
                                     grid.xi(n4), resonant);
    if (!psi) return value;
    return value * std::polar(1.0, psi->coupling * time * psi_phase(*psi, n1, n2, n3, n4));
}

MultiplierOrderD multiplier_mass2(const IOperatorSpec& iop) {
    iop.validate();
    return {2, [iop](std::span<const double> xi) -> cplx {
                return i_multiplier(xi[0], iop) * i_multiplier(xi[1], iop);
            }};
}

MultiplierOrderD multiplier_M4(const IOperatorSpec& iop) {
    iop.validate();
    return {4, [iop](std::span<const double> xi) -> cplx {
                const double m1 = i_multiplier(xi[0], iop);
                const double m2 = i_multiplier(xi[1], iop);
                const double m3 = i_multiplier(xi[2], iop);
                const double m4 = i_multiplier(xi[3], iop);
                return cplx{0.0, 0.5} * (m1 * m1 - m2 * m2 + m3 * m3 - m4 * m4);
            }};
}

MultiplierOrderD multiplier_sigma4(const IOperatorSpec& iop, double alpha) {
    iop.validate();
    if (!(alpha > 1.0))
        throw std::invalid_argument("sigma4: resonance classification requires alpha > 1");
    return {4, [iop, alpha](std::span<const double> xi) -> cplx {
                // xi slots 1..3 are always direct grid values (also under the
                // slot-4 elongation), so these equalities detect the resonant
                // set exactly.
                const bool resonant = (xi[0] + xi[1] == 0.0) || (xi[1] + xi[2] == 0.0);
                return sigma4_core(iop, alpha, xi[0], xi[1], xi[2], xi[3], resonant);
            }};
}

MultiplierOrderD multiplier_M6(const IOperatorSpec& iop, double alpha) {
    MultiplierOrderD elongated = elongate(multiplier_sigma4(iop, alpha), 4, 2);
    auto inner = elongated.eval;
    return {6, [inner](std::span<const double> xi) -> cplx { return cplx{0.0, 1.0} * inner(xi); }};
}

} // namespace fnls
