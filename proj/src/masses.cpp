#include "fnlslab/masses.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "fnlslab/nonlinearity.hpp"
#include "fnlslab/reductions.hpp"

namespace fnls {

double modified_mass(const SpectralField& u, const IOperatorSpec& spec) {
    spec.validate();
    double s = 0.0;
    for (int idx = 0; idx < u.grid.modes; ++idx) {
        const double m = i_multiplier(u.grid.xi(u.grid.mode_at(idx)), spec);
        s += m * m * std::norm(u.coeffs[static_cast<std::size_t>(idx)]);
    }
    return s;
}

namespace {

// Per-mode tables over the dealias band, indexed by n + c. With a PsiContext
// the coefficients are dressed as e^{i k0 t |u0(n)|^2} u(n), which attaches
// the phase e^{i k0 t Psi} to every alternating product exactly.
struct BandTables {
    int c;
    std::vector<double> m2;   // m(xi(n))^2
    std::vector<double> phia; // |xi(n)|^alpha
    std::vector<cplx> v;      // (dressed) coefficients

    BandTables(const SpectralField& u, const IOperatorSpec& spec, double alpha,
               const PsiContext* psi) {
        c = u.grid.cutoff();
        const std::size_t size = static_cast<std::size_t>(2 * c + 1);
        m2.resize(size);
        phia.resize(size);
        v.resize(size);
        for (int n = -c; n <= c; ++n) {
            const double xi = u.grid.xi(n);
            const double m = i_multiplier(xi, spec);
            const std::size_t i = static_cast<std::size_t>(n + c);
            m2[i] = m * m;
            phia[i] = std::pow(std::abs(xi), alpha);
            cplx val = u.at(n);
            if (psi)
                val *= std::polar(1.0, psi->coupling * u.time *
                                           std::norm(psi->reference_spectrum.at(n)));
            v[i] = val;
        }
    }
};

enum class QuadKind {
    correction,      // sigma4 * v1 conj(v2) v3 conj(v4)
    derivative,      // (i/2)(m1^2-m2^2+m3^2-m4^2) * products
    weighted_quartic // sigma4 * |v1|^2 * products (the diagonal order-6 term)
};

// Quadruple sums over n1 - n2 + n3 - n4 = 0 in the band, skipping the
// resonant set {n1 = n2} u {n2 = n3} (where every multiplier here vanishes).
// The alternating numerators/denominators are grouped (a + c) - (b + d) so
// that conjugate-partner tuples cancel imaginary parts to rounding. Parallel
// over n1 with one partial per n1 and a pairwise-tree reduction: bit-stable
// for any job count.
cplx quad_sum(const BandTables& t, QuadKind kind, std::atomic<bool>& convention_bug) {
    const int c = t.c;
    const int count = 2 * c + 1;
    std::vector<cplx> partial(static_cast<std::size_t>(count), cplx{0.0, 0.0});
    parallel_indexed(count, [&](int i1) {
        const int n1 = i1 - c;
        cplx acc{0.0, 0.0};
        for (int n2 = -c; n2 <= c; ++n2) {
            if (n2 == n1) continue;
            const int base = n1 - n2;
            const cplx head = t.v[static_cast<std::size_t>(i1)] *
                              std::conj(t.v[static_cast<std::size_t>(n2 + c)]);
            const double m12 = t.m2[static_cast<std::size_t>(i1)];
            const double m22 = t.m2[static_cast<std::size_t>(n2 + c)];
            const double p1 = t.phia[static_cast<std::size_t>(i1)];
            const double p2 = t.phia[static_cast<std::size_t>(n2 + c)];
            const int lo = std::max(-c, -c - base);
            const int hi = std::min(c, c - base);
            for (int n3 = lo; n3 <= hi; ++n3) {
                if (n3 == n2) continue;
                const int n4 = base + n3;
                const double num = (m12 + t.m2[static_cast<std::size_t>(n3 + c)]) -
                                   (m22 + t.m2[static_cast<std::size_t>(n4 + c)]);
                if (num == 0.0) continue;
                cplx weight;
                if (kind == QuadKind::derivative) {
                    weight = cplx{0.0, 0.5 * num};
                } else {
                    const double phi = (p1 + t.phia[static_cast<std::size_t>(n3 + c)]) -
                                       (p2 + t.phia[static_cast<std::size_t>(n4 + c)]);
                    if (phi == 0.0) { // nonresonant zero denominator: convention bug
                        convention_bug.store(true);
                        continue;
                    }
                    weight = cplx{0.5 * num / phi, 0.0};
                    if (kind == QuadKind::weighted_quartic)
                        weight *= std::norm(t.v[static_cast<std::size_t>(i1)]);
                }
                acc += weight * head * t.v[static_cast<std::size_t>(n3 + c)] *
                       std::conj(t.v[static_cast<std::size_t>(n4 + c)]);
            }
        }
        partial[static_cast<std::size_t>(i1)] = acc;
    });
    return pairwise_sum(partial);
}

// D(coll) = sum over band pairs (n4, n5), n6 = coll - n4 + n5 in band,
// [nonresonant: n4 != n5, n5 != n6] of conj(v4) v5 conj(v6). Factoring the
// collapsed triple makes the order-6 sum O(c^3) + O(c^3).
std::vector<cplx> collapse_factors(const BandTables& t, bool nonresonant_triple) {
    const int c = t.c;
    std::vector<cplx> D(static_cast<std::size_t>(2 * c + 1), cplx{0.0, 0.0});
    for (int coll = -c; coll <= c; ++coll) {
        cplx acc{0.0, 0.0};
        for (int n4 = -c; n4 <= c; ++n4) {
            const cplx c4 = std::conj(t.v[static_cast<std::size_t>(n4 + c)]);
            for (int n5 = -c; n5 <= c; ++n5) {
                const int n6 = coll - n4 + n5;
                if (n6 < -c || n6 > c) continue;
                if (nonresonant_triple && (n5 == n4 || n5 == n6)) continue;
                acc += c4 * t.v[static_cast<std::size_t>(n5 + c)] *
                       std::conj(t.v[static_cast<std::size_t>(n6 + c)]);
            }
        }
        D[static_cast<std::size_t>(coll + c)] = acc;
    }
    return D;
}

// S6 = sum of sigma4(n1,n2,n3,coll) v1 conj(v2) v3 D(coll) over band triples
// with coll = n1 - n2 + n3 kept in band (the truncated convolution's reach).
cplx order6_sum(const BandTables& t, bool nonresonant_triple, std::atomic<bool>& convention_bug) {
    const std::vector<cplx> D = collapse_factors(t, nonresonant_triple);
    const int c = t.c;
    cplx total{0.0, 0.0};
    for (int n1 = -c; n1 <= c; ++n1)
        for (int n2 = -c; n2 <= c; ++n2) {
            if (n2 == n1) continue;
            const cplx head = t.v[static_cast<std::size_t>(n1 + c)] *
                              std::conj(t.v[static_cast<std::size_t>(n2 + c)]);
            for (int n3 = -c; n3 <= c; ++n3) {
                if (n3 == n2) continue;
                const int coll = n1 - n2 + n3;
                if (coll < -c || coll > c) continue;
                const double num =
                    (t.m2[static_cast<std::size_t>(n1 + c)] + t.m2[static_cast<std::size_t>(n3 + c)]) -
                    (t.m2[static_cast<std::size_t>(n2 + c)] + t.m2[static_cast<std::size_t>(coll + c)]);
                if (num == 0.0) continue;
                const double phi =
                    (t.phia[static_cast<std::size_t>(n1 + c)] + t.phia[static_cast<std::size_t>(n3 + c)]) -
                    (t.phia[static_cast<std::size_t>(n2 + c)] + t.phia[static_cast<std::size_t>(coll + c)]);
                if (phi == 0.0) {
                    convention_bug.store(true);
                    continue;
                }
                total += (0.5 * num / phi) * head * t.v[static_cast<std::size_t>(n3 + c)] *
                         D[static_cast<std::size_t>(coll + c)];
            }
        }
    return total;
}

void check_psi(const SpectralField& u, const PsiContext* psi) {
    if (psi && !(psi->reference_spectrum.grid == u.grid))
        throw std::invalid_argument("masses: reference data lives on a different grid");
}

[[noreturn]] void throw_convention_bug() {
    throw std::logic_error("sigma4: nonzero numerator over vanishing denominator");
}

} // namespace

CorrectedMass corrected_mass_detailed(const SpectralField& u, const IOperatorSpec& spec,
                                      double alpha, double coupling, const PsiContext* psi) {
    spec.validate();
    check_psi(u, psi);
    if (!(alpha > 1.0))
        throw std::invalid_argument("masses: resonance classification requires alpha > 1");

    const BandTables tables(u, spec, alpha, psi);
    std::atomic<bool> bug{false};
    const cplx sum = quad_sum(tables, QuadKind::correction, bug);
    if (bug.load()) throw_convention_bug();

    CorrectedMass out;
    out.correction = sum.real();
    out.imag_residual = std::abs(sum.imag());
    out.value = modified_mass(u, spec) + coupling * out.correction;
    if (out.imag_residual > 1e-12 * std::max(1.0, std::abs(sum.real())))
        throw std::runtime_error("corrected mass: quadrilinear sum has an imaginary residue");
    return out;
}

double corrected_mass(const SpectralField& u, const IOperatorSpec& spec, double alpha,
                      double coupling, const PsiContext* psi) {
    return corrected_mass_detailed(u, spec, alpha, coupling, psi).value;
}

double mass_derivative_rhs(const SpectralField& u, const IOperatorSpec& spec, double alpha,
                           int order, double coupling, const PsiContext* psi) {
    spec.validate();
    check_psi(u, psi);
    if (!(alpha > 1.0))
        throw std::invalid_argument("masses: resonance classification requires alpha > 1");
    if (order != 4 && order != 6)
        throw std::invalid_argument("mass derivative: order must be 4 or 6");
    if (order == 6 && u.grid.modes > 32)
        throw std::invalid_argument("mass derivative: order 6 restricted to K <= 32");

    const BandTables tables(u, spec, alpha, psi);
    std::atomic<bool> bug{false};

    if (order == 4) {
        const cplx sum = quad_sum(tables, QuadKind::derivative, bug);
        if (bug.load()) throw_convention_bug();
        if (std::abs(sum.imag()) > 1e-12 * std::max(1.0, std::abs(sum.real())))
            throw std::runtime_error("mass derivative: quadrilinear sum has an imaginary residue");
        return coupling * sum.real();
    }

    // order 6: 4 Re[i S6] (+ torus diagonal term), both scaled by coupling^2.
    const bool torus_flow = psi != nullptr;
    cplx s6 = order6_sum(tables, torus_flow, bug);
    if (torus_flow) s6 += quad_sum(tables, QuadKind::weighted_quartic, bug);
    if (bug.load()) throw_convention_bug();
    return coupling * coupling * (-4.0) * s6.imag();
}

std::vector<double> mode_mass_transfer_integrand(const SpectralField& w, const SpectralField& u0,
                                                 double coupling) {
    if (!(w.grid == u0.grid))
        throw std::invalid_argument("masses: reference data lives on a different grid");
    const SpectralField n2 = gauged_nonresonant_sum(w, u0, coupling);
    std::vector<double> out(static_cast<std::size_t>(w.grid.modes), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 2.0 * coupling * std::imag(std::conj(w.coeffs[i]) * n2.coeffs[i]);
    return out;
}

} // namespace fnls
