#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "fnlslab/field.hpp"
#include "fnlslab/imethod.hpp"
#include "fnlslab/integrator.hpp"
#include "fnlslab/masses.hpp"
#include "fnlslab/multilinear.hpp"
#include "fnlslab/nonlinearity.hpp"
#include "fnlslab/random_data.hpp"
#include "fnlslab/sigma4.hpp"
#include "oracles.hpp"

using namespace fnls;

namespace {

// Five-point fourth-order central difference for f'(t[2]), spacing h.
double fd4(const std::array<double, 5>& f, double h) {
    return (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
}

std::array<double, 5> sample5(const Trajectory& traj,
                              const std::function<double(const SpectralField&)>& fn) {
    REQUIRE(traj.completed());
    REQUIRE(traj.snapshots.size() == 5);
    std::array<double, 5> out{};
    for (int i = 0; i < 5; ++i) out[static_cast<std::size_t>(i)] = fn(traj.snapshots[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace

TEST_CASE("smoothing multiplier: values, jump, and validation") {
    const IOperatorSpec line{.s = -0.5, .N = 8.0, .M = {}};
    CHECK(i_multiplier(0.0, line) == 1.0);
    CHECK(i_multiplier(4.0, line) == 1.0);  // |xi| = N/2
    CHECK(i_multiplier(8.0, line) == 1.0);  // |xi| = N
    CHECK(i_multiplier(32.0, line) == doctest::Approx(0.5).epsilon(1e-15));  // (4N/N)^{-1/2}
    CHECK(i_multiplier(-32.0, line) == i_multiplier(32.0, line));

    const IOperatorSpec torus{.s = -0.5, .N = 8.0, .M = 64.0};
    CHECK(i_multiplier(8.0, torus) == 1.0);
    // The torus multiplier jumps at N: just above it pays ((M + |xi|)/N)^s.
    const double above = 8.0 * (1.0 + 1e-9);
    CHECK(i_multiplier(above, torus) ==
          doctest::Approx(std::pow((64.0 + above) / 8.0, -0.5)).epsilon(1e-12));
    CHECK(i_multiplier(above, torus) < 0.45);
    CHECK(i_multiplier(above, line) == doctest::Approx(1.0).epsilon(1e-8)); // line stays continuous

    // For |xi| > N the torus multiplier never exceeds the line one.
    for (double xi = 8.5; xi < 64.0; xi += 0.5) {
        CHECK(i_multiplier(xi, torus) <= i_multiplier(xi, line));
        CHECK(i_multiplier(xi, torus) > 0.0);
        CHECK(i_multiplier(xi, torus) <= 1.0);
    }

    CHECK_THROWS_AS(i_multiplier(1.0, IOperatorSpec{.s = 0.5, .N = 8.0, .M = {}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(i_multiplier(1.0, IOperatorSpec{.s = -0.5, .N = 0.5, .M = {}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(i_multiplier(1.0, IOperatorSpec{.s = -0.5, .N = 8.0, .M = 100.0}),
                    std::invalid_argument); // M > N^2
}

TEST_CASE("apply_I scales coefficients mode by mode") {
    const GridSpec g(32);
    const SpectralField u = random_rough(g, 3, 1.0, 0.2);
    const IOperatorSpec iop{.s = -0.75, .N = 4.0, .M = {}};
    const SpectralField Iu = apply_I(u, iop);
    for (int idx = 0; idx < g.modes; ++idx) {
        const double m = i_multiplier(g.xi(g.mode_at(idx)), iop);
        CHECK(Iu.coeffs[idx] == u.coeffs[idx] * m);
    }
    // modified mass is exactly the mass of the smoothed field.
    CHECK(modified_mass(u, iop) == doctest::Approx(mass(Iu)).epsilon(1e-14));
    // N at or above the band width makes the operator the identity.
    const IOperatorSpec wide{.s = -0.5, .N = 64.0, .M = {}};
    CHECK(modified_mass(u, wide) == mass(u));
}

TEST_CASE("order-2 multilinear form reproduces the modified mass") {
    const GridSpec g(32);
    const SpectralField u = random_rough(g, 4, 1.1, 0.4);
    const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = {}};
    const cplx val = lambda_d(multiplier_mass2(iop), u);
    CHECK(val.real() == doctest::Approx(modified_mass(u, iop)).epsilon(1e-13));
    CHECK(std::abs(val.imag()) <= 1e-13 * val.real());
}

TEST_CASE("order-4 multilinear form: generic loop vs reversed-order oracle") {
    const GridSpec g(16);
    const SpectralField u = random_rough(g, 12, 0.9, 0.3);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};

    for (const auto& mult : {multiplier_M4(iop), multiplier_sigma4(iop, 3.0)}) {
        const cplx fast = lambda_d(mult, u);
        const cplx slow = oracle::lambda4(mult, u);
        CHECK(std::abs(fast - slow) <= 1e-13 * std::max(1.0, std::abs(slow)));
    }
}

TEST_CASE("alternating multipliers make real forms on equal fields") {
    // conj(sigma(1,2,3,4)) = sigma(2,1,4,3) plus relabeling forces the form
    // onto the real axis; the imaginary part is pure rounding.
    const GridSpec g(16);
    const SpectralField u = random_rough(g, 13, 1.0, 0.2);
    const IOperatorSpec iop{.s = -1.0 / 3.0, .N = 4.0, .M = {}};

    const cplx m4 = lambda_d(multiplier_M4(iop), u);
    CHECK(std::abs(m4.imag()) <= 1e-11 * std::max(1.0, std::abs(m4.real())));
    const cplx s4 = lambda_d(multiplier_sigma4(iop, 2.5), u);
    CHECK(std::abs(s4.imag()) <= 1e-11 * std::max(1.0, std::abs(s4.real())));
}

TEST_CASE("elongation mechanics") {
    MultiplierOrderD probe;
    probe.d = 4;
    probe.eval = [](std::span<const double> xi) {
        return cplx{xi[0] + 10.0 * xi[1] + 100.0 * xi[2] + 1000.0 * xi[3], 0.0};
    };

    // k = 0 keeps the multiplier unchanged.
    const MultiplierOrderD same = elongate(probe, 2, 0);
    const std::array<double, 4> x{1.0, 2.0, 3.0, 4.0};
    CHECK(same.d == 4);
    CHECK(same.eval(std::span<const double>(x.data(), 4)) ==
          probe.eval(std::span<const double>(x.data(), 4)));

    // Slot 2 elongated by 2 sums three consecutive arguments into slot 2.
    const MultiplierOrderD wide = elongate(probe, 2, 2);
    CHECK(wide.d == 6);
    const std::array<double, 6> y{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    // collapsed slots: (1, 2+3+4, 5, 6)
    CHECK(wide.eval(std::span<const double>(y.data(), 6)) ==
          cplx{1.0 + 10.0 * 9.0 + 100.0 * 5.0 + 1000.0 * 6.0, 0.0});

    // Slot 4 elongation matches the order-6 correction multiplier layout.
    const MultiplierOrderD tail = elongate(probe, 4, 2);
    CHECK(tail.eval(std::span<const double>(y.data(), 6)) ==
          cplx{1.0 + 10.0 * 2.0 + 100.0 * 3.0 + 1000.0 * 15.0, 0.0});

    CHECK_THROWS_AS(elongate(probe, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(elongate(probe, 5, 2), std::invalid_argument);
    CHECK_THROWS_AS(elongate(probe, 2, 3), std::invalid_argument);
}

TEST_CASE("sigma4: hand values, resonant zeros, and the phase factor") {
    const GridSpec g(32);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};

    // (5, 2, -1, 2): num = (1/2)(m(5)^2 - 1 + 1 - 1) = (2/5 - 1)/2 = -0.3;
    // phi(alpha=3) = 125 - 8 + 1 - 8 = 110.
    const cplx val = sigma4(g, iop, 3.0, 5, 2, -1, 2);
    CHECK(val.real() == doctest::Approx(-0.3 / 110.0).epsilon(1e-14));
    CHECK(val.imag() == 0.0);

    // alpha = 2: integer powers are exact, so the quotient matches the
    // direct formula to the last bit of the division.
    const double num2 = 0.5 * (std::pow(i_multiplier(5.0, iop), 2) - std::pow(i_multiplier(2.0, iop), 2) +
                               std::pow(i_multiplier(1.0, iop), 2) - std::pow(i_multiplier(2.0, iop), 2));
    const double phi2 = 25.0 - 4.0 + 1.0 - 4.0;
    CHECK(sigma4(g, iop, 2.0, 5, 2, -1, 2).real() == doctest::Approx(num2 / phi2).epsilon(1e-14));

    // Resonant pairs vanish exactly.
    CHECK(sigma4(g, iop, 3.0, 4, 4, 7, 7) == cplx{0.0, 0.0});
    CHECK(sigma4(g, iop, 3.0, 4, 7, 7, 4) == cplx{0.0, 0.0});

    // The torus family attaches e^{i kappa t Psi}.
    PsiContext psi{random_rough(g, 21, 1.0, 0.3), -1.0};
    const double t = 0.4;
    const double phase = psi.coupling * t * psi_phase(psi, 5, 2, -1, 2);
    const cplx dressed = sigma4(g, iop, 3.0, 5, 2, -1, 2, &psi, t);
    CHECK(std::abs(dressed - val * std::polar(1.0, phase)) <= 1e-15);

    // psi_phase alternates the squared reference magnitudes.
    const auto P = [&](int n) { return std::norm(psi.reference_spectrum.at(n)); };
    CHECK(psi_phase(psi, 5, 2, -1, 2) ==
          doctest::Approx(P(5) - P(2) + P(-1) - P(2)).epsilon(1e-15));
}

TEST_CASE("order-6 multiplier collapses its tail slots onto sigma4") {
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};
    const double alpha = 3.0;
    const MultiplierOrderD m6 = multiplier_M6(iop, alpha);
    const MultiplierOrderD s4 = multiplier_sigma4(iop, alpha);
    REQUIRE(m6.d == 6);

    const std::array<double, 6> xi{3.0, -1.0, 2.0, -6.0, 1.0, 1.0};
    const std::array<double, 4> collapsed{3.0, -1.0, 2.0, -4.0};
    const cplx expect = cplx{0.0, 1.0} * s4.eval(std::span<const double>(collapsed.data(), 4));
    CHECK(std::abs(m6.eval(std::span<const double>(xi.data(), 6)) - expect) <= 1e-15);
}

TEST_CASE("corrected mass: trivial cases and the generic cross-check") {
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};
    const double alpha = 3.0;

    // A single mode admits no nonresonant quadruple: correction = 0.
    SpectralField lone(g);
    lone.at(3) = cplx{0.7, 0.2};
    const CorrectedMass cm = corrected_mass_detailed(lone, iop, alpha, 1.0);
    CHECK(cm.correction == 0.0);
    CHECK(cm.value == modified_mass(lone, iop));

    // Zero coupling reduces to the modified mass for any field.
    const SpectralField u = random_rough(g, 33, 0.8, 0.4);
    CHECK(corrected_mass(u, iop, alpha, 0.0) == modified_mass(u, iop));

    // The banded fast loop agrees with the generic multilinear form.
    const CorrectedMass detail = corrected_mass_detailed(u, iop, alpha, -1.0);
    const cplx generic = lambda_d(multiplier_sigma4(iop, alpha), u);
    CHECK(std::abs(detail.correction - generic.real()) <=
          1e-12 * std::max(1.0, std::abs(generic.real())));
    CHECK(detail.value ==
          doctest::Approx(modified_mass(u, iop) - generic.real()).epsilon(1e-12));
    CHECK(detail.imag_residual <= 1e-12 * std::max(1.0, std::abs(detail.correction)));
}

TEST_CASE("correction obeys the triangle bound with the max multiplier size") {
    // |sum sigma4 v1 v2 v3 v4| <= max|sigma4| * sum over the hyperplane of
    // |v1 v2 v3 v4|; a convention slip in either loop breaks this.
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};
    const double alpha = 2.5;
    const SpectralField u = random_rough(g, 55, 1.0, 0.1);

    const int c = g.cutoff();
    double worst_sigma = 0.0;
    double l1_quad = 0.0;
    for (int n1 = -c; n1 <= c; ++n1)
        for (int n2 = -c; n2 <= c; ++n2)
            for (int n3 = -c; n3 <= c; ++n3) {
                const int n4 = n1 - n2 + n3;
                if (std::abs(n4) > c) continue;
                const double mag = std::abs(sigma4(g, iop, alpha, n1, n2, n3, n4));
                worst_sigma = std::max(worst_sigma, mag);
                l1_quad += std::abs(u.at(n1)) * std::abs(u.at(n2)) * std::abs(u.at(n3)) *
                           std::abs(u.at(n4));
            }
    const CorrectedMass detail = corrected_mass_detailed(u, iop, alpha, 1.0);
    CHECK(std::abs(detail.correction) <= worst_sigma * l1_quad * (1.0 + 1e-12));
}

TEST_CASE("order-4 derivative sum matches the generic multilinear form") {
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 2.0, .M = {}};
    const SpectralField u = random_rough(g, 77, 0.9, 0.3);

    for (const double kappa : {1.0, -1.0}) {
        const double fast = mass_derivative_rhs(u, iop, 3.0, 4, kappa);
        const cplx generic = lambda_d(multiplier_M4(iop), u);
        CHECK(std::abs(fast - kappa * generic.real()) <=
              1e-12 * std::max(1.0, std::abs(generic.real())));
    }
    CHECK(mass_derivative_rhs(u, iop, 3.0, 4, 0.0) == 0.0);
    CHECK_THROWS_AS(mass_derivative_rhs(u, iop, 3.0, 5, 1.0), std::invalid_argument);
}

TEST_CASE("derivative law, order 4: finite differences along the flow (line family)") {
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = {}};
    const double alpha = 3.0;

    EquationSpec spec;
    spec.alpha = alpha;
    spec.sign = Sign::focusing;
    spec.form = EquationForm::original;
    const SpectralField u0 = smooth_profile(g, 0.6, 2.0, 0.2);
    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-4, .t_end = 4e-4, .store_every = 1};
    const Trajectory traj = run_from(u0, spec, integ);

    const auto series = sample5(traj, [&](const SpectralField& w) { return modified_mass(w, iop); });
    const double lhs = fd4(series, integ.dt);
    const double rhs = mass_derivative_rhs(traj.snapshots[2], iop, alpha, 4, spec.coupling());
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("derivative law, order 4: finite differences along the flow (torus family)") {
    const GridSpec g(16);
    const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = 16.0};
    const double alpha = 3.0;

    const SpectralField u0 = random_rough(g, 91, 0.5, 0.8);
    EquationSpec spec;
    spec.alpha = alpha;
    spec.sign = Sign::defocusing;
    spec.form = EquationForm::gauged;
    spec.reference_data = u0;
    const PsiContext psi{u0, spec.phase_coupling()};

    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-4, .t_end = 4e-4, .store_every = 1};
    const Trajectory traj = run_from(u0, spec, integ);

    const auto series = sample5(traj, [&](const SpectralField& w) { return modified_mass(w, iop); });
    const double lhs = fd4(series, integ.dt);
    const double rhs = mass_derivative_rhs(traj.snapshots[2], iop, alpha, 4, spec.coupling(), &psi);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("derivative law, order 6: corrected mass differentiates to the six-linear sum") {
    const GridSpec g(16);
    const double alpha = 3.0;
    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-4, .t_end = 4e-4, .store_every = 1};

    SUBCASE("line family: plain power-law multiplier, ungauged flow") {
        const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = {}};
        EquationSpec spec;
        spec.alpha = alpha;
        spec.sign = Sign::focusing;
        spec.form = EquationForm::original;
        const SpectralField u0 = smooth_profile(g, 0.6, 2.0, 0.1);
        const Trajectory traj = run_from(u0, spec, integ);
        const double kappa = spec.coupling();

        const auto series = sample5(
            traj, [&](const SpectralField& w) { return corrected_mass(w, iop, alpha, kappa); });
        const double lhs = fd4(series, integ.dt);
        const double rhs = mass_derivative_rhs(traj.snapshots[2], iop, alpha, 6, kappa);
        CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(1.0, std::abs(rhs)));
    }

    SUBCASE("torus family: mass-adapted multiplier, gauged flow") {
        const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = 16.0};
        const SpectralField u0 = random_rough(g, 101, 0.5, 0.8);
        EquationSpec spec;
        spec.alpha = alpha;
        spec.sign = Sign::defocusing;
        spec.form = EquationForm::gauged;
        spec.reference_data = u0;
        const PsiContext psi{u0, spec.phase_coupling()};
        const Trajectory traj = run_from(u0, spec, integ);
        const double kappa = spec.coupling();

        const auto series = sample5(traj, [&](const SpectralField& w) {
            return corrected_mass(w, iop, alpha, kappa, &psi);
        });
        const double lhs = fd4(series, integ.dt);
        const double rhs = mass_derivative_rhs(traj.snapshots[2], iop, alpha, 6, kappa, &psi);
        CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(1.0, std::abs(rhs)));
    }

    SUBCASE("free flow conserves the corrected mass to rounding") {
        const IOperatorSpec iop{.s = -0.5, .N = 4.0, .M = {}};
        EquationSpec spec;
        spec.alpha = alpha;
        spec.form = EquationForm::original;
        spec.linearized = true;
        const SpectralField u0 = random_rough(g, 111, 0.7, 0.3);
        const Trajectory traj = run_from(u0, spec, integ);
        const double base = corrected_mass(traj.snapshots[0], iop, alpha, 0.0);
        for (const SpectralField& w : traj.snapshots)
            CHECK(std::abs(corrected_mass(w, iop, alpha, 0.0) - base) <= 1e-12 * std::max(1.0, base));
    }

    const SpectralField big(GridSpec(64));
    CHECK_THROWS_AS(mass_derivative_rhs(big, IOperatorSpec{.s = -0.5, .N = 4.0, .M = {}}, alpha, 6, 1.0),
                    std::invalid_argument);
}

TEST_CASE("mode-mass transfer integrand integrates to the per-mode action change") {
    // |w(t, n)|^2 - |w(0, n)|^2 = integral of 2 kappa Im(conj(w) N2(w))(n).
    const GridSpec g(16);
    const double alpha = 3.0;
    const SpectralField u0 = random_rough(g, 121, 0.3, 0.5);

    EquationSpec spec;
    spec.alpha = alpha;
    spec.sign = Sign::defocusing;
    spec.form = EquationForm::gauged;
    spec.reference_data = u0;
    const double kappa = spec.coupling();

    const IntegratorSpec integ{.scheme = Scheme::rk4_interaction, .dt = 1e-3, .t_end = 0.05, .store_every = 1};
    const Trajectory traj = run_from(u0, spec, integ);
    REQUIRE(traj.completed());
    const std::size_t S = traj.snapshots.size();
    REQUIRE(S % 2 == 1); // even interval count for Simpson

    std::vector<std::vector<double>> rows(S);
    for (std::size_t j = 0; j < S; ++j)
        rows[j] = mode_mass_transfer_integrand(traj.snapshots[j], u0, kappa);

    const double h = integ.dt;
    for (int idx = 0; idx < g.modes; ++idx) {
        double integral = rows[0][static_cast<std::size_t>(idx)] + rows[S - 1][static_cast<std::size_t>(idx)];
        for (std::size_t j = 1; j + 1 < S; ++j)
            integral += (j % 2 == 1 ? 4.0 : 2.0) * rows[j][static_cast<std::size_t>(idx)];
        integral *= h / 3.0;
        const double change = std::norm(traj.snapshots.back().coeffs[static_cast<std::size_t>(idx)]) -
                              std::norm(u0.coeffs[static_cast<std::size_t>(idx)]);
        CHECK(std::abs(change - integral) <= 1e-9);
    }
}
