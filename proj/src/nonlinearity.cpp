#include "fnlslab/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

#include "fnlslab/fft.hpp"
#include "fnlslab/random_data.hpp"

namespace fnls {

SpectralField make_initial_data(const GridSpec& grid, const InitialDataSpec& data) {
    switch (data.kind) {
        case InitialDataSpec::Kind::coefficients: {
            if (static_cast<int>(data.coefficients.size()) != grid.modes)
                throw std::invalid_argument(
                    "initial data: coefficient count does not match the grid");
            SpectralField f(grid);
            f.coeffs = data.coefficients;
            const int cutoff = grid.cutoff();
            for (int idx = 0; idx < grid.modes; ++idx) {
                if (std::abs(grid.mode_at(idx)) > cutoff)
                    f.coeffs[static_cast<std::size_t>(idx)] = 0.0; // keep data band-limited
                else
                    f.coeffs[static_cast<std::size_t>(idx)] *= data.amplitude;
            }
            return f;
        }
        case InitialDataSpec::Kind::smooth:
            return smooth_profile(grid, data.amplitude, data.n0, data.phi0);
        case InitialDataSpec::Kind::rough:
            return random_rough(grid, data.seed, data.amplitude, data.gamma);
    }
    throw std::logic_error("initial data: unknown kind");
}

void EquationSpec::validate(const GridSpec& grid) const {
    if (!(alpha > 2.0))
        throw std::invalid_argument("equation: dispersion exponent alpha must exceed 2");
    if (form == EquationForm::gauged) {
        if (!reference_data)
            throw std::invalid_argument("equation: gauged form requires reference data");
        if (!(reference_data->grid == grid))
            throw std::invalid_argument("equation: reference data lives on a different grid");
    }
}

namespace {

// Banded mass: the nonlinearity acts on the dealias band only, so its diagonal
// corrections must count band modes only (identical to mass() for banded fields).
double banded_mass(const SpectralField& f) {
    const int cutoff = f.grid.cutoff();
    double s = 0.0;
    for (int n = -cutoff; n <= cutoff; ++n) s += std::norm(f.at(n));
    return s;
}

} // namespace

SpectralField cubic_term(const SpectralField& u) {
    const GridSpec& g = u.grid;
    const int K = g.modes;
    const int P = 2 * K; // fine grid: cubic products of band modes never alias (3*cutoff <= K)
    const int cutoff = g.cutoff();

    std::vector<cplx> pad(static_cast<std::size_t>(P), cplx{0.0, 0.0});
    for (int n = -cutoff; n <= cutoff; ++n) pad[static_cast<std::size_t>((n + P) % P)] = u.at(n);
    fft_backward(pad);
    for (cplx& z : pad) z *= std::norm(z);
    fft_forward(pad);

    SpectralField out(g, u.time);
    const double inv = 1.0 / P;
    for (int n = -cutoff; n <= cutoff; ++n) out.at(n) = pad[static_cast<std::size_t>((n + P) % P)] * inv;
    return out;
}

SpectralField nonresonant_sum_direct(const SpectralField& v) {
    const GridSpec& g = v.grid;
    const int c = g.cutoff();
    SpectralField out(g, v.time);
    for (int n1 = -c; n1 <= c; ++n1)
        for (int n2 = -c; n2 <= c; ++n2) {
            if (n2 == n1) continue;
            const cplx head = v.at(n1) * std::conj(v.at(n2));
            for (int n3 = -c; n3 <= c; ++n3) {
                if (n3 == n2) continue;
                const int n = n1 - n2 + n3;
                if (std::abs(n) > c) continue;
                out.at(n) += head * v.at(n3);
            }
        }
    return out;
}

SpectralField phased_nonresonant_sum_direct(const SpectralField& w, const SpectralField& u0,
                                            double kappa) {
    if (!(w.grid == u0.grid))
        throw std::invalid_argument("phased sum: reference data lives on a different grid");
    const GridSpec& g = w.grid;
    const int c = g.cutoff();
    std::vector<double> P(static_cast<std::size_t>(2 * c + 1));
    for (int n = -c; n <= c; ++n) P[static_cast<std::size_t>(n + c)] = std::norm(u0.at(n));

    const double t = w.time;
    SpectralField out(g, w.time);
    for (int n1 = -c; n1 <= c; ++n1)
        for (int n2 = -c; n2 <= c; ++n2) {
            if (n2 == n1) continue;
            const cplx head = w.at(n1) * std::conj(w.at(n2));
            for (int n3 = -c; n3 <= c; ++n3) {
                if (n3 == n2) continue;
                const int n = n1 - n2 + n3;
                if (std::abs(n) > c) continue;
                const double psi = P[static_cast<std::size_t>(n1 + c)] -
                                   P[static_cast<std::size_t>(n2 + c)] +
                                   P[static_cast<std::size_t>(n3 + c)] -
                                   P[static_cast<std::size_t>(n + c)];
                out.at(n) += std::polar(1.0, kappa * t * psi) * head * w.at(n3);
            }
        }
    return out;
}

SpectralField gauged_nonresonant_sum(const SpectralField& w, const SpectralField& u0,
                                     double kappa) {
    if (!(w.grid == u0.grid))
        throw std::invalid_argument("phased sum: reference data lives on a different grid");
    const int cutoff = w.grid.cutoff();
    const double t = w.time;

    // The interaction phase factorizes mode by mode: with
    // vt(m) = e^{i kappa t |u0(m)|^2} w(m), the phased Gamma(n) sum equals
    // e^{-i kappa t |u0(n)|^2} conv(vt)(n) - 2 mass(w) w(n) + |w(n)|^2 w(n),
    // turning the O(K^2)-per-mode sum into one padded convolution.
    SpectralField vt(w.grid, w.time);
    for (int n = -cutoff; n <= cutoff; ++n)
        vt.at(n) = std::polar(1.0, kappa * t * std::norm(u0.at(n))) * w.at(n);
    const SpectralField conv = cubic_term(vt);
    const double mw = banded_mass(w);

    SpectralField out(w.grid, w.time);
    for (int n = -cutoff; n <= cutoff; ++n) {
        const double Pn = std::norm(u0.at(n));
        const cplx wn = w.at(n);
        out.at(n) = std::polar(1.0, -kappa * t * Pn) * conv.at(n) - 2.0 * mw * wn +
                    std::norm(wn) * wn;
    }
    return out;
}

SpectralField nonlinearity(const SpectralField& u, const EquationSpec& spec) {
    spec.validate(u.grid);
    const int cutoff = u.grid.cutoff();

    switch (spec.form) {
        case EquationForm::original:
            return cubic_term(u);

        case EquationForm::renormalized: {
            SpectralField out = cubic_term(u);
            const double m = banded_mass(u);
            for (int n = -cutoff; n <= cutoff; ++n) out.at(n) -= 2.0 * m * u.at(n);
            return out;
        }

        case EquationForm::gauged: {
            const SpectralField& u0 = *spec.reference_data;
            const SpectralField n2 = gauged_nonresonant_sum(u, u0, spec.phase_coupling());

            SpectralField out(u.grid, u.time);
            const cplx i_unit{0.0, 1.0};
            for (int n = -cutoff; n <= cutoff; ++n) {
                const cplx wn = u.at(n);
                const cplx r2 = (std::norm(wn) - std::norm(u0.at(n))) * wn;
                out.at(n) = -i_unit * n2.at(n) + i_unit * r2;
            }
            return out;
        }
    }
    throw std::logic_error("nonlinearity: unknown form");
}

} // namespace fnls
