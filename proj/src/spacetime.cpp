#include "fnlslab/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fnlslab/fft.hpp"

namespace fnls {

double Taper::weight(double theta) const {
    if (kind == TaperKind::none) return 1.0;
    const double f = fraction;
    if (f <= 0.0) return 1.0;
    if (theta < f) return 0.5 * (1.0 - std::cos(two_pi * 0.5 * theta / f));
    if (theta > 1.0 - f) return 0.5 * (1.0 - std::cos(two_pi * 0.5 * (1.0 - theta) / f));
    return 1.0;
}

std::string Taper::describe() const {
    if (kind == TaperKind::none) return "none";
    return "cosine(fraction=" + std::to_string(fraction) + ")";
}

SpaceTimeField::SpaceTimeField(const GridSpec& g, double T, int S, Taper w)
    : grid(g), t_end(T), time_samples(S), window(w) {
    if (!(T > 0.0)) throw std::invalid_argument("SpaceTimeField: t_end must be positive");
    if (S < 2) throw std::invalid_argument("SpaceTimeField: need at least two time samples");
    if (w.fraction < 0.0 || w.fraction > 0.5)
        throw std::invalid_argument("SpaceTimeField: taper fraction must lie in [0, 0.5]");
    values.assign(static_cast<std::size_t>(S) * g.modes, cplx{0.0, 0.0});
}

cplx& SpaceTimeField::at(int sample, int n) {
    return values[static_cast<std::size_t>(sample) * grid.modes + grid.storage_index(n)];
}

const cplx& SpaceTimeField::at(int sample, int n) const {
    return values[static_cast<std::size_t>(sample) * grid.modes + grid.storage_index(n)];
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

double xsb_norm(const SpaceTimeField& F, const NormSpec& spec, double alpha,
                Modulation modulation, const SpectralField* u0) {
    if (!spec.b) throw std::invalid_argument("xsb_norm: modulation exponent b is required");
    if (!power_of_two(F.time_samples))
        throw std::invalid_argument("xsb_norm: time_samples must be a power of two");
    if (modulation == Modulation::gauged) {
        if (u0 == nullptr)
            throw std::invalid_argument("xsb_norm: gauged modulation needs reference data u0");
        if (!(u0->grid == F.grid))
            throw std::invalid_argument("xsb_norm: reference data lives on a different grid");
    }

    const int S = F.time_samples;
    const int K = F.grid.modes;
    const double M = spec.M.value_or(1.0);
    const double b = *spec.b;

    double total = 0.0;
    std::vector<cplx> column(static_cast<std::size_t>(S));
    for (int idx = 0; idx < K; ++idx) {
        const int n = F.grid.mode_at(idx);
        for (int j = 0; j < S; ++j) {
            const double w = F.window.weight(static_cast<double>(j) / S);
            column[static_cast<std::size_t>(j)] =
                w * F.values[static_cast<std::size_t>(j) * K + idx];
        }
        fft_forward(column); // entry k is sum_j e^{-i tau_k t_j} column_j, tau_k = 2*pi*k/T
        const double xi = F.grid.xi(n);
        double mu = std::pow(std::abs(xi), alpha);
        if (modulation == Modulation::gauged) mu -= std::norm(u0->at(n));
        const double space_weight = std::pow(M * M + xi * xi, spec.s);
        for (int k = 0; k < S; ++k) {
            const int k_signed = (k < S / 2) ? k : k - S;
            const double tau = two_pi * k_signed / F.t_end;
            const double mod = 1.0 + (tau + mu) * (tau + mu);
            total += space_weight * std::pow(mod, b) * std::norm(column[k] / double(S));
        }
    }
    return std::sqrt(total);
}

double lp_spacetime_norm(const SpaceTimeField& F, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_spacetime_norm: need p >= 1");
    const int S = F.time_samples;
    const int K = F.grid.modes;
    const double cell = (F.t_end / S) * (F.grid.period / K);

    double total = 0.0;
    std::vector<cplx> row(static_cast<std::size_t>(K));
    for (int j = 0; j < S; ++j) {
        std::copy(F.values.begin() + static_cast<std::ptrdiff_t>(j) * K,
                  F.values.begin() + static_cast<std::ptrdiff_t>(j + 1) * K, row.begin());
        fft_backward(row);
        for (const cplx& v : row) total += std::pow(std::abs(v), p);
    }
    return std::pow(cell * total, 1.0 / p);
}

} // namespace fnls
