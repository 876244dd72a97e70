#include "fnlslab/random_data.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

double Rng::uniform_unit() {
    // 53 uniform bits mapped to (0, 1]; never 0, so log() below is safe.
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_unit()));
    const double theta = two_pi * uniform_unit();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

cplx Rng::complex_normal() {
    const double re = standard_normal();
    const double im = standard_normal();
    return cplx{re, im} / std::sqrt(2.0);
}

SpectralField random_rough(const GridSpec& grid, std::uint64_t seed, double amplitude,
                           double gamma) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("random_rough: amplitude must be >= 0");
    Rng rng(seed);
    SpectralField field(grid);
    for (int idx = 0; idx < grid.modes; ++idx) {
        const int n = grid.mode_at(idx);
        const cplx g = rng.complex_normal();
        field.coeffs[static_cast<std::size_t>(idx)] =
            amplitude * g / std::pow(1.0 + double(n) * n, 0.5 * gamma);
    }
    const int cutoff = grid.cutoff();
    for (int idx = 0; idx < grid.modes; ++idx)
        if (std::abs(grid.mode_at(idx)) > cutoff) field.coeffs[static_cast<std::size_t>(idx)] = 0.0;
    return field;
}

SpectralField smooth_profile(const GridSpec& grid, double amplitude, double n0, double phi0) {
    if (!(n0 > 0.0)) throw std::invalid_argument("smooth_profile: width n0 must be positive");
    SpectralField field(grid);
    const int cutoff = grid.cutoff();
    for (int idx = 0; idx < grid.modes; ++idx) {
        const int n = grid.mode_at(idx);
        if (std::abs(n) > cutoff) continue;
        const double envelope = amplitude * std::exp(-(double(n) / n0) * (double(n) / n0));
        field.coeffs[static_cast<std::size_t>(idx)] = envelope * std::polar(1.0, phi0 * n);
    }
    return field;
}

} // namespace fnls
