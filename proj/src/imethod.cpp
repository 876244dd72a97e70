#include "fnlslab/imethod.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

void IOperatorSpec::validate() const {
    if (!(s < 0.0)) throw std::invalid_argument("smoothing multiplier: s must be negative");
    if (!(N >= 1.0)) throw std::invalid_argument("smoothing multiplier: N must be >= 1");
    if (M) {
        if (!(*M >= 1.0)) throw std::invalid_argument("smoothing multiplier: M must be >= 1");
        if (!(*M <= N * N))
            throw std::invalid_argument("smoothing multiplier: M must not exceed N^2");
    }
}

double i_multiplier(double xi, const IOperatorSpec& spec) {
    spec.validate();
    const double a = std::abs(xi);
    if (a <= spec.N) return 1.0;
    const double base = spec.M ? (*spec.M + a) / spec.N : a / spec.N;
    return std::min(1.0, std::pow(base, spec.s));
}

SpectralField apply_I(const SpectralField& u, const IOperatorSpec& spec) {
    spec.validate();
    SpectralField out = u;
    for (int idx = 0; idx < u.grid.modes; ++idx)
        out.coeffs[static_cast<std::size_t>(idx)] *=
            i_multiplier(u.grid.xi(u.grid.mode_at(idx)), spec);
    return out;
}

} // namespace fnls
