#include "fnlslab/gauges.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

SpectralField gauge_G(const SpectralField& u, GaugeDirection direction, double coupling) {
    const double sign = direction == GaugeDirection::forward ? 1.0 : -1.0;
    const cplx phase = std::polar(1.0, sign * 2.0 * coupling * u.time * mass(u));
    SpectralField out = u;
    for (cplx& c : out.coeffs) c *= phase;
    return out;
}

SpectralField gauge_J(const SpectralField& v, const GaugeContext& ctx, GaugeDirection direction) {
    if (!(ctx.reference_spectrum.grid == v.grid))
        throw std::invalid_argument("gauge: reference data lives on a different grid");
    const double sign = direction == GaugeDirection::forward ? -1.0 : 1.0;
    SpectralField out = v;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] *= std::polar(
            1.0, sign * ctx.coupling * v.time * std::norm(ctx.reference_spectrum.coeffs[i]));
    return out;
}

} // namespace fnls
