#include "fnlslab/field.hpp"

#include <cmath>
#include <stdexcept>

#include "fnlslab/fft.hpp"

namespace fnls {

double SpectralField::l2() const {
    double s = 0.0;
    for (const cplx& c : coeffs) s += std::norm(c);
    return std::sqrt(s);
}

double SpectralField::linf_coeff() const {
    double m = 0.0;
    for (const cplx& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

double mass(const SpectralField& f) {
    double s = 0.0;
    for (const cplx& c : f.coeffs) s += std::norm(c);
    return s;
}

bool SpectralField::finite() const {
    for (const cplx& c : coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

std::vector<cplx> synthesize(const SpectralField& f) {
    std::vector<cplx> samples = f.coeffs;
    fft_backward(samples); // e^{+i 2 pi j k / K} matches u(x_j) = sum coeff(n) e^{i xi(n) x_j}
    return samples;
}

SpectralField analyze(const GridSpec& grid, const std::vector<cplx>& samples, double time) {
    if (static_cast<int>(samples.size()) != grid.modes)
        throw std::invalid_argument("analyze: sample count does not match grid");
    SpectralField f(grid, time);
    f.coeffs = samples;
    fft_forward(f.coeffs);
    const double inv = 1.0 / grid.modes;
    for (cplx& c : f.coeffs) c *= inv;
    return f;
}

double physical_l2(const std::vector<cplx>& samples) {
    double s = 0.0;
    for (const cplx& c : samples) s += std::norm(c);
    return std::sqrt(s / static_cast<double>(samples.size()));
}

bool band_contains(const Band& band, int n) {
    const int a = std::abs(n);
    switch (band.kind) {
        case BandKind::dyadic:
            return band.N == 1 ? a <= 1 : (a > band.N / 2 && a <= band.N);
        case BandKind::at_most:
            return a <= band.N;
        case BandKind::above:
            return a > band.N;
    }
    return false;
}

SpectralField project(const SpectralField& f, const Band& band) {
    if (band.N < 1) throw std::invalid_argument("project: band threshold must be >= 1");
    if (band.kind == BandKind::dyadic && (band.N & (band.N - 1)) != 0)
        throw std::invalid_argument("project: dyadic band requires N a power of two");
    SpectralField out(f.grid, f.time);
    for (int n = f.grid.min_mode(); n <= f.grid.max_mode(); ++n)
        if (band_contains(band, n)) out.at(n) = f.at(n);
    return out;
}

} // namespace fnls
