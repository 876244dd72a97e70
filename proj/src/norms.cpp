#include "fnlslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fnls {

double fractional_symbol(const GridSpec& grid, int n, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("fractional_symbol: alpha must be > 0");
    if (n == 0) return 0.0;
    return std::pow(std::abs(grid.xi(n)), alpha);
}

double critical_index(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("critical_index: alpha must be > 0");
    return (1.0 - alpha) / 2.0;
}

double lwp_threshold(double alpha, Domain domain) {
    if (!(alpha > 2.0))
        throw std::invalid_argument("lwp_threshold: defined only for alpha > 2");
    return domain == Domain::line ? (2.0 - alpha) / 4.0 : (2.0 - alpha) / 6.0;
}

double sobolev_norm(const SpectralField& f, const NormSpec& spec) {
    const double M = spec.M.value_or(1.0);
    if (M < 1.0) throw std::invalid_argument("sobolev_norm: M must be >= 1");
    double sum = 0.0;
    for (int n = f.grid.min_mode(); n <= f.grid.max_mode(); ++n) {
        const double xi = f.grid.xi(n);
        sum += std::pow(M * M + xi * xi, spec.s) * std::norm(f.at(n));
    }
    return std::sqrt(sum);
}

double sobolev_growth_exponent(double alpha, double s, double delta, Domain domain) {
    if (!(alpha > 2.0) || !(s < 0.0))
        throw std::invalid_argument("sobolev_growth_exponent: needs alpha > 2 and s < 0");
    if (domain == Domain::line) {
        const double a = alpha - 1.0 + 2.0 * s;
        return -s * a / ((2.0 * alpha - 2.0 - delta) * a + 2.0 * alpha * s);
    }
    const double denom = std::min(1.5 * alpha - 2.0 + 6.0 * s, alpha + 6.0 * s) - delta;
    return -2.0 * s / denom;
}

} // namespace fnls
