#pragma once

#include <optional>

#include "fnlslab/field.hpp"

namespace fnls {

// Sobolev/space-time norm parameters. M (>= 1) selects the mass-adapted weight
// (M^2 + xi^2)^{s/2}; absent M means the usual <xi> = (1 + xi^2)^{1/2} weight,
// i.e. M = 1. b applies to space-time norms only.
struct NormSpec {
    double s = 0.0;
    std::optional<double> M;
    std::optional<double> b;
};

// Dispersion symbol |xi(n)|^alpha of the grid frequency n.
double fractional_symbol(const GridSpec& grid, int n, double alpha);

// Scaling-critical Sobolev index (1 - alpha)/2.
double critical_index(double alpha);

enum class Domain { line, circle };

// Lowest Sobolev index with local well-posedness in the dispersive regime:
// (2 - alpha)/4 on the line, (2 - alpha)/6 on the circle. Requires alpha > 2.
double lwp_threshold(double alpha, Domain domain);

// (sum_n (M^2 + xi_n^2)^s |f(n)|^2)^{1/2}.
double sobolev_norm(const SpectralField& f, const NormSpec& spec);

// Proven growth exponents beta in sup_{t<=T} |u(t)|_{H^s} <~ T^beta |u_0|_{H^s}.
double sobolev_growth_exponent(double alpha, double s, double delta, Domain domain);

} // namespace fnls
