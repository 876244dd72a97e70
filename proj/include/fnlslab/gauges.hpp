#pragma once

#include "fnlslab/field.hpp"

namespace fnls {

enum class GaugeDirection { forward, inverse };

struct GaugeContext {
    SpectralField reference_spectrum; // frozen u0 spectrum
    double coupling = 1.0;            // +1 defocusing, -1 focusing
};

// Global-phase gauge: forward sends u(t) to e^{2 i kappa t fint|u(t)|^2} u(t)
// with fint|u|^2 = sum_n |u_hat(n)|^2; inverse applies the conjugate phase.
// The mean term is gauge-invariant, so inverse(forward(u)) == u exactly up to
// rounding. Preserves every |u_hat(n)|, hence every Sobolev norm.
SpectralField gauge_G(const SpectralField& u, GaugeDirection direction, double coupling = 1.0);

// Per-mode gauge: forward sends v_hat(n) to e^{-i kappa t |u0(n)|^2} v_hat(n);
// inverse applies the conjugate phase. Preserves each |v_hat(n)|.
SpectralField gauge_J(const SpectralField& v, const GaugeContext& ctx, GaugeDirection direction);

} // namespace fnls
