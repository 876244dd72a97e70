#pragma once

#include <optional>

#include "fnlslab/field.hpp"

namespace fnls {

// Smoothing-multiplier family for the modified masses. The multiplier is 1 up
// to |xi| = N and a clipped power law beyond:
//   line:   m(xi)   = min(1, (|xi|/N)^s)
//   torus:  m_M(xi) = 1 for |xi| <= N, else min(1, ((M+|xi|)/N)^s)
// (s < 0, so the line family is continuous at N while the torus family jumps
// at N; reports that depend on the multiplier carry a "multiplier_band" note.)
// Presence of M selects the torus family.
struct IOperatorSpec {
    double s;
    double N;
    std::optional<double> M;

    bool torus() const { return M.has_value(); }
    void validate() const; // s < 0, N >= 1, and for torus 1 <= M <= N^2
};

double i_multiplier(double xi, const IOperatorSpec& spec);

// Coefficientwise smoothing: out(n) = m(xi(n)) * u(n). Identity on |xi| <= N.
// Sandwich property: ||u||_{H^s} <= ||Iu||_{L2} <= C N^{-s} ||u||_{H^s}; the
// left inequality is exact (m(xi) <= 1 and m(xi) >= <xi>^s pointwise for the
// line family), the right holds with a scanned constant.
SpectralField apply_I(const SpectralField& u, const IOperatorSpec& spec);

} // namespace fnls
