#pragma once

#include <cstdint>
#include <optional>

#include "fnlslab/field.hpp"

namespace fnls {

enum class Sign { defocusing, focusing };

// The three equivalent forms of the flow:
//   original      i u_t = D^alpha u + kappa |u|^2 u
//   renormalized  i v_t = D^alpha v + kappa (|v|^2 - 2 fint|v|^2) v
//   gauged        w_t + i|xi|^alpha w = kappa (-i N2(w) + i R2(w))
// with fint|u|^2 = sum_n |u_hat(n)|^2 and kappa = +1 defocusing / -1 focusing.
// The gauged form needs the frozen initial spectrum u0:
//   N2(w)(n) = sum over n = n1-n2+n3, n1 != n2, n2 != n3 of
//              e^{i kappa t Psi} w1 conj(w2) w3,
//   Psi = |u0(n1)|^2 - |u0(n2)|^2 + |u0(n3)|^2 - |u0(n)|^2,
//   R2(w)(n) = (|w(n)|^2 - |u0(n)|^2) w(n).
enum class EquationForm { original, renormalized, gauged };

struct InitialDataSpec {
    enum class Kind { coefficients, smooth, rough };
    Kind kind = Kind::smooth;
    double amplitude = 1.0;
    double n0 = 4.0;            // smooth: Gaussian envelope width in mode number
    double phi0 = 0.0;          // smooth: linear phase twist
    double gamma = 0.5;         // rough: decay exponent of <n>^-gamma
    std::uint64_t seed = 0;     // rough: RNG seed
    std::vector<cplx> coefficients; // explicit: storage order, length K
};

SpectralField make_initial_data(const GridSpec& grid, const InitialDataSpec& data);

struct EquationSpec {
    double alpha = 3.0;
    Sign sign = Sign::defocusing;
    EquationForm form = EquationForm::renormalized;
    InitialDataSpec initial_data;
    std::optional<SpectralField> reference_data; // frozen u0 spectrum; required when gauged
    bool linearized = false;                     // drop the cubic term (free flow)

    // Coupling kappa multiplying the nonlinearity: 0 when linearized, else +/-1.
    double coupling() const {
        if (linearized) return 0.0;
        return sign == Sign::defocusing ? 1.0 : -1.0;
    }
    // Sign carried by the gauge phases; unaffected by linearization.
    double phase_coupling() const { return sign == Sign::defocusing ? 1.0 : -1.0; }

    void validate(const GridSpec& grid) const; // alpha > 2, gauged needs matching u0
};

} // namespace fnls
