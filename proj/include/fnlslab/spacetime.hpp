#pragma once

#include <string>

#include "fnlslab/field.hpp"
#include "fnlslab/norms.hpp"

namespace fnls {

// Time taper applied before the temporal transform. The analytic norm lives on
// the whole time line; we periodize a finite window, so the taper plays the
// role the smooth time cutoff plays in analysis. Probes must report it.
enum class TaperKind { none, cosine };
struct Taper {
    TaperKind kind = TaperKind::cosine;
    double fraction = 0.1; // ramp length on each end, as a fraction of the window

    double weight(double theta) const; // theta = t/T in [0, 1)
    std::string describe() const;
};

// Space-time sample matrix of spatial Fourier coefficients on [0, T).
// Row j holds the coefficients at t_j = j*T/S; S = time_samples.
struct SpaceTimeField {
    GridSpec grid;
    double t_end;
    int time_samples;
    Taper window;
    std::vector<cplx> values; // row-major, size S*K, storage order per row

    SpaceTimeField(const GridSpec& g, double T, int S, Taper w = {});

    cplx& at(int sample, int n);
    const cplx& at(int sample, int n) const;
    double t_of(int sample) const { return t_end * sample / time_samples; }
};

enum class Modulation { standard, gauged };

// Discrete restriction norm: taper in time, DFT to (tau, n), then
//   sum <xi_n>^{2s} <tau + |xi_n|^alpha>^{2b} |u(tau, n)|^2
// square-rooted. The gauged variant replaces |xi_n|^alpha by
// mu(n) = |xi_n|^alpha - |u0(n)|^2. Requires spec.b and a power-of-two S.
double xsb_norm(const SpaceTimeField& F, const NormSpec& spec, double alpha,
                Modulation modulation = Modulation::standard,
                const SpectralField* u0 = nullptr);

// Space-time Lebesgue norm (integral quadrature over the grid):
//   ( (T/S)(L/K) sum |u(t_j, x_m)|^p )^{1/p}.
double lp_spacetime_norm(const SpaceTimeField& F, double p);

} // namespace fnls
