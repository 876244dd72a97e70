#pragma once

#include <complex>
#include <vector>

#include "fnlslab/grid.hpp"

namespace fnls {

using cplx = std::complex<double>;

// Periodic complex field stored as Fourier coefficients with a timestamp.
// Convention: u(x) = sum_n coeff(n) e^{i*xi(n)*x}, so the mean-normalized
// physical L2 norm equals the l2 norm of the coefficients (Plancherel).
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coeffs; // FFT order, size K
    double time = 0.0;

    explicit SpectralField(const GridSpec& g, double t = 0.0)
        : grid(g), coeffs(static_cast<size_t>(g.modes)), time(t) {}

    cplx& at(int n) { return coeffs[static_cast<size_t>(grid.storage_index(n))]; }
    const cplx& at(int n) const { return coeffs[static_cast<size_t>(grid.storage_index(n))]; }

    double l2() const;
    double linf_coeff() const;
    bool finite() const;
};

// Conserved mass M(u) = sum_n |coeff(n)|^2 (= l2 squared).
double mass(const SpectralField& f);

// Physical samples u(x_j), x_j = j*L/K, via inverse transform.
std::vector<cplx> synthesize(const SpectralField& f);

// Coefficients of given physical samples (least-squares/trigonometric interpolant).
SpectralField analyze(const GridSpec& grid, const std::vector<cplx>& samples, double time = 0.0);

// Mean-normalized physical L2 norm: sqrt((1/K) * sum_j |u(x_j)|^2).
double physical_l2(const std::vector<cplx>& samples);

// Dyadic frequency bands: N = 1 covers |n| <= 1, N >= 2 dyadic covers N/2 < |n| <= N.
enum class BandKind { dyadic, at_most, above };
struct Band {
    BandKind kind;
    int N; // >= 1; must be a power of two for BandKind::dyadic
};
bool band_contains(const Band& band, int n);
SpectralField project(const SpectralField& f, const Band& band);

} // namespace fnls
