#pragma once

#include <cmath>
#include <numbers>

namespace fnls {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Uniform periodic grid holding K Fourier modes n in [-K/2, K/2).
// Coefficient storage is FFT order (0, 1, ..., K/2-1, -K/2, ..., -1);
// all public indexing is by signed mode number.
struct GridSpec {
    int modes;
    double period;
    double dealias_fraction;

    explicit GridSpec(int K, double L = two_pi, double frac = 2.0 / 3.0);

    // Largest |n| kept active by the dealias rule: floor(frac * K/2).
    int cutoff() const { return static_cast<int>(std::floor(dealias_fraction * (modes / 2))); }

    int min_mode() const { return -modes / 2; }
    int max_mode() const { return modes / 2 - 1; }
    bool holds_mode(int n) const { return n >= min_mode() && n <= max_mode(); }

    // Physical frequency of mode n; exactly the integer n when period == 2*pi
    // (keeps resonance and phase arithmetic exact on the default torus).
    double xi(int n) const { return period == two_pi ? n : two_pi * n / period; }

    int storage_index(int n) const { return n >= 0 ? n : n + modes; }
    int mode_at(int index) const { return index < modes / 2 ? index : index - modes; }

    bool operator==(const GridSpec&) const = default;
};

} // namespace fnls
