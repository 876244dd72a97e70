#pragma once

#include <cstdint>
#include <random>

#include "fnlslab/field.hpp"

namespace fnls {

// Deterministic Gaussian source. Normals come from Box-Muller applied to
// uniforms built directly from mt19937_64 output words, so streams are
// bit-identical across standard libraries (std::normal_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double standard_normal();
    cplx complex_normal(); // E|z|^2 = 1, independent re/im with variance 1/2
    std::uint64_t raw() { return engine_(); }

  private:
    double uniform_unit(); // (0, 1]
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Randomized rough data: u_hat(n) = amplitude * g_n / <n>^gamma with g_n iid
// complex normals, <n> = sqrt(1 + n^2). Draws run in storage order over the
// whole grid, then modes outside the dealias band are zeroed, so the stream
// consumed is a function of (seed, K) alone.
SpectralField random_rough(const GridSpec& grid, std::uint64_t seed, double amplitude,
                           double gamma);

// Deterministic smooth data: u_hat(n) = amplitude * exp(-(n/n0)^2) * e^{i phi0 n}
// inside the dealias band, zero outside.
SpectralField smooth_profile(const GridSpec& grid, double amplitude, double n0, double phi0);

} // namespace fnls
