#pragma once

#include <complex>
#include <vector>

namespace fnls {

// Unnormalized complex DFT pair, any length >= 1.
//   forward:  X[k] = sum_j x[j] e^{-2*pi*i*j*k/n}
//   backward: x[j] = sum_k X[k] e^{+2*pi*i*j*k/n}
// Plans are cached per thread; results are identical across threads and runs.
void fft_forward(std::vector<std::complex<double>>& data);
void fft_backward(std::vector<std::complex<double>>& data);

} // namespace fnls
