#pragma once

#include <functional>
#include <span>

#include "fnlslab/field.hpp"

namespace fnls {

// Order-d frequency multiplier, defined on the hyperplane xi_1 + ... + xi_d = 0.
struct MultiplierOrderD {
    int d;
    std::function<cplx(std::span<const double>)> eval;
};

// Elongation: order-(d+k) multiplier evaluating the original with slot j
// replaced by xi_j + ... + xi_{j+k}. k even, 1 <= j <= d.
MultiplierOrderD elongate(const MultiplierOrderD& mult, int j, int k);

// Multilinear form
//   Lambda_d(M; f_1, ..., f_d) = sum over xi_1 + ... + xi_d = 0 of
//                                M(xi) prod_j [ j odd: f_j(xi_j); j even: conj(f_j(-xi_j)) ]
// summed by brute force over tuples of dealias-band modes (the band is the
// active frequency content everywhere in this codebase). In mode variables
// n_j = (-1)^{j+1} xi_j L / 2pi the constraint reads n_1 - n_2 + n_3 - ... = 0
// and the product is f_1(n_1) conj(f_2(n_2)) f_3(n_3) ....
// d in {2, 4, 6}; all fields on one grid; d = 6 guarded to K <= 64.
cplx lambda_d(const MultiplierOrderD& mult, std::span<const SpectralField* const> fields);

// Diagonal form Lambda_d(M; f) = Lambda_d(M; f, f, ..., f).
cplx lambda_d(const MultiplierOrderD& mult, const SpectralField& f);

} // namespace fnls
