#include "fnlslab/multilinear.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace fnls {

MultiplierOrderD elongate(const MultiplierOrderD& mult, int j, int k) {
    if (j < 1 || j > mult.d) throw std::invalid_argument("elongate: slot index out of range");
    if (k < 0 || k % 2 != 0) throw std::invalid_argument("elongate: k must be even and >= 0");
    const int d = mult.d;
    auto inner = mult.eval;
    MultiplierOrderD out;
    out.d = d + k;
    out.eval = [inner, d, j, k](std::span<const double> xi) -> cplx {
        std::vector<double> collapsed(static_cast<std::size_t>(d));
        for (int i = 0; i < j - 1; ++i) collapsed[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)];
        double s = 0.0;
        for (int i = j - 1; i <= j - 1 + k; ++i) s += xi[static_cast<std::size_t>(i)];
        collapsed[static_cast<std::size_t>(j - 1)] = s;
        for (int i = j; i < d; ++i) collapsed[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i + k)];
        return inner(collapsed);
    };
    return out;
}

namespace {

struct BandView {
    int c;
    std::array<const SpectralField*, 6> f{};

    // slot is 0-based here; the convention's even (1-based) slots conjugate.
    cplx value(int slot, int n) const {
        const cplx v = f[static_cast<std::size_t>(slot)]->at(n);
        return slot % 2 == 0 ? v : std::conj(v);
    }
};

} // namespace

cplx lambda_d(const MultiplierOrderD& mult, std::span<const SpectralField* const> fields) {
    const int d = mult.d;
    if (d != 2 && d != 4 && d != 6)
        throw std::invalid_argument("multilinear form: order must be 2, 4, or 6");
    if (static_cast<int>(fields.size()) != d)
        throw std::invalid_argument("multilinear form: field count must equal the order");
    const GridSpec& grid = fields[0]->grid;
    for (const SpectralField* f : fields)
        if (!(f->grid == grid))
            throw std::invalid_argument("multilinear form: fields live on different grids");
    if (d == 6 && grid.modes > 64)
        throw std::invalid_argument("multilinear form: order 6 restricted to K <= 64");

    BandView view{grid.cutoff(), {}};
    for (int i = 0; i < d; ++i) view.f[static_cast<std::size_t>(i)] = fields[static_cast<std::size_t>(i)];
    const int c = view.c;

    std::array<double, 6> xi{};
    auto xi_of = [&](int slot, int n) { return (slot % 2 == 0 ? 1.0 : -1.0) * grid.xi(n); };

    cplx total{0.0, 0.0};
    if (d == 2) {
        for (int n = -c; n <= c; ++n) {
            xi[0] = xi_of(0, n);
            xi[1] = xi_of(1, n);
            total += mult.eval(std::span<const double>(xi.data(), 2)) * view.value(0, n) *
                     view.value(1, n);
        }
        return total;
    }
    if (d == 4) {
        for (int n1 = -c; n1 <= c; ++n1)
            for (int n2 = -c; n2 <= c; ++n2)
                for (int n3 = -c; n3 <= c; ++n3) {
                    const int n4 = n1 - n2 + n3;
                    if (std::abs(n4) > c) continue;
                    xi[0] = xi_of(0, n1);
                    xi[1] = xi_of(1, n2);
                    xi[2] = xi_of(2, n3);
                    xi[3] = xi_of(3, n4);
                    total += mult.eval(std::span<const double>(xi.data(), 4)) *
                             view.value(0, n1) * view.value(1, n2) * view.value(2, n3) *
                             view.value(3, n4);
                }
        return total;
    }
    for (int n1 = -c; n1 <= c; ++n1)
        for (int n2 = -c; n2 <= c; ++n2)
            for (int n3 = -c; n3 <= c; ++n3)
                for (int n4 = -c; n4 <= c; ++n4)
                    for (int n5 = -c; n5 <= c; ++n5) {
                        const int n6 = n1 - n2 + n3 - n4 + n5;
                        if (std::abs(n6) > c) continue;
                        xi[0] = xi_of(0, n1);
                        xi[1] = xi_of(1, n2);
                        xi[2] = xi_of(2, n3);
                        xi[3] = xi_of(3, n4);
                        xi[4] = xi_of(4, n5);
                        xi[5] = xi_of(5, n6);
                        total += mult.eval(std::span<const double>(xi.data(), 6)) *
                                 view.value(0, n1) * view.value(1, n2) * view.value(2, n3) *
                                 view.value(3, n4) * view.value(4, n5) * view.value(5, n6);
                    }
    return total;
}

cplx lambda_d(const MultiplierOrderD& mult, const SpectralField& f) {
    std::array<const SpectralField*, 6> ptrs{};
    for (int i = 0; i < mult.d; ++i) ptrs[static_cast<std::size_t>(i)] = &f;
    return lambda_d(mult, std::span<const SpectralField* const>(ptrs.data(),
                                                                static_cast<std::size_t>(mult.d)));
}

} // namespace fnls
