#include "fnlslab/grid.hpp"

#include <stdexcept>
#include <string>

namespace fnls {

GridSpec::GridSpec(int K, double L, double frac)
    : modes(K), period(L), dealias_fraction(frac) {
    if (K < 4 || K % 2 != 0)
        throw std::invalid_argument("GridSpec: mode count must be even and >= 4, got " +
                                    std::to_string(K));
    if (!(L > 0.0))
        throw std::invalid_argument("GridSpec: period must be positive");
    if (!(frac > 0.0) || frac > 1.0)
        throw std::invalid_argument("GridSpec: dealias_fraction must lie in (0, 1]");
}

} // namespace fnls
