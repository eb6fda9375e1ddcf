#include "deeptd/random.hpp"

#include "deeptd/tensor.hpp"

namespace deeptd {

std::vector<double> random_unit_vector(Rng& rng, std::size_t dim)
{
    std::vector<double> v(dim);
    double n = 0.0;
    // A zero draw has probability zero; loop anyway so the result is always unit.
    while (n == 0.0) {
        fill_gaussian(rng, v);
        n = norm2(v);
    }
    for (double& x : v)
        x /= n;
    return v;
}

} // namespace deeptd
