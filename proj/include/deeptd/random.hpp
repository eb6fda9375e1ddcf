#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace deeptd {

/// 64-bit Mersenne Twister; same output sequence as std::mt19937_64.
using Rng = boost::random::mt19937_64;

/// SplitMix64 finalizer. Bijective 64-bit avalanche mix.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of child stream `index` under `parent`:
///   splitmix64(parent ^ splitmix64(index))
/// Used for per-trial seeds (parent = master seed, index = trial index) and
/// for the independent streams inside one trial.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept
{
    return splitmix64(parent ^ splitmix64(index));
}

/// Fills `out` with i.i.d. standard normal draws (ziggurat sampler).
inline void fill_gaussian(Rng& rng, std::span<double> out)
{
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out)
        v = normal(rng);
}

/// Uniform draw from the unit sphere in R^dim.
std::vector<double> random_unit_vector(Rng& rng, std::size_t dim);

} // namespace deeptd
