#pragma once

#include <cstdint>
#include <random>
#include <vector>

// Deterministic randomness utilities.
//
// All stochastic components draw from an injected mt19937_64. Uniform doubles
// and discrete sampling are hand-rolled (53-bit mantissa construction and
// inverse-CDF walk) instead of std::uniform_real_distribution /
// std::discrete_distribution, whose outputs are not specified bit-for-bit by
// the standard; this keeps seeded runs byte-identical across toolchains.

namespace bilat
{

using Rng = std::mt19937_64;

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform(Rng &rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

// Inverse-CDF sample from an unnormalized nonnegative weight vector.
// The caller guarantees total > 0.
inline std::size_t sample_index(Rng &rng, const std::vector<double> &weights, double total)
{
    double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i)
    {
        acc += weights[i];
        if (u < acc)
            return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

// SplitMix64 step; used to derive stream seeds from a master seed so that
// replications are decorrelated but fully reproducible.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for replication `index` of a run with horizon T under `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t horizon, std::uint64_t index)
{
    std::uint64_t state = master;
    std::uint64_t a = splitmix64(state);
    state ^= horizon * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(state);
    state ^= index + 0xd1b54a32d192ed03ULL;
    std::uint64_t c = splitmix64(state);
    return a ^ (b << 1) ^ c;
}

} // namespace bilat
