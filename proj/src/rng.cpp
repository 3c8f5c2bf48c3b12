#include "cdad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cdad {

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const
{
    return splitmix64(splitmix64(splitmix64(seed_) ^ stream) ^ counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const
{
    // 53 random bits, shifted off zero.
    return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter) const
{
    const double u1 = uniform(stream, 2 * counter);
    const double u2 = uniform(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::truncated(std::uint64_t stream, std::uint64_t counter, double bound) const
{
    if (bound <= 0.0) return 0.0;
    return std::clamp(normal(stream, counter) * bound / 3.0, -bound, bound);
}

}  // namespace cdad
