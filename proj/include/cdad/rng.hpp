#pragma once

#include <cstdint>

namespace cdad {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so traces do not depend on draw order or platform.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
    /// Uniform on (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t counter) const;
    /// Standard normal (Box-Muller on two uniforms).
    double normal(std::uint64_t stream, std::uint64_t counter) const;
    /// Normal with sd = bound / 3, clipped to [-bound, bound].
    double truncated(std::uint64_t stream, std::uint64_t counter, double bound) const;

private:
    std::uint64_t seed_;
};

}  // namespace cdad
