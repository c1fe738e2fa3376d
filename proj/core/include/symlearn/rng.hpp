#pragma once

#include <array>
#include <cstdint>

namespace symlearn {

/// Deterministic random number stream.
///
/// The generator is xoshiro256++ with its state filled from the seed by
/// SplitMix64. Both algorithms are frozen here so that a given seed produces
/// the same stream on every platform and in every build. Gaussian draws use
/// Box-Muller on top of the uniform stream.
class RngState {
public:
    explicit RngState(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Next raw 64-bit word of the stream.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53 bits of precision.
    double next_uniform();

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    /// Standard normal draw.
    double next_gaussian();

    /// Independent child stream; deterministic in (seed, stream_id).
    RngState fork(std::uint64_t stream_id) const;

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

}  // namespace symlearn
