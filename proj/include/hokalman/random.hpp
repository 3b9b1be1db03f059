#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hokalman {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, index). Parallel fills that partition the index space
/// therefore produce exactly the serial result.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

    /// Two uniform doubles in [0, 1) with 53 random bits each.
    std::array<double, 2> uniform_pair(std::uint64_t block) const noexcept;
    /// Two independent standard normals (Box-Muller on uniform_pair(block)).
    std::array<double, 2> normal_pair(std::uint64_t block) const noexcept;

    double uniform(std::uint64_t index) const noexcept { return uniform_pair(index / 2)[index % 2]; }
    double normal(std::uint64_t index) const noexcept { return normal_pair(index / 2)[index % 2]; }

    /// out[i] = normal(offset + i); offset must be even.
    void fill_normal(std::span<double> out, std::uint64_t offset = 0) const noexcept;
    void fill_uniform(std::span<double> out, std::uint64_t offset = 0) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent generator for a sub-task (rollout, trial, column block).
    CounterRng substream(std::uint64_t tag) const noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Sequential view over a CounterRng for code that draws a variable number of values.
class RngCursor {
public:
    explicit RngCursor(CounterRng rng) noexcept : rng_(rng) {}

    double uniform() noexcept { return rng_.uniform(next_++); }
    double normal() noexcept { return rng_.normal(next_++); }
    /// Uniform integer in [lo, hi].
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;

private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
};

} // namespace hokalman
