#include "hokalman/random.hpp"

#include <cmath>
#include <numbers>

namespace hokalman {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// SplitMix64 finalizer, used only to decorrelate derived stream ids.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::array<double, 2> CounterRng::uniform_pair(std::uint64_t block) const noexcept {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                                           static_cast<std::uint32_t>(stream_),
                                           static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto r = philox4x32(ctr, key);
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t block) const noexcept {
    const auto [u1, u2] = uniform_pair(block);
    // 1 - u1 lies in (0, 1], so the log is finite.
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

void CounterRng::fill_normal(std::span<double> out, std::uint64_t offset) const noexcept {
    const std::uint64_t first = offset / 2;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const auto z = normal_pair(first + i / 2);
        out[i] = z[0];
        out[i + 1] = z[1];
    }
    if (n % 2) out[n - 1] = normal_pair(first + n / 2)[0];
}

void CounterRng::fill_uniform(std::span<double> out, std::uint64_t offset) const noexcept {
    const std::uint64_t first = offset / 2;
    const std::size_t n = out.size();
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        const auto z = uniform_pair(first + i / 2);
        out[i] = z[0];
        out[i + 1] = z[1];
    }
    if (n % 2) out[n - 1] = uniform_pair(first + n / 2)[0];
}

CounterRng CounterRng::substream(std::uint64_t tag) const noexcept {
    return CounterRng(seed_, mix64(stream_ ^ mix64(tag + 1)));
}

std::int64_t RngCursor::integer(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<double>(hi - lo + 1);
    auto k = static_cast<std::int64_t>(uniform() * span);
    if (k > hi - lo) k = hi - lo;
    return lo + k;
}

} // namespace hokalman
