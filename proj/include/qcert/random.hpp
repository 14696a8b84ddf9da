#pragma once

#include <cstdint>
#include <string_view>

namespace qcert {

/// Counter-based SplitMix64 stream.
///
/// Draw k of stream s is mix64(s + (k + 1) * golden_gamma), the same value
/// the sequential SplitMix64 generator emits at position k. Any draw can be
/// addressed directly, so trial i of a sampler always sees the same numbers
/// regardless of how many trials run or in which order.
class CounterRng {
public:
    static constexpr std::string_view kAlgorithm = "splitmix64-counter";
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(seed_ + (counter + 1) * kGamma);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Independent child stream.
    constexpr CounterRng split(std::uint64_t stream) const noexcept {
        return CounterRng(mix64(seed_ ^ mix64(stream + kGamma)));
    }

    constexpr std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace qcert
