#pragma once

#include <cstdint>

namespace recomb {

// SplitMix64 finalizer (Steele, Lea and Flood; constants from Vigna's
// public-domain reference implementation).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    // Independent stream for one sample: depends only on (seed, index), so
    // results do not depend on how samples are distributed over workers.
    static constexpr SplitMix64 for_stream(std::uint64_t seed, std::uint64_t index) noexcept
    {
        return SplitMix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on (0, 1], 53 random bits.
    constexpr double uniform_open_closed() noexcept
    {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    constexpr double uniform() noexcept
    {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace recomb
