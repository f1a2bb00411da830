#pragma once

#include <cstdint>
#include <random>

namespace polya {

/// SplitMix64 finalizer. Used to decorrelate seeds, never as the stream itself.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for Monte Carlo run `run` of a batch started from `base_seed`.
/// Depends only on (base_seed, run), so batches can be scheduled in any order.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run) noexcept {
    return splitmix64(base_seed ^ splitmix64(run));
}

/// The simulator's random stream: MT19937-64 (output sequence fixed by the
/// C++ standard) with uniforms built from the top 53 bits, so a seed replays
/// bit-identically on every conforming toolchain.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 2^-53 resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    result_type operator()() { return engine_(); }
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace polya
