#pragma once

#include <cstdint>

namespace attnswap {

// Counter-based generator built on the SplitMix64 finalizer: the n-th output
// is mix64(seed + n * 0x9E3779B97F4A7C15). State is (seed, counter), so any
// stream can be replayed or split without touching the others.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed ^ mix64(stream * kGamma + kStreamSalt)), counter_(0) {}

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(seed_ + counter_ * kGamma);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n > 0. Modulo bias is negligible for n << 2^64.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller; the paired value is cached.
    double next_gaussian();

    static std::uint64_t mix64(std::uint64_t z) {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

    std::uint64_t seed_;
    std::uint64_t counter_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace attnswap
