#pragma once

#include <cstdint>
#include <random>

namespace affswor {

/// splitmix64 finalizer; good avalanche, used only for seeding.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform variate source with platform-independent output. Conversions are
/// done by hand (bit shifts and rejection) so a fixed seed yields the same
/// stream everywhere, which the sampling CLI's byte-identical-output
/// guarantee relies on.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return r % bound;
    }

private:
    std::mt19937_64 eng_;
};

/// Stream splitting: the sampler hands draw number k its own child stream
/// derived as mix(seed, k), so successive draws are statistically independent
/// and the sequence produced by draw k never depends on how many proposals
/// earlier draws consumed.
inline RandomStream child_stream(std::uint64_t seed, std::uint64_t k) {
    return RandomStream(splitmix64(seed) ^ splitmix64(k * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

}  // namespace affswor
