#pragma once

#include <cmath>
#include <cstdint>

namespace travmap::rng {

// SplitMix64 stream. Hand-rolled so that results are identical across
// platforms and standard library versions; std::mt19937 would be portable
// too but std::uniform_real_distribution is not.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n). n must be > 0.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Box-Muller, one value per call (the sine branch is discarded so the
    // draw count per sample stays fixed).
    double normal(double mean, double sigma) {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t state_;
};

// Decorrelated child seed for stream `stream` of a root seed. Lets every
// scene primitive (or RANSAC run) own an independent generator while the
// whole pipeline stays reproducible from one root.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    SplitMix64 g(root + 0x632be59bd9b4e019ULL * (stream + 1));
    return g.next();
}

}  // namespace travmap::rng
