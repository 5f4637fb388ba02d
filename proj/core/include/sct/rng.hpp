#pragma once

#include <cmath>
#include <cstdint>

namespace sct {

/// Small deterministic generator (splitmix64). Used everywhere instead of
/// <random> engines so that results are bit-identical across platforms and
/// standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::uint64_t state_;
};

/// Mixes a seed with up to three coordinates into a fresh stream. This is the
/// counter-based keying used for per-entry noise: the draw for (channel, view,
/// bin) does not depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    Rng r(seed ^ (a * 0xd6e8feb86659fd93ull) ^ (b * 0xa2f9b1c5d3e70f4bull) ^
          (c * 0x9e3779b97f4a7c15ull));
    return r.next_u64();
}

} // namespace sct
