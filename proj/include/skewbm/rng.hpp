#ifndef SKEWBM_RNG_HPP
#define SKEWBM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace skewbm {

// Counter-based generator: the triple (seed, stream_id, counter) determines
// every variate, so runs are reproducible and streams can be handed out to
// shards without coordination. Output is the splitmix64 finalizer applied to
// an affine counter sequence whose base point mixes seed and stream.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        const std::uint64_t base = mix(seed + 0x9E3779B97F4A7C15ULL) ^
                                   mix(stream_id * 0xDA942042E4DD58B5ULL + 0x2545F4914F6CDD1DULL);
        return mix(base + (++counter) * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call
    // to keep the counter arithmetic predictable.
    double gaussian() {
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

}  // namespace skewbm

#endif
