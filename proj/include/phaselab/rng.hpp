#ifndef PHASELAB_RNG_HPP
#define PHASELAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

#include "phaselab/vec3.hpp"

namespace phaselab::rng {

inline constexpr const char* kAlgorithmName = "splitmix64";

/// One splitmix64 step (Steele/Lea/Flood). Advances state by the golden gamma
/// and returns the mixed output. Reference sequence from state 0:
/// 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stateless mix of a single word (splitmix64 output function).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Child-seed derivation: every subsystem / trial gets an independent stream
/// keyed by (seed, label) or (seed, index). This is the one documented path
/// from the top-level seed to all randomness in the artifact.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index));
}
inline std::uint64_t derive(std::uint64_t seed, std::string_view label) {
    return derive(seed, fnv1a64(label));
}

/// Deterministic counter-based stream; cheap enough to construct per trial,
/// which makes Monte Carlo results independent of execution order.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Box-Muller, one value per call; pair cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Area-uniform point on S^2: z ~ U[-1,1], phi ~ U[0,2pi).
    UnitVector unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * M_PI);
        return UnitVector::from_z_phi(z, phi);
    }

    DirectionTuple direction_tuple(int n_particles) {
        DirectionTuple t;
        t.reserve(static_cast<std::size_t>(n_particles));
        for (int j = 0; j < n_particles; ++j) t.push_back(unit_vector());
        return t;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace phaselab::rng

#endif
