#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "spheredepth/sample_set.hpp"

namespace spheredepth {

/// Portable generator: Boost's distribution implementations are identical across platforms,
/// unlike the standard library's.
using Rng = boost::random::mt19937_64;

inline constexpr const char* kRngName = "boost::mt19937_64/boost-normal v1";

inline double standard_normal(Rng& rng) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

inline double uniform01(Rng& rng) {
    boost::random::uniform_01<double> dist;
    return dist(rng);
}

inline Vector standard_normal_vector(Rng& rng, Eigen::Index d) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = standard_normal(rng);
    return v;
}

/// Uniform draw on the unit sphere (normalized Gaussian).
inline Direction random_direction(Rng& rng, Eigen::Index d) {
    for (;;) {
        Vector v = standard_normal_vector(rng, d);
        if (v.norm() > 1e-12) return Direction(std::move(v));
    }
}

/// Deterministic child seed for experiment loops (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace spheredepth
