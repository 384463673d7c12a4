#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace mpcert {

/// SplitMix64 step (Steele, Lea, Flood). Used to expand a 64-bit seed into
/// generator state and to derive child seeds.
///   z = (x += 0x9e3779b97f4a7c15);
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
///   return z ^ (z >> 31);
std::uint64_t splitmix64(std::uint64_t &state);

/// Mixes a value into a seed; derived seeds depend only on (seed, value).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t value);

/// xoshiro256** 1.0 (Blackman, Vigna). State is four 64-bit words seeded by
/// four SplitMix64 outputs. Update rule:
///   result = rotl(s1 * 5, 7) * 9;
///   t = s1 << 17;
///   s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45);
/// Doubles are drawn as (next() >> 11) * 2^-53, normals by the Marsaglia
/// polar method. No standard-library distribution is involved, so streams are
/// reproducible across standard libraries.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    double normal();
    /// Fills `out` with a direction drawn uniformly on the unit sphere.
    void unit_direction(std::span<double> out);

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mpcert
