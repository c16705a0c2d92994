#pragma once

#include "rwb/vec3.hpp"

#include <cstdint>
#include <random>

namespace rwb {

/// SplitMix64 finalizer; used to derive independent stream seeds from a base
/// seed and a block index.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return unit_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
    double gaussian() { return normal_(engine_); }
    Vec3 gaussian3() { return {gaussian(), gaussian(), gaussian()}; }

    UnitVector unit_vector()
    {
        for (;;) {
            const Vec3 w = gaussian3();
            if (norm2(w) > 1e-20) return UnitVector::normalized(w);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rwb
