#pragma once

// Reproducible random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every variate is derived from raw
// engine output here instead of through <random> distributions, whose
// algorithms are implementation-defined. Substreams are seeded by running
// SplitMix64 over (seed, stream id).

#include <cstdint>
#include <random>
#include <string_view>

namespace networth {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64/v1";

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    /// Independent stream `stream` of the generator family rooted at `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t stream);

    explicit Rng(std::uint64_t engine_seed) : engine_(engine_seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Exponential with the given rate (> 0), by inversion.
    double exponential(double rate);

private:
    std::mt19937_64 engine_;
};

}  // namespace networth
