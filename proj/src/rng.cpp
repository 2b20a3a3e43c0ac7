#include "networth/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace networth {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (stream * 0xd1b54a32d192ed03ULL);
    splitmix64(t);
    return Rng(splitmix64(t));
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double Rng::exponential(double rate)
{
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential rate must be > 0");
    }
    return -std::log1p(-uniform()) / rate;
}

}  // namespace networth
