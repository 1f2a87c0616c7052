#include "srl/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace srl {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, StreamTag tag) {
    std::uint64_t s = seed;
    std::uint64_t key = splitmix64(s);
    s = key ^ (stream * 0xD1B54A32D192ED03ULL);
    key = splitmix64(s);
    s = key ^ (static_cast<std::uint64_t>(tag) * 0x8CB92BA72F3D8DD7ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                      static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
    engine_.seed(seq);
}

double step_increment(Rng& rng, double mu, double sigma, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    const double z = rng.normal();
    return mu * dt + sigma * std::sqrt(dt) * z;
}

} // namespace srl
