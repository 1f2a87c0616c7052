#pragma once

// Seeded random streams. A stream is identified by (seed, stream, tag):
// trainers use stream = episode index, and tags separate the Brownian
// increments from the activation uniform so both simulators see the same
// increments for the same (seed, stream).

#include <cstdint>
#include <random>

namespace srl {

enum class StreamTag : std::uint64_t {
    increments = 0,
    activation = 1,
};

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream, StreamTag tag = StreamTag::increments);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// One Gaussian increment with mean mu dt and variance sigma^2 dt.
/// A normal variate is always consumed, so sigma = 0 keeps stream alignment.
double step_increment(Rng& rng, double mu, double sigma, double dt);

} // namespace srl
