// rng.hpp: explicitly seeded random streams, one per trajectory.

#pragma once

#include <cstdint>
#include <random>

namespace dqd {

// SplitMix64 finalizer; used to decorrelate (master seed, stream index) pairs.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic stream derived from a master seed and a trajectory index.
// Streams with different indices are statistically independent, so disjoint
// trajectories can run concurrently without sharing state.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

    double normal();   // N(0, 1)
    double uniform();  // U[0, 1)

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace dqd
