// Seeded random streams with independent substreams per replication.
//
// Contract: everything is a pure function of the 64-bit root seed and the
// substream path. Replications can run concurrently by giving each its own
// substream; results do not depend on scheduling.
#pragma once

#include <cstdint>
#include <random>

namespace wlim {

// splitmix64 finalizer, used both to seed the engine and to derive substreams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed), engine_(mix64(seed)) {}

    // Independent stream identified by (root seed, id); nesting is fine.
    Rng substream(std::uint64_t id) const { return Rng(mix64(root_, id)); }

    std::uint64_t seed() const { return root_; }

    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t root_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace wlim
