#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mlin {

// Deterministic random stream.  The mapping from raw 64-bit draws to
// uniforms/normals is pinned here instead of relying on std::*_distribution,
// whose output is implementation-defined; experiment results must reproduce
// bit-for-bit from a seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal via Box-Muller (pairs cached).
    double normal();

    /// Complex standard normal, E|z|^2 = 1.
    std::complex<double> cnormal() {
        const double s = 0.7071067811865476;
        double re = normal(), im = normal();
        return {re * s, im * s};
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (gen_() >> 63) ? 1.0 : -1.0; }

    /// Independent child stream; (seed, index) -> stream is the scheme used
    /// for per-trial determinism irrespective of worker count.
    static Rng substream(std::uint64_t seed, std::uint64_t index);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mlin
