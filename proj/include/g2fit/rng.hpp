#pragma once

#include <cstdint>
#include <random>

namespace g2fit {

// Decorrelated child seed for replicate/restart substreams.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k);

/// Deterministic random stream with fixed algorithms, so that sampled
/// histograms and multi-start guesses are reproducible byte for byte.
/// Wraps std::mt19937_64 (bit-exact across platforms by the standard) and
/// avoids std::uniform_real_distribution and friends, whose outputs are
/// implementation-defined.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Requires 0 < lo <= hi.
    double log_uniform(double lo, double hi);

    /// Poisson draw: sequential-search inversion for rate < 30 (one uniform
    /// per draw), Hormann's PTRD transformed rejection for rate >= 30. The
    /// cutoff is part of the reproducibility contract.
    std::int64_t poisson(double rate);

  private:
    std::int64_t poisson_inversion(double rate);
    std::int64_t poisson_ptrd(double rate);

    std::mt19937_64 engine_;
};

}  // namespace g2fit
