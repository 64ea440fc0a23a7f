#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "g2fit/histogram.hpp"
#include "g2fit/models.hpp"

namespace g2fit {

struct SamplerConfig {
    double time_scale = 1.0;  // dimensionless T, proportional to integration time
    std::uint64_t seed = 0;
    int n_replicates = 1;
};

// Elementwise y * T.
std::vector<double> scale_signal(std::span<const double> y, double T);

// Independent per-bin Poisson draws from one seeded stream, in bin order.
std::vector<std::int64_t> sample_poisson(std::span<const double> rate, std::uint64_t seed);

/// Replicated synthetic histograms with their generation provenance.
struct SyntheticSet {
    std::vector<Histogram> replicates;
    std::vector<std::uint64_t> replicate_seeds;  // substream seed per replicate
    std::string variant;
    std::vector<double> theta_true;
    double time_scale = 1.0;
    std::uint64_t seed = 0;
};

// Samples n_replicates histograms from T * evaluate(spec, theta_true, grid),
// replicate k drawn from substream_seed(config.seed, k).
SyntheticSet generate_synthetic(const ModelSpec& spec, std::span<const double> theta_true,
                                const DelayGrid& grid, const SamplerConfig& config,
                                const std::string& unit = "");

}  // namespace g2fit
