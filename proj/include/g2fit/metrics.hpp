#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "g2fit/histogram.hpp"
#include "g2fit/models.hpp"
#include "g2fit/multistart.hpp"

namespace g2fit {

struct ResidualSummary {
    double max_abs = 0;
    double mean = 0;
    double variance = 0;
};

/// RMS(estimate - reference) normalized by max(reference) - min(reference).
/// A constant reference has no normalization and raises NormalizationError.
double nrmse(std::span<const double> estimate, std::span<const double> reference);

ResidualSummary residual_summary(std::span<const double> estimate,
                                 std::span<const double> reference);

struct MetricsReport {
    double nrmse = 0;
    std::int64_t total_photons = 0;
    double photons_per_bin = 0;
    ResidualSummary residuals;
};

MetricsReport evaluate_curves(std::span<const double> estimate, std::span<const double> reference,
                              std::int64_t total_photons);

/// Per-bin empirical mean, variance and variance/mean ratio over replicated
/// samples of T * y(theta_true); the ratios concentrating around 1 is the
/// equality face of the unbiased-estimator variance bound.
struct CrbBinStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> ratio;  // NaN where the mean is zero
    bool degenerate = false;    // every bin mean zero (e.g. T = 0)
};

CrbBinStats crb_empirical_check(const ModelSpec& spec, std::span<const double> theta_true,
                                const DelayGrid& grid, double T, int n_replicates,
                                std::uint64_t seed);

/// One simulated prediction per requested integration-time factor: scale the
/// fitted curve by T, sample counts, score them against the scaled curve.
struct LadderEntry {
    double time_scale = 0;
    Histogram hist;
    double nrmse_vs_scaled = 0;
};

std::vector<LadderEntry> integration_time_ladder(const FitResult& fit, const DelayGrid& grid,
                                                 std::span<const double> T_ladder,
                                                 std::uint64_t seed);

}  // namespace g2fit
