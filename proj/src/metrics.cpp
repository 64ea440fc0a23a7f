#include "g2fit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "g2fit/errors.hpp"
#include "g2fit/rng.hpp"
#include "g2fit/sampler.hpp"

namespace g2fit {

double nrmse(std::span<const double> estimate, std::span<const double> reference) {
    if (estimate.size() != reference.size())
        throw ValidationError("estimate and reference differ in length");
    if (estimate.empty()) throw ValidationError("empty curves");
    double lo = reference[0], hi = reference[0];
    double ssq = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        lo = std::min(lo, reference[i]);
        hi = std::max(hi, reference[i]);
        const double d = estimate[i] - reference[i];
        ssq += d * d;
    }
    const double range = hi - lo;
    if (!(range > 0))
        throw NormalizationError("reference curve is constant; normalization undefined");
    return std::sqrt(ssq / static_cast<double>(estimate.size())) / range;
}

ResidualSummary residual_summary(std::span<const double> estimate,
                                 std::span<const double> reference) {
    if (estimate.size() != reference.size())
        throw ValidationError("estimate and reference differ in length");
    if (estimate.empty()) throw ValidationError("empty curves");
    ResidualSummary s;
    double sum = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double r = estimate[i] - reference[i];
        s.max_abs = std::max(s.max_abs, std::abs(r));
        sum += r;
    }
    const double n = static_cast<double>(estimate.size());
    s.mean = sum / n;
    double ssq = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = (estimate[i] - reference[i]) - s.mean;
        ssq += d * d;
    }
    s.variance = estimate.size() > 1 ? ssq / (n - 1.0) : 0.0;
    return s;
}

MetricsReport evaluate_curves(std::span<const double> estimate, std::span<const double> reference,
                              std::int64_t total_photons) {
    MetricsReport report;
    report.nrmse = nrmse(estimate, reference);
    report.residuals = residual_summary(estimate, reference);
    report.total_photons = total_photons;
    report.photons_per_bin =
        static_cast<double>(total_photons) / static_cast<double>(estimate.size());
    return report;
}

CrbBinStats crb_empirical_check(const ModelSpec& spec, std::span<const double> theta_true,
                                const DelayGrid& grid, double T, int n_replicates,
                                std::uint64_t seed) {
    if (n_replicates < 2) throw ValidationError("need at least 2 replicates");
    SamplerConfig config;
    config.time_scale = T;
    config.seed = seed;
    config.n_replicates = n_replicates;
    const SyntheticSet set = generate_synthetic(spec, theta_true, grid, config);

    const std::size_t n_bins = grid.size();
    const double R = static_cast<double>(n_replicates);
    CrbBinStats stats;
    stats.mean.assign(n_bins, 0.0);
    stats.variance.assign(n_bins, 0.0);
    stats.ratio.assign(n_bins, std::numeric_limits<double>::quiet_NaN());

    for (const Histogram& h : set.replicates)
        for (std::size_t i = 0; i < n_bins; ++i)
            stats.mean[i] += static_cast<double>(h.counts()[i]);
    for (std::size_t i = 0; i < n_bins; ++i) stats.mean[i] /= R;

    for (const Histogram& h : set.replicates)
        for (std::size_t i = 0; i < n_bins; ++i) {
            const double d = static_cast<double>(h.counts()[i]) - stats.mean[i];
            stats.variance[i] += d * d;
        }
    bool any_nonzero = false;
    for (std::size_t i = 0; i < n_bins; ++i) {
        stats.variance[i] /= R - 1.0;
        if (stats.mean[i] > 0) {
            stats.ratio[i] = stats.variance[i] / stats.mean[i];
            any_nonzero = true;
        }
    }
    stats.degenerate = !any_nonzero;
    return stats;
}

std::vector<LadderEntry> integration_time_ladder(const FitResult& fit, const DelayGrid& grid,
                                                 std::span<const double> T_ladder,
                                                 std::uint64_t seed) {
    if (fit.fitted_curve.size() != grid.size())
        throw ValidationError("fit carries no curve over this grid");
    std::vector<LadderEntry> out;
    out.reserve(T_ladder.size());
    for (std::size_t k = 0; k < T_ladder.size(); ++k) {
        const double T = T_ladder[k];
        const std::vector<double> scaled = scale_signal(fit.fitted_curve, T);
        const std::uint64_t sk = substream_seed(seed, k);
        Histogram h(grid, sample_poisson(scaled, sk));
        std::vector<double> counts_real(h.size());
        for (std::size_t i = 0; i < h.size(); ++i)
            counts_real[i] = static_cast<double>(h.counts()[i]);
        double score = std::numeric_limits<double>::quiet_NaN();
        try {
            score = nrmse(counts_real, scaled);
        } catch (const NormalizationError&) {
            // T = 0 or a flat curve: no scale to normalize against.
        }
        out.push_back({T, std::move(h), score});
    }
    return out;
}

}  // namespace g2fit
