#include "g2fit/sampler.hpp"

#include <cmath>
#include <string>

#include "g2fit/errors.hpp"
#include "g2fit/rng.hpp"

namespace g2fit {

std::vector<double> scale_signal(std::span<const double> y, double T) {
    if (!(T >= 0) || !std::isfinite(T))
        throw ValidationError("time scale must be finite and >= 0");
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] >= 0))
            throw ValidationError("signal must be >= 0 at bin " + std::to_string(i));
        out[i] = y[i] * T;
    }
    return out;
}

std::vector<std::int64_t> sample_poisson(std::span<const double> rate, std::uint64_t seed) {
    RandomStream stream(seed);
    std::vector<std::int64_t> counts(rate.size());
    for (std::size_t i = 0; i < rate.size(); ++i) {
        if (std::isnan(rate[i]) || rate[i] < 0 || !std::isfinite(rate[i]))
            throw ValidationError("Poisson rate must be finite and >= 0 at bin " +
                                  std::to_string(i));
        counts[i] = stream.poisson(rate[i]);
    }
    return counts;
}

SyntheticSet generate_synthetic(const ModelSpec& spec, std::span<const double> theta_true,
                                const DelayGrid& grid, const SamplerConfig& config,
                                const std::string& unit) {
    if (config.n_replicates < 1) throw ValidationError("n_replicates must be >= 1");
    const std::vector<double> y = evaluate(spec, theta_true, grid);
    const std::vector<double> rate = scale_signal(y, config.time_scale);

    SyntheticSet set;
    set.variant = variant_name(spec.variant());
    set.theta_true.assign(theta_true.begin(), theta_true.end());
    set.time_scale = config.time_scale;
    set.seed = config.seed;
    set.replicates.reserve(static_cast<std::size_t>(config.n_replicates));
    for (int k = 0; k < config.n_replicates; ++k) {
        const std::uint64_t sk = substream_seed(config.seed, static_cast<std::uint64_t>(k));
        set.replicate_seeds.push_back(sk);
        set.replicates.emplace_back(grid, sample_poisson(rate, sk), unit);
    }
    return set;
}

}  // namespace g2fit
