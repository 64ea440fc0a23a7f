#include "g2fit/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "g2fit/errors.hpp"
#include "g2fit/rng.hpp"
#include "g2fit/sampler.hpp"

namespace g2fit {

ObjectiveConfig MethodKey::config() const {
    switch (kind) {
        case ObjectiveKind::LSQ: return ObjectiveConfig::lsq();
        case ObjectiveKind::MLE: return ObjectiveConfig::mle();
        case ObjectiveKind::MAP: return ObjectiveConfig::map(lambda);
    }
    return ObjectiveConfig::mle();
}

std::string method_label(const MethodKey& key) {
    if (key.kind != ObjectiveKind::MAP) return objective_kind_name(key.kind);
    std::ostringstream os;
    os << "map@" << key.lambda;
    return os.str();
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool strictly_inside(const ModelSpec& spec, const std::vector<double>& theta) {
    for (std::size_t j = 0; j < spec.dim(); ++j)
        if (!(theta[j] > spec.layout()[j].lower && theta[j] < spec.layout()[j].upper))
            return false;
    return true;
}

// Truth as realized by the scaled histograms: the overall amplitudes absorb
// T (y -> T y), the shape parameters do not.
std::vector<double> scale_truth(const ModelSpec& spec, std::span<const double> theta, double T) {
    if (spec.variant() == ModelVariant::PulsedEmitter) {
        PulsedEmitterParams p = spec.unpack_pulsed(theta);
        p.c0 *= T;
        p.c1 *= T;
        return spec.pack_pulsed(p);
    }
    ThermalSumParams p = spec.unpack_thermal(theta);
    p.c0 *= T;
    for (double& c : p.c) c *= T;
    return spec.pack_thermal(p);
}

}  // namespace

EnsembleBenchmark run_ensemble_benchmark(const ModelSpec& spec, std::span<const double> theta_true,
                                         const DelayGrid& grid, double photon_budget,
                                         const std::vector<MethodKey>& methods, int n_seeds,
                                         std::uint64_t seed, const MultiStartPlan& plan,
                                         const OptimizerSettings& settings, int threads) {
    if (!(photon_budget > 0)) throw ValidationError("photon budget must be positive");
    if (n_seeds < 2) throw ValidationError("need at least 2 seeds");
    if (methods.empty()) throw ValidationError("no methods requested");

    const std::vector<double> y_true = evaluate(spec, theta_true, grid);
    double total_true = 0.0;
    for (double y : y_true) total_true += y;
    if (!(total_true > 0)) throw ValidationError("true curve carries no photons");
    const double T = photon_budget / total_true;
    const std::vector<double> rate = scale_signal(y_true, T);

    EnsembleBenchmark bench;
    bench.variant = variant_name(spec.variant());
    for (const auto& p : spec.layout()) bench.param_names.push_back(p.name);
    bench.theta_true = scale_truth(spec, theta_true, T);
    bench.photon_budget = photon_budget;
    bench.time_scale = T;
    bench.n_seeds = n_seeds;
    bench.seed = seed;

    for (const MethodKey& key : methods) {
        MethodStats stats;
        stats.key = key;
        stats.label = method_label(key);
        stats.n_seeds = n_seeds;
        stats.params.resize(spec.dim());
        for (std::size_t j = 0; j < spec.dim(); ++j) stats.params[j].name = bench.param_names[j];
        bench.methods.push_back(std::move(stats));
    }

    for (int s = 0; s < n_seeds; ++s) {
        const std::uint64_t hist_seed = substream_seed(seed, 2 * static_cast<std::uint64_t>(s));
        const std::uint64_t plan_seed =
            substream_seed(seed, 2 * static_cast<std::uint64_t>(s) + 1);
        const Histogram hist(grid, sample_poisson(rate, hist_seed));
        const ModelSpec fit_spec = spec.rescaled_for(hist);

        MultiStartPlan seed_plan = plan;
        seed_plan.seed = plan_seed;

        for (MethodStats& stats : bench.methods) {
            const FitResult fit = multistart_maximize(fit_spec, hist, stats.key.config(),
                                                      seed_plan, settings, threads);
            if (fit.converged && strictly_inside(fit_spec, fit.theta_hat)) ++stats.n_success;
            stats.wall_time_total += fit.wall_time;
            for (std::size_t j = 0; j < spec.dim(); ++j)
                stats.params[j].errors.push_back(fit.theta_hat[j] - bench.theta_true[j]);
        }
    }

    for (MethodStats& stats : bench.methods) {
        stats.success_rate = static_cast<double>(stats.n_success) / static_cast<double>(n_seeds);
        stats.wall_time_mean = stats.wall_time_total / static_cast<double>(n_seeds);
        stats.total_failure = stats.n_success == 0;
        bench.flagged = bench.flagged || stats.total_failure;
        for (ParamStat& p : stats.params) {
            double sum = 0.0;
            std::vector<double> abs_errors;
            abs_errors.reserve(p.errors.size());
            for (double e : p.errors) {
                sum += e;
                abs_errors.push_back(std::abs(e));
            }
            const double n = static_cast<double>(p.errors.size());
            p.bias = sum / n;
            double ssq = 0.0;
            for (double e : p.errors) ssq += (e - p.bias) * (e - p.bias);
            p.variance = p.errors.size() > 1 ? ssq / (n - 1.0) : 0.0;
            p.median_abs_error = median_of(std::move(abs_errors));
        }
    }
    return bench;
}

}  // namespace g2fit
