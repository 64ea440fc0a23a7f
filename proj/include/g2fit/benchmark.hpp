#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "g2fit/metrics.hpp"
#include "g2fit/multistart.hpp"

namespace g2fit {

struct MethodKey {
    ObjectiveKind kind = ObjectiveKind::MLE;
    double lambda = 0;  // used by MAP only

    ObjectiveConfig config() const;
};

std::string method_label(const MethodKey& key);

struct ParamStat {
    std::string name;
    double bias = 0;
    double variance = 0;
    double median_abs_error = 0;
    std::vector<double> errors;  // theta_hat - theta_true, one per seed
};

struct MethodStats {
    MethodKey key;
    std::string label;
    int n_seeds = 0;
    int n_success = 0;  // converged with theta strictly inside the box
    double success_rate = 0;
    double wall_time_total = 0;
    double wall_time_mean = 0;
    bool total_failure = false;
    std::vector<ParamStat> params;
};

/// Paired comparison of estimators over seeded synthetic histograms: every
/// method sees byte-identical histograms and identical multi-start plans.
struct EnsembleBenchmark {
    std::string variant;
    std::vector<std::string> param_names;
    std::vector<double> theta_true;  // amplitudes carry the T factor the fits see
    double photon_budget = 0;
    double time_scale = 0;  // budget / sum of the true curve
    int n_seeds = 0;
    std::uint64_t seed = 0;
    std::vector<MethodStats> methods;
    bool flagged = false;  // some method failed on every seed
};

EnsembleBenchmark run_ensemble_benchmark(const ModelSpec& spec, std::span<const double> theta_true,
                                         const DelayGrid& grid, double photon_budget,
                                         const std::vector<MethodKey>& methods, int n_seeds,
                                         std::uint64_t seed, const MultiStartPlan& plan,
                                         const OptimizerSettings& settings = {}, int threads = 1);

}  // namespace g2fit
