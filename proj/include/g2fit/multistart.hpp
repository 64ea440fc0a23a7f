#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "g2fit/histogram.hpp"
#include "g2fit/models.hpp"
#include "g2fit/objectives.hpp"
#include "g2fit/optim.hpp"

namespace g2fit {

// Worker count: explicit request > 0 wins, else the G2FIT_THREADS environment
// variable, else the hardware concurrency (at least 1).
int resolve_thread_count(int requested = 0);

enum class GuessStrategy { UniformInBounds, LatinHypercube };

const char* guess_strategy_name(GuessStrategy s);
GuessStrategy guess_strategy_from(const std::string& name);

struct MultiStartPlan {
    int restarts = 64;
    std::uint64_t seed = 0;
    GuessStrategy guess_strategy = GuessStrategy::UniformInBounds;
    int keep_top = 5;  // restart records retained in full
};

// All guesses for a plan, drawn upfront from one stream seeded by plan.seed;
// identical regardless of how restarts are later scheduled. Rate-like
// parameters (gamma*, sigma*) are drawn log-uniformly.
std::vector<std::vector<double>> draw_guesses(const ModelSpec& spec, const MultiStartPlan& plan);

struct RestartRecord {
    int index = 0;
    std::vector<double> guess;
    double value = 0;  // maximized objective at the restart's optimum
    int iterations = 0;
    bool converged = false;
};

struct FitResult {
    std::vector<double> theta_hat;
    double objective_value = 0;
    ObjectiveKind objective_kind = ObjectiveKind::MLE;
    bool converged = false;  // the winning restart converged
    int n_restarts = 0;
    int n_converged = 0;
    std::vector<RestartRecord> restart_records;  // best keep_top, by value then index
    std::vector<double> fitted_curve;
    std::int64_t total_photons = 0;
    double wall_time = 0;  // seconds
};

/// Multi-start fit of a histogram: Powell from every guess for MAP/MLE
/// objectives, Levenberg-Marquardt on the count residuals for LSQ. The best
/// restart wins; ties break to the lowest restart index, so sequential and
/// parallel schedules select the same optimum bit for bit.
FitResult multistart_maximize(const ModelSpec& spec, const Histogram& hist,
                              const ObjectiveConfig& config, const MultiStartPlan& plan,
                              const OptimizerSettings& settings = {}, int threads = 1);

}  // namespace g2fit
