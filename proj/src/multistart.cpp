#include "g2fit/multistart.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

#include "g2fit/errors.hpp"
#include "g2fit/rng.hpp"

namespace g2fit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("G2FIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

const char* guess_strategy_name(GuessStrategy s) {
    switch (s) {
        case GuessStrategy::UniformInBounds: return "uniform";
        case GuessStrategy::LatinHypercube: return "latin-hypercube";
    }
    return "unknown";
}

GuessStrategy guess_strategy_from(const std::string& name) {
    if (name == "uniform") return GuessStrategy::UniformInBounds;
    if (name == "latin-hypercube") return GuessStrategy::LatinHypercube;
    throw ConfigError("unknown guess strategy: " + name);
}

namespace {

bool rate_like(const std::string& name) {
    return name.rfind("gamma", 0) == 0 || name.rfind("sigma", 0) == 0;
}

double place(const ParamSpec& p, double u) {
    if (rate_like(p.name) && p.lower > 0)
        return std::exp(std::log(p.lower) + u * (std::log(p.upper) - std::log(p.lower)));
    return p.lower + u * (p.upper - p.lower);
}

}  // namespace

std::vector<std::vector<double>> draw_guesses(const ModelSpec& spec, const MultiStartPlan& plan) {
    if (plan.restarts < 1) throw ValidationError("restarts must be >= 1");
    if (plan.keep_top < 0) throw ValidationError("keep_top must be >= 0");
    const std::size_t n = spec.dim();
    const std::size_t R = static_cast<std::size_t>(plan.restarts);
    RandomStream stream(plan.seed);
    std::vector<std::vector<double>> guesses(R, std::vector<double>(n));

    if (plan.guess_strategy == GuessStrategy::UniformInBounds) {
        for (std::size_t k = 0; k < R; ++k)
            for (std::size_t j = 0; j < n; ++j)
                guesses[k][j] = place(spec.layout()[j], stream.uniform01());
        return guesses;
    }

    // Latin hypercube: per dimension, one draw from each of R strata in
    // shuffled order; draw order is dimension-major for determinism.
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> strata(R);
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        for (std::size_t k = R; k > 1; --k) {
            const std::size_t swap_with = static_cast<std::size_t>(stream.next_u64() % k);
            std::swap(strata[k - 1], strata[swap_with]);
        }
        for (std::size_t k = 0; k < R; ++k) {
            const double u =
                (static_cast<double>(strata[k]) + stream.uniform01()) / static_cast<double>(R);
            guesses[k][j] = place(spec.layout()[j], u);
        }
    }
    return guesses;
}

namespace {

struct RestartOutcome {
    std::vector<double> theta;
    double value = kNegInf;
    int iterations = 0;
    bool converged = false;
};

RestartOutcome run_restart(const ModelSpec& spec, const Histogram& hist,
                           const ObjectiveConfig& config, const ObjectiveFn& objective,
                           const std::vector<double>& guess, const OptimizerSettings& settings) {
    const std::size_t n = spec.dim();
    std::vector<double> lower(n), upper(n);
    for (std::size_t j = 0; j < n; ++j) {
        lower[j] = spec.layout()[j].lower;
        upper[j] = spec.layout()[j].upper;
    }

    RestartOutcome out;
    out.theta = guess;
    try {
        if (config.kind == ObjectiveKind::LSQ) {
            const auto& counts = hist.counts();
            auto residual = [&](std::span<const double> x) {
                std::vector<double> xc(x.begin(), x.end());
                for (std::size_t j = 0; j < n; ++j)
                    xc[j] = std::min(std::max(xc[j], lower[j]), upper[j]);
                std::vector<double> r(counts.size());
                try {
                    const std::vector<double> y = evaluate(spec, xc, hist.grid());
                    for (std::size_t i = 0; i < r.size(); ++i)
                        r[i] = static_cast<double>(counts[i]) - y[i];
                } catch (const ValidationError&) {
                    r.assign(counts.size(), 1e100);
                }
                return r;
            };
            const LMResult lm = levenberg_marquardt(residual, guess, lower, upper, settings);
            out.theta = lm.x;
            out.value = -lm.sum_sq;
            out.iterations = lm.iterations;
            out.converged = lm.converged;
        } else {
            if (!std::isfinite(objective(guess))) return out;  // barrier at the guess itself
            auto negated = [&objective](std::span<const double> x) { return -objective(x); };
            const PowellResult res = powell_minimize(negated, guess, lower, upper, settings);
            out.theta = res.x;
            out.value = -res.f;
            out.iterations = res.iterations;
            out.converged = res.converged;
        }
    } catch (const std::exception&) {
        out.theta = guess;
        out.value = kNegInf;
        out.converged = false;
    }
    return out;
}

}  // namespace

FitResult multistart_maximize(const ModelSpec& spec, const Histogram& hist,
                              const ObjectiveConfig& config, const MultiStartPlan& plan,
                              const OptimizerSettings& settings, int threads) {
    const auto start_time = std::chrono::steady_clock::now();
    validate(settings);
    const ObjectiveConfig canon = normalized(config, spec);
    const ObjectiveFn objective = make_objective(spec, hist, canon);
    const std::vector<std::vector<double>> guesses = draw_guesses(spec, plan);
    const int R = plan.restarts;

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(R));
    const int workers = std::max(1, std::min(resolve_thread_count(threads), R));
    if (workers == 1) {
        for (int k = 0; k < R; ++k)
            outcomes[static_cast<std::size_t>(k)] =
                run_restart(spec, hist, canon, objective, guesses[static_cast<std::size_t>(k)],
                            settings);
    } else {
        std::atomic<int> next{0};
        auto work = [&] {
            while (true) {
                const int k = next.fetch_add(1);
                if (k >= R) break;
                outcomes[static_cast<std::size_t>(k)] =
                    run_restart(spec, hist, canon, objective,
                                guesses[static_cast<std::size_t>(k)], settings);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Best value wins; ties break to the lowest restart index.
    auto key = [&](int k) {
        const double v = outcomes[static_cast<std::size_t>(k)].value;
        return std::isnan(v) ? kNegInf : v;
    };
    int best = 0;
    for (int k = 1; k < R; ++k)
        if (key(k) > key(best)) best = k;

    FitResult fit;
    fit.objective_kind = canon.kind;
    fit.n_restarts = R;
    for (const auto& o : outcomes) fit.n_converged += o.converged ? 1 : 0;
    const RestartOutcome& winner = outcomes[static_cast<std::size_t>(best)];
    fit.theta_hat = winner.theta;
    fit.objective_value = winner.value;
    fit.converged = winner.converged;
    fit.total_photons = hist.total_photons();

    std::vector<int> order(static_cast<std::size_t>(R));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return a < b;
    });
    const int kept = std::min<int>(plan.keep_top, R);
    for (int i = 0; i < kept; ++i) {
        const int k = order[static_cast<std::size_t>(i)];
        const RestartOutcome& o = outcomes[static_cast<std::size_t>(k)];
        fit.restart_records.push_back(
            {k, guesses[static_cast<std::size_t>(k)], o.value, o.iterations, o.converged});
    }

    if (std::isfinite(fit.objective_value)) {
        try {
            fit.fitted_curve = evaluate(spec, fit.theta_hat, hist.grid());
        } catch (const ValidationError&) {
            fit.fitted_curve.clear();
        }
    }

    fit.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return fit;
}

}  // namespace g2fit
