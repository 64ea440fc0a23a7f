#include "g2fit/objectives.hpp"

#include <cmath>
#include <limits>

#include "g2fit/errors.hpp"

namespace g2fit {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();
}  // namespace

const char* objective_kind_name(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::MAP: return "map";
        case ObjectiveKind::MLE: return "mle";
        case ObjectiveKind::LSQ: return "lsq";
    }
    return "unknown";
}

ObjectiveKind objective_kind_from(const std::string& name) {
    if (name == "map") return ObjectiveKind::MAP;
    if (name == "mle") return ObjectiveKind::MLE;
    if (name == "lsq") return ObjectiveKind::LSQ;
    throw ConfigError("unknown objective kind: " + name);
}

ObjectiveConfig ObjectiveConfig::map(std::vector<double> lambdas) {
    ObjectiveConfig c;
    c.kind = ObjectiveKind::MAP;
    c.lambdas = std::move(lambdas);
    return c;
}

std::vector<double> resolve_lambdas(const ObjectiveConfig& config, const ModelSpec& spec) {
    std::size_t n_reg = 0;
    for (const auto& p : spec.layout())
        if (p.regularized) ++n_reg;

    std::vector<double> out(n_reg, 0.0);
    if (config.kind != ObjectiveKind::LSQ && !config.lambdas.empty()) {
        if (config.lambdas.size() == 1) {
            out.assign(n_reg, config.lambdas[0]);
        } else if (config.lambdas.size() == n_reg) {
            out = config.lambdas;
        } else {
            throw ConfigError("lambda has " + std::to_string(config.lambdas.size()) +
                              " entries for " + std::to_string(n_reg) +
                              " regularized parameters");
        }
    }
    bool any_positive = false;
    for (double l : out) {
        if (!(l >= 0) || !std::isfinite(l)) throw ConfigError("lambda weights must be finite and >= 0");
        if (l > 0) any_positive = true;
    }
    if (config.kind == ObjectiveKind::MLE && any_positive)
        throw ConfigError("MLE requires all lambda weights zero");
    return out;
}

ObjectiveConfig normalized(const ObjectiveConfig& config, const ModelSpec& spec) {
    ObjectiveConfig out = config;
    out.lambdas = resolve_lambdas(config, spec);
    if (out.kind == ObjectiveKind::MAP) {
        bool any_positive = false;
        for (double l : out.lambdas) any_positive = any_positive || l > 0;
        if (!any_positive) out.kind = ObjectiveKind::MLE;
    }
    if (out.kind != ObjectiveKind::MAP) {
        for (double& l : out.lambdas) l = 0.0;
    }
    return out;
}

double poisson_loglik(std::span<const double> y, std::span<const std::int64_t> counts) {
    if (y.size() != counts.size())
        throw ValidationError("model curve and counts differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i];
        if (std::isnan(yi))
            throw ValidationError("model value is NaN at bin " + std::to_string(i));
        const std::int64_t ni = counts[i];
        if (ni < 0) throw ValidationError("negative count at bin " + std::to_string(i));
        if (ni > 0) {
            if (!(yi > 0)) return kNegInf;
            acc += static_cast<double>(ni) * std::log(yi) - yi;
        } else {
            acc -= yi;
        }
    }
    return acc;
}

std::vector<double> loglik_grad_y(std::span<const double> y,
                                  std::span<const std::int64_t> counts) {
    if (y.size() != counts.size())
        throw ValidationError("model curve and counts differ in length");
    std::vector<double> grad(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i];
        if (std::isnan(yi))
            throw ValidationError("model value is NaN at bin " + std::to_string(i));
        const std::int64_t ni = counts[i];
        if (ni < 0) throw ValidationError("negative count at bin " + std::to_string(i));
        if (ni == 0)
            grad[i] = -1.0;
        else
            grad[i] = yi > 0 ? static_cast<double>(ni) / yi - 1.0 : kPosInf;
    }
    return grad;
}

double laplace_logprior(std::span<const double> theta, const ModelSpec& spec,
                        const ObjectiveConfig& config) {
    if (theta.size() != spec.dim())
        throw LayoutError("theta has " + std::to_string(theta.size()) + " entries for a " +
                          std::to_string(spec.dim()) + "-parameter layout");
    const std::vector<double> lambdas = resolve_lambdas(config, spec);
    double acc = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < spec.layout().size(); ++i) {
        if (!spec.layout()[i].regularized) continue;
        acc -= lambdas[j++] * std::abs(theta[i]);
    }
    return acc;
}

double map_objective(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist,
                     const ObjectiveConfig& config) {
    const std::vector<double> y = evaluate(spec, theta, hist.grid());
    const double loglik = poisson_loglik(y, hist.counts());
    const double prior = laplace_logprior(theta, spec, config);
    if (prior == 0.0) return loglik;  // MLE reduction stays bit-identical
    return loglik + prior;
}

double lsq_objective(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist) {
    const std::vector<double> y = evaluate(spec, theta, hist.grid());
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = static_cast<double>(hist.counts()[i]) - y[i];
        acc += r * r;
    }
    return -acc;
}

double objective_value(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist,
                       const ObjectiveConfig& config) {
    if (config.kind == ObjectiveKind::LSQ) return lsq_objective(theta, spec, hist);
    return map_objective(theta, spec, hist, config);
}

ObjectiveFn make_objective(const ModelSpec& spec, const Histogram& hist,
                           const ObjectiveConfig& config) {
    const ObjectiveConfig canon = normalized(config, spec);
    if (spec.variant() == ModelVariant::PulsedEmitter) {
        // The truncation must cover the grid at the smallest in-bounds period,
        // otherwise every in-bounds evaluation would fail.
        const int i = spec.index_of("Lambda");
        const int N = spec.pulsed_spec().n_side_pulses;
        const double period_lo = spec.layout()[static_cast<std::size_t>(i)].lower;
        if (hist.grid().max_abs_tau() > (N - 0.5) * period_lo)
            throw TruncationError("truncation N=" + std::to_string(N) +
                                  " cannot cover the grid at the period lower bound " +
                                  std::to_string(period_lo));
    }
    return [&spec, &hist, canon](std::span<const double> theta) -> double {
        try {
            return objective_value(theta, spec, hist, canon);
        } catch (const ValidationError&) {
            return kNegInf;
        }
    };
}

}  // namespace g2fit
