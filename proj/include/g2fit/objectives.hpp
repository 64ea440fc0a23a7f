#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "g2fit/histogram.hpp"
#include "g2fit/models.hpp"

namespace g2fit {

enum class ObjectiveKind { MAP, MLE, LSQ };

const char* objective_kind_name(ObjectiveKind k);
ObjectiveKind objective_kind_from(const std::string& name);

/// Which objective to maximize and the L1 weights for the regularized
/// parameter subset. A single lambda is broadcast to every regularized
/// parameter; all-zero lambdas are canonically the MLE.
struct ObjectiveConfig {
    ObjectiveKind kind = ObjectiveKind::MLE;
    std::vector<double> lambdas;  // empty means all-zero

    static ObjectiveConfig mle() { return {ObjectiveKind::MLE, {}}; }
    static ObjectiveConfig map(double lambda) { return {ObjectiveKind::MAP, {lambda}}; }
    static ObjectiveConfig map(std::vector<double> lambdas);
    static ObjectiveConfig lsq() { return {ObjectiveKind::LSQ, {}}; }
};

// Expands the config against the model's regularized subset: returns one
// weight per regularized parameter (layout order). Canonicalizes the kind
// (all-zero weights are MLE) and rejects inconsistent configs.
std::vector<double> resolve_lambdas(const ObjectiveConfig& config, const ModelSpec& spec);
ObjectiveConfig normalized(const ObjectiveConfig& config, const ModelSpec& spec);

/// Sum_i (n_i log y_i - y_i), dropping the theta-independent -log(n_i!) term,
/// with the convention 0*log 0 = 0. Any y_i <= 0 under a positive count
/// returns -infinity (optimizer barrier) rather than throwing.
double poisson_loglik(std::span<const double> y, std::span<const std::int64_t> counts);

/// dL/dy_i = n_i/y_i - 1 elementwise; -1 where n_i = 0 (one-sided at y = 0),
/// +infinity where y_i <= 0 under a positive count.
std::vector<double> loglik_grad_y(std::span<const double> y,
                                  std::span<const std::int64_t> counts);

/// -Sum_j lambda_j |theta_j| over the regularized parameters only.
double laplace_logprior(std::span<const double> theta, const ModelSpec& spec,
                        const ObjectiveConfig& config);

/// Log-likelihood plus log-prior; with all-zero lambdas this is bit-identical
/// to poisson_loglik alone.
double map_objective(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist,
                     const ObjectiveConfig& config);

/// -Sum_i (n_i - y_i)^2, negated so every objective is maximized.
double lsq_objective(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist);

// Dispatches on config.kind.
double objective_value(std::span<const double> theta, const ModelSpec& spec, const Histogram& hist,
                       const ObjectiveConfig& config);

using ObjectiveFn = std::function<double(std::span<const double>)>;

// Maximized objective closure for optimizers: parameter-validation failures
// inside the model become the -infinity barrier instead of exceptions.
// Verifies up front that the pulsed truncation covers the grid for every
// in-bounds period. The closure holds references: spec and hist must outlive it.
ObjectiveFn make_objective(const ModelSpec& spec, const Histogram& hist,
                           const ObjectiveConfig& config);

}  // namespace g2fit
