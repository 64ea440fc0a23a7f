#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "g2fit/grid.hpp"
#include "g2fit/histogram.hpp"

namespace g2fit {

// Background level handling: pre-characterized (held fixed) or fitted freely.
struct BackgroundMode {
    bool fixed = false;
    double value = 0.0;  // used only when fixed

    static BackgroundMode free_background() { return {false, 0.0}; }
    static BackgroundMode fixed_background(double v) { return {true, v}; }
};

/// Pulsed single-emitter model: exponential center peak plus a train of
/// side peaks at multiples of the repetition period, under a slow decay
/// envelope. The side-peak sum is truncated symmetrically at n_side_pulses.
struct PulsedEmitterSpec {
    int n_side_pulses = 1;
    BackgroundMode background;
};

struct PulsedEmitterParams {
    double c0 = 0;      // background level, counts per bin
    double c1 = 0;      // global amplitude, scales every peak
    double c2 = 0;      // center-peak multiplier
    double gamma1 = 0;  // slow decay rate, 1/time
    double gamma2 = 0;  // fast decay rate, 1/time
    double Lambda = 0;  // laser repetition period, time
};

/// Thermal-light model: background plus a sum of Gaussians centered at zero delay.
struct ThermalSumSpec {
    int num_gaussians = 1;
    BackgroundMode background;
};

struct ThermalSumParams {
    double c0 = 0;
    std::vector<double> c;      // Gaussian amplitudes
    std::vector<double> sigma;  // Gaussian widths, time
};

// One row of a model's flat parameter layout.
struct ParamSpec {
    std::string name;
    double lower = 0;
    double upper = 0;
    bool regularized = false;  // subject to the L1 prior
};

enum class ModelVariant { PulsedEmitter, ThermalGaussianSum };

const char* variant_name(ModelVariant v);

/// Model structure plus the flat parameter layout (names, box bounds,
/// regularization mask) that objectives and optimizers work against.
class ModelSpec {
  public:
    static ModelSpec pulsed(PulsedEmitterSpec spec, std::vector<ParamSpec> layout);
    static ModelSpec thermal(ThermalSumSpec spec, std::vector<ParamSpec> layout);

    // Scale-aware default layout derived from a histogram: amplitudes in
    // [0, 10*max(n_i)], rates in [1e-4/tau_max, 10/bin_width], the period in
    // [2*bin_width, tau_max], Gaussian widths in [bin_width/10, tau_max].
    // The truncation defaults to default_truncation at the period's lower bound.
    static ModelSpec pulsed_for(const Histogram& hist,
                                BackgroundMode background = BackgroundMode::free_background(),
                                std::optional<int> n_side_pulses = std::nullopt);
    static ModelSpec thermal_for(const Histogram& hist, int num_gaussians = 1,
                                 BackgroundMode background = BackgroundMode::free_background());

    // Same structure, bounds refreshed for a new histogram's count scale.
    ModelSpec rescaled_for(const Histogram& hist) const;

    ModelVariant variant() const { return variant_; }
    const PulsedEmitterSpec& pulsed_spec() const;
    const ThermalSumSpec& thermal_spec() const;
    const std::vector<ParamSpec>& layout() const { return layout_; }
    std::size_t dim() const { return layout_.size(); }
    int index_of(std::string_view name) const;  // -1 if absent

    PulsedEmitterParams unpack_pulsed(std::span<const double> theta) const;
    ThermalSumParams unpack_thermal(std::span<const double> theta) const;
    std::vector<double> pack_pulsed(const PulsedEmitterParams& p) const;
    std::vector<double> pack_thermal(const ThermalSumParams& p) const;

  private:
    ModelSpec() = default;
    void validate_layout() const;

    ModelVariant variant_ = ModelVariant::PulsedEmitter;
    PulsedEmitterSpec pulsed_;
    ThermalSumSpec thermal_;
    std::vector<ParamSpec> layout_;
};

/// y_i = c0 + c1 e^{-gamma1|tau_i|} (c2 e^{-gamma2|tau_i|}
///          + sum_{0<|n|<=N} e^{-gamma2|tau_i - n Lambda|})
std::vector<double> eval_pulsed(const PulsedEmitterParams& params, const PulsedEmitterSpec& spec,
                                const DelayGrid& grid);

/// y_i = c0 + sum_n c_n exp(-tau_i^2 / (2 sigma_n^2))
std::vector<double> eval_thermal(const ThermalSumParams& params, const ThermalSumSpec& spec,
                                 const DelayGrid& grid);

// Unpacks theta by layout order and delegates to the matching evaluator.
std::vector<double> evaluate(const ModelSpec& spec, std::span<const double> theta,
                             const DelayGrid& grid);

// Smallest truncation N with (N-1) * Lambda_lower_bound >= max|tau| plus one
// period of margin; every grid point is then inside the coverage window
// max|tau| <= (N-0.5) * Lambda for any Lambda >= the bound.
int default_truncation(const DelayGrid& grid, double Lambda_lower_bound);

// Height of the zero-delay peak relative to the first side peak, background
// removed: (y(0) - c0) / (y(Lambda) - c0). Below 0.5 signals antibunching.
double center_peak_ratio(const PulsedEmitterParams& params, const PulsedEmitterSpec& spec);

}  // namespace g2fit
