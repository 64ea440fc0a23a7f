#pragma once

#include <string>
#include <vector>

#include "g2fit/models.hpp"

namespace g2fit {

/// Synthetic ground truth for tests and benchmarks: a grid, a model with
/// scale-aware default bounds, the packed true parameters and their noiseless
/// curve. Rescale the model per sampled histogram before fitting.
struct Fixture {
    DelayGrid grid;
    ModelSpec model;
    std::vector<double> theta_true;
    std::vector<double> true_curve;
    double curve_total = 0;
    std::string unit;
};

// Pulsed single emitter in the antibunched regime: 256 bins of width 1,
// period 25, fast decay 0.4, center multiplier 0.1.
Fixture pulsed_fixture();

// Single-Gaussian thermal bunching curve: 101 bins over [-50, 50], width 5.
Fixture thermal_fixture();

}  // namespace g2fit
