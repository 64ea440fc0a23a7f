#include "g2fit/fixtures.hpp"

#include <cmath>

#include "g2fit/histogram.hpp"

namespace g2fit {

namespace {

// Deterministic prototype histogram (rounded noiseless curve) from which the
// scale-aware default bounds are derived.
Histogram prototype(const DelayGrid& grid, const std::vector<double>& curve,
                    const std::string& unit) {
    std::vector<std::int64_t> counts(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i)
        counts[i] = static_cast<std::int64_t>(std::llround(curve[i]));
    return Histogram(grid, std::move(counts), unit);
}

}  // namespace

Fixture pulsed_fixture() {
    DelayGrid grid = DelayGrid::symmetric(1.0, 128);

    PulsedEmitterParams params;
    params.c0 = 0.05;
    params.c1 = 1.0;
    params.c2 = 0.10;
    params.gamma1 = 0.002;
    params.gamma2 = 0.4;
    params.Lambda = 25.0;

    PulsedEmitterSpec spec;
    spec.n_side_pulses = default_truncation(grid, 2.0 * grid.bin_width());
    spec.background = BackgroundMode::free_background();

    std::vector<double> curve = eval_pulsed(params, spec, grid);
    ModelSpec model = ModelSpec::pulsed_for(prototype(grid, curve, "ns"),
                                            BackgroundMode::free_background(),
                                            spec.n_side_pulses);

    Fixture fx{std::move(grid), std::move(model), {}, {}, 0.0, "ns"};
    fx.theta_true = fx.model.pack_pulsed(params);
    fx.true_curve = std::move(curve);
    for (double y : fx.true_curve) fx.curve_total += y;
    return fx;
}

Fixture thermal_fixture() {
    DelayGrid grid = DelayGrid::uniform(-50.0, 1.0, 101);

    ThermalSumParams params;
    params.c0 = 1.0;
    params.c = {1.0};
    params.sigma = {5.0};

    ThermalSumSpec spec;
    spec.num_gaussians = 1;
    spec.background = BackgroundMode::free_background();

    std::vector<double> curve = eval_thermal(params, spec, grid);
    ModelSpec model = ModelSpec::thermal_for(prototype(grid, curve, "ns"), 1,
                                             BackgroundMode::free_background());

    Fixture fx{std::move(grid), std::move(model), {}, {}, 0.0, "ns"};
    fx.theta_true = fx.model.pack_thermal(params);
    fx.true_curve = std::move(curve);
    for (double y : fx.true_curve) fx.curve_total += y;
    return fx;
}

}  // namespace g2fit
