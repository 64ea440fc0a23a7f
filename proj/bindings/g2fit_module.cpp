// Python surface for the core library: grids, histograms, model specs,
// multi-start fitting, Poisson simulation, and quality metrics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "g2fit/errors.hpp"
#include "g2fit/grid.hpp"
#include "g2fit/histogram.hpp"
#include "g2fit/io.hpp"
#include "g2fit/metrics.hpp"
#include "g2fit/models.hpp"
#include "g2fit/multistart.hpp"
#include "g2fit/objectives.hpp"
#include "g2fit/sampler.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace g2fit;

namespace {

BackgroundMode background_from(std::optional<double> fix_background) {
    return fix_background ? BackgroundMode::fixed_background(*fix_background)
                          : BackgroundMode::free_background();
}

GuessStrategy strategy_from(const std::string& name) {
    if (name == "uniform") return GuessStrategy::UniformInBounds;
    if (name == "latin-hypercube") return GuessStrategy::LatinHypercube;
    throw ConfigError("unknown guess strategy '" + name + "'");
}

ObjectiveConfig config_from(const std::string& objective, const std::vector<double>& lambdas) {
    ObjectiveConfig config;
    config.kind = objective_kind_from(objective);
    config.lambdas = lambdas;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reconstruction of g2(tau) signals from few-photon histograms";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<DelayGrid>(m, "DelayGrid")
        .def(py::init<std::vector<double>, double>(), "tau"_a, "bin_width"_a)
        .def_static("uniform", &DelayGrid::uniform, "tau_min"_a, "bin_width"_a, "n_bins"_a)
        .def_static("symmetric", &DelayGrid::symmetric, "bin_width"_a, "n_bins_per_side"_a)
        .def_property_readonly("tau", [](const DelayGrid& g) { return g.tau(); })
        .def_property_readonly("bin_width", &DelayGrid::bin_width)
        .def_property_readonly("max_abs_tau", &DelayGrid::max_abs_tau)
        .def("same_grid", &DelayGrid::same_grid, "other"_a, "rel_tol"_a = 1e-9)
        .def("__len__", &DelayGrid::size)
        .def("__repr__", [](const DelayGrid& g) {
            return "DelayGrid(" + std::to_string(g.size()) + " bins, width " +
                   std::to_string(g.bin_width()) + ")";
        });

    py::class_<Histogram>(m, "Histogram")
        .def(py::init<DelayGrid, std::vector<std::int64_t>, std::string>(), "grid"_a, "counts"_a,
             "unit"_a = "")
        .def_property_readonly("grid", &Histogram::grid)
        .def_property_readonly("counts", [](const Histogram& h) { return h.counts(); })
        .def_property_readonly("unit", [](const Histogram& h) { return h.unit(); })
        .def_property_readonly("total_photons", &Histogram::total_photons)
        .def_property_readonly("max_count", &Histogram::max_count)
        .def("__len__", &Histogram::size)
        .def("__eq__", [](const Histogram& a, const Histogram& b) { return a == b; })
        .def("__repr__", [](const Histogram& h) {
            return "Histogram(" + std::to_string(h.size()) + " bins, " +
                   std::to_string(h.total_photons()) + " photons)";
        });

    py::class_<ModelSpec>(m, "ModelSpec")
        .def_property_readonly("variant",
                               [](const ModelSpec& s) { return variant_name(s.variant()); })
        .def_property_readonly("dim", &ModelSpec::dim)
        .def_property_readonly("param_names",
                               [](const ModelSpec& s) {
                                   std::vector<std::string> names;
                                   for (const ParamSpec& p : s.layout()) names.push_back(p.name);
                                   return names;
                               })
        .def_property_readonly("lower",
                               [](const ModelSpec& s) {
                                   std::vector<double> v;
                                   for (const ParamSpec& p : s.layout()) v.push_back(p.lower);
                                   return v;
                               })
        .def_property_readonly("upper",
                               [](const ModelSpec& s) {
                                   std::vector<double> v;
                                   for (const ParamSpec& p : s.layout()) v.push_back(p.upper);
                                   return v;
                               })
        .def_property_readonly("regularized",
                               [](const ModelSpec& s) {
                                   std::vector<bool> v;
                                   for (const ParamSpec& p : s.layout()) v.push_back(p.regularized);
                                   return v;
                               })
        .def("index_of",
             [](const ModelSpec& s, const std::string& name) { return s.index_of(name); },
             "name"_a)
        .def("rescaled_for", &ModelSpec::rescaled_for, "hist"_a)
        .def("__repr__", [](const ModelSpec& s) {
            return std::string("ModelSpec(") + variant_name(s.variant()) + ", " +
                   std::to_string(s.dim()) + " parameters)";
        });

    py::class_<RestartRecord>(m, "RestartRecord")
        .def_readonly("index", &RestartRecord::index)
        .def_readonly("guess", &RestartRecord::guess)
        .def_readonly("value", &RestartRecord::value)
        .def_readonly("iterations", &RestartRecord::iterations)
        .def_readonly("converged", &RestartRecord::converged);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("theta_hat", &FitResult::theta_hat)
        .def_readonly("objective_value", &FitResult::objective_value)
        .def_property_readonly(
            "objective",
            [](const FitResult& r) { return std::string(objective_kind_name(r.objective_kind)); })
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("n_restarts", &FitResult::n_restarts)
        .def_readonly("n_converged", &FitResult::n_converged)
        .def_readonly("restart_records", &FitResult::restart_records)
        .def_readonly("fitted_curve", &FitResult::fitted_curve)
        .def_readonly("total_photons", &FitResult::total_photons)
        .def_readonly("wall_time", &FitResult::wall_time)
        .def("__repr__", [](const FitResult& r) {
            return std::string("FitResult(") + objective_kind_name(r.objective_kind) +
                   ", objective " + std::to_string(r.objective_value) +
                   (r.converged ? ", converged)" : ", not converged)");
        });

    py::class_<SyntheticSet>(m, "SyntheticSet")
        .def_readonly("replicates", &SyntheticSet::replicates)
        .def_readonly("replicate_seeds", &SyntheticSet::replicate_seeds)
        .def_readonly("variant", &SyntheticSet::variant)
        .def_readonly("theta_true", &SyntheticSet::theta_true)
        .def_readonly("time_scale", &SyntheticSet::time_scale)
        .def_readonly("seed", &SyntheticSet::seed);

    m.def(
        "pulsed_model",
        [](const Histogram& hist, std::optional<double> fix_background,
           std::optional<int> n_side_pulses) {
            return ModelSpec::pulsed_for(hist, background_from(fix_background), n_side_pulses);
        },
        "hist"_a, "fix_background"_a = std::nullopt, "n_side_pulses"_a = std::nullopt,
        "Scale-aware pulsed-emitter model for a histogram.");
    m.def(
        "thermal_model",
        [](const Histogram& hist, int num_gaussians, std::optional<double> fix_background) {
            return ModelSpec::thermal_for(hist, num_gaussians, background_from(fix_background));
        },
        "hist"_a, "num_gaussians"_a = 1, "fix_background"_a = std::nullopt,
        "Scale-aware thermal Gaussian-sum model for a histogram.");

    m.def(
        "evaluate",
        [](const ModelSpec& spec, const std::vector<double>& theta, const DelayGrid& grid) {
            return evaluate(spec, theta, grid);
        },
        "spec"_a, "theta"_a, "grid"_a, "Noiseless model curve at the given parameters.");
    m.def(
        "center_peak_ratio",
        [](const ModelSpec& spec, const std::vector<double>& theta) {
            return center_peak_ratio(spec.unpack_pulsed(theta), spec.pulsed_spec());
        },
        "spec"_a, "theta"_a,
        "Zero-delay peak height over the first side peak, background removed.");
    m.def("default_truncation", &default_truncation, "grid"_a, "period_lower_bound"_a);

    m.def(
        "fit",
        [](const ModelSpec& spec, const Histogram& hist, const std::string& objective,
           const std::vector<double>& lambdas, int restarts, std::uint64_t seed,
           const std::string& strategy, int keep_top, int threads) {
            MultiStartPlan plan;
            plan.restarts = restarts;
            plan.seed = seed;
            plan.guess_strategy = strategy_from(strategy);
            plan.keep_top = keep_top;
            return multistart_maximize(spec, hist, config_from(objective, lambdas), plan, {},
                                       threads);
        },
        "spec"_a, "hist"_a, "objective"_a = "mle", "lambdas"_a = std::vector<double>{},
        "restarts"_a = 64, "seed"_a = 0, "strategy"_a = "uniform", "keep_top"_a = 5,
        "threads"_a = 1, py::call_guard<py::gil_scoped_release>(),
        "Seeded multi-start fit; the best restart wins deterministically.");

    m.def(
        "simulate",
        [](const ModelSpec& spec, const std::vector<double>& theta, const DelayGrid& grid,
           double time_scale, int n_replicates, std::uint64_t seed, const std::string& unit) {
            SamplerConfig config;
            config.time_scale = time_scale;
            config.seed = seed;
            config.n_replicates = n_replicates;
            return generate_synthetic(spec, theta, grid, config, unit);
        },
        "spec"_a, "theta"_a, "grid"_a, "time_scale"_a = 1.0, "n_replicates"_a = 1, "seed"_a = 0,
        "unit"_a = "", py::call_guard<py::gil_scoped_release>(),
        "Poisson-sampled replicate histograms of the scaled model curve.");
    m.def(
        "sample_poisson",
        [](const std::vector<double>& rate, std::uint64_t seed) {
            return sample_poisson(rate, seed);
        },
        "rate"_a, "seed"_a, "Independent per-bin Poisson draws from one seeded stream.");
    m.def(
        "scale_signal",
        [](const std::vector<double>& y, double T) { return scale_signal(y, T); }, "y"_a, "T"_a);

    m.def(
        "poisson_loglik",
        [](const std::vector<double>& y, const std::vector<std::int64_t>& counts) {
            return poisson_loglik(y, counts);
        },
        "y"_a, "counts"_a);
    m.def(
        "nrmse",
        [](const std::vector<double>& estimate, const std::vector<double>& reference) {
            return nrmse(estimate, reference);
        },
        "estimate"_a, "reference"_a,
        "Root-mean-square error normalized by the reference range.");

    m.def("read_histogram", &read_histogram, "path"_a, "Parse a tau,count CSV file.");
    m.def(
        "write_histogram",
        [](const Histogram& hist, const std::string& path) { write_histogram(hist, path); },
        "hist"_a, "path"_a, "Write the canonical tau,count CSV form.");

    m.attr("__version__") = "0.1.0";
}
