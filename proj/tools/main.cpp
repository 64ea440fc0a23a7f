#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "g2fit/benchmark.hpp"
#include "g2fit/errors.hpp"
#include "g2fit/fixtures.hpp"
#include "g2fit/io.hpp"
#include "g2fit/metrics.hpp"
#include "g2fit/multistart.hpp"
#include "g2fit/rng.hpp"
#include "g2fit/sampler.hpp"

namespace {

using namespace g2fit;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;

struct FitArgs {
    std::string input;
    std::string output;
    std::string model;
    double lambda = 0.0;
    int restarts = 64;
    std::uint64_t seed = 0;
    std::optional<double> fix_background;
    int n_gaussians = 1;
    int threads = 0;
};

struct SimulateArgs {
    std::string report;
    std::string params;
    std::string outdir;
    double time_scale = 1.0;
    int replicates = 1;
    std::uint64_t seed = 0;
};

struct EvaluateArgs {
    std::string fit;
    std::string reference;
    bool subtract_background = false;
};

struct BenchmarkArgs {
    std::string fixture;
    std::string outdir;
    double budget = 500.0;
    int seeds = 50;
    std::uint64_t seed = 0;
    std::vector<std::string> methods = {"map", "mle", "lsq"};
    std::vector<double> lambda_grid;
    int restarts = 16;
    int threads = 0;
};

BackgroundMode background_mode(const std::optional<double>& fixed) {
    return fixed ? BackgroundMode::fixed_background(*fixed) : BackgroundMode::free_background();
}

int run_fit(const FitArgs& a) {
    const Histogram hist = read_histogram(a.input);
    const BackgroundMode bg = background_mode(a.fix_background);
    const ModelSpec spec = a.model == "pulsed" ? ModelSpec::pulsed_for(hist, bg)
                                               : ModelSpec::thermal_for(hist, a.n_gaussians, bg);
    const ObjectiveConfig config =
        a.lambda != 0.0 ? ObjectiveConfig::map(a.lambda) : ObjectiveConfig::mle();

    MultiStartPlan plan;
    plan.restarts = a.restarts;
    plan.seed = a.seed;
    const OptimizerSettings settings;
    const int threads = resolve_thread_count(a.threads);

    const FitResult fit = multistart_maximize(spec, hist, config, plan, settings, threads);

    ReportProvenance prov;
    prov.input_path = a.input;
    prov.input_digest = file_digest(a.input);
    prov.seed = a.seed;
    prov.settings = settings;
    prov.plan = plan;
    prov.threads = threads;
    write_text_atomic(a.output, json_text(fit_report_json(spec, hist, config, fit, prov)));

    std::printf("%s %s: objective %.10g, %lld photons, %d/%d restarts converged, %.3f s -> %s\n",
                a.model.c_str(), objective_kind_name(fit.objective_kind), fit.objective_value,
                static_cast<long long>(fit.total_photons), fit.n_converged, fit.n_restarts,
                fit.wall_time, a.output.c_str());
    if (!fit.converged)
        std::fprintf(stderr, "warning: no restart converged; report is best-effort\n");
    return fit.converged ? kExitOk : kExitNotConverged;
}

int run_simulate(const SimulateArgs& a) {
    std::vector<double> curve;
    std::optional<DelayGrid> grid;
    std::string unit;
    std::string source_kind;
    std::string source;
    if (!a.params.empty()) {
        const ParamsFile p = read_params(a.params);
        curve = p.curve();
        grid = p.grid;
        unit = p.unit;
        source_kind = "params";
        source = a.params;
    } else {
        const FitReportFile r = read_fit_report(a.report);
        curve = r.fitted_curve;
        grid = r.grid;
        unit = r.unit;
        source_kind = "report";
        source = a.report;
    }

    const std::vector<double> scaled = scale_signal(curve, a.time_scale);
    std::filesystem::create_directories(a.outdir);

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    std::int64_t grand_total = 0;
    for (int k = 0; k < a.replicates; ++k) {
        const std::uint64_t sk = substream_seed(a.seed, static_cast<std::uint64_t>(k));
        const Histogram h(*grid, sample_poisson(scaled, sk), unit);
        char name[32];
        std::snprintf(name, sizeof name, "replicate_%04d.csv", k);
        write_histogram(h, (std::filesystem::path(a.outdir) / name).string());
        nlohmann::ordered_json entry;
        entry["file"] = name;
        entry["seed"] = sk;
        entry["total_photons"] = h.total_photons();
        files.push_back(std::move(entry));
        grand_total += h.total_photons();
    }

    nlohmann::ordered_json manifest;
    manifest["schema_version"] = 1;
    manifest["source"] = source;
    manifest["source_kind"] = source_kind;
    manifest["time_scale"] = a.time_scale;
    manifest["replicates"] = a.replicates;
    manifest["seed"] = a.seed;
    manifest["unit"] = unit;
    manifest["files"] = std::move(files);
    write_text_atomic((std::filesystem::path(a.outdir) / "manifest.json").string(),
                      json_text(manifest));

    std::printf("simulate: %d replicate(s) at time scale %g, %lld photons total -> %s\n",
                a.replicates, a.time_scale, static_cast<long long>(grand_total),
                a.outdir.c_str());
    return kExitOk;
}

double report_background(const FitReportFile& r) {
    const int i = r.model.index_of("c0");
    if (i >= 0) return r.theta_hat[static_cast<std::size_t>(i)];
    return r.model.variant() == ModelVariant::PulsedEmitter
               ? r.model.pulsed_spec().background.value
               : r.model.thermal_spec().background.value;
}

struct ReferenceCurve {
    std::vector<double> y;
    std::optional<DelayGrid> grid;
    std::optional<double> background;  // known c0, when the source carries one
};

ReferenceCurve load_reference(const std::string& path) {
    ReferenceCurve ref;
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
        const Histogram h = read_histogram(path);
        ref.y.reserve(h.size());
        for (const std::int64_t n : h.counts()) ref.y.push_back(static_cast<double>(n));
        ref.grid = h.grid();
        return ref;
    }
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    if (j.contains("theta")) {
        const ParamsFile p = read_params(path);
        ref.y = p.curve();
        ref.grid = p.grid;
        ref.background = p.variant == ModelVariant::PulsedEmitter ? p.pulsed_params.c0
                                                                  : p.thermal_params.c0;
        return ref;
    }
    const FitReportFile r = read_fit_report(path);
    ref.y = r.fitted_curve;
    ref.grid = r.grid;
    ref.background = report_background(r);
    return ref;
}

int run_evaluate(const EvaluateArgs& a) {
    const FitReportFile fit = read_fit_report(a.fit);
    const ReferenceCurve ref = load_reference(a.reference);

    if (!ref.grid || ref.grid->tau() != fit.grid.tau()) {
        std::fprintf(stderr, "error: reference delay grid does not align with the fit's grid\n");
        return kExitInputError;
    }

    std::vector<double> estimate = fit.fitted_curve;
    std::vector<double> reference = ref.y;
    if (a.subtract_background) {
        const double est_bg = report_background(fit);
        // a raw histogram has no declared background; use the fitted one
        const double ref_bg = ref.background.value_or(est_bg);
        for (double& v : estimate) v -= est_bg;
        for (double& v : reference) v -= ref_bg;
    }

    const MetricsReport m = evaluate_curves(estimate, reference, fit.total_photons);
    std::printf("nrmse %.10g\n", m.nrmse);
    std::printf("residuals: max_abs %.10g, mean %.10g, variance %.10g\n", m.residuals.max_abs,
                m.residuals.mean, m.residuals.variance);
    std::printf("photons: %lld total, %.10g per bin\n",
                static_cast<long long>(m.total_photons), m.photons_per_bin);
    return kExitOk;
}

int run_benchmark(const BenchmarkArgs& a) {
    if (a.seeds < 30)
        std::fprintf(stderr,
                     "warning: %d seeds is below the 30 recommended for stable variance "
                     "estimates\n",
                     a.seeds);

    std::vector<MethodKey> keys;
    for (const std::string& m : a.methods) {
        if (m == "mle") {
            keys.push_back({ObjectiveKind::MLE, 0.0});
        } else if (m == "lsq") {
            keys.push_back({ObjectiveKind::LSQ, 0.0});
        } else if (m == "map") {
            if (a.lambda_grid.empty())
                keys.push_back({ObjectiveKind::MAP, 0.0});
            else
                for (const double l : a.lambda_grid) keys.push_back({ObjectiveKind::MAP, l});
        } else {
            std::fprintf(stderr, "error: unknown method '%s'\n", m.c_str());
            return kExitUsage;
        }
    }

    const Fixture fx = a.fixture == "pulsed" ? pulsed_fixture() : thermal_fixture();
    MultiStartPlan plan;
    plan.restarts = a.restarts;
    const OptimizerSettings settings;
    const int threads = resolve_thread_count(a.threads);

    const EnsembleBenchmark bench = run_ensemble_benchmark(
        fx.model, fx.theta_true, fx.grid, a.budget, keys, a.seeds, a.seed, plan, settings,
        threads);

    std::filesystem::create_directories(a.outdir);
    write_text_atomic((std::filesystem::path(a.outdir) / "benchmark.json").string(),
                      json_text(benchmark_json(bench)));
    write_text_atomic((std::filesystem::path(a.outdir) / "benchmark.csv").string(),
                      benchmark_csv(bench));

    for (const MethodStats& m : bench.methods)
        std::printf("%s: success %d/%d (%.1f%%), mean wall time %.3f s\n", m.label.c_str(),
                    m.n_success, m.n_seeds, 100.0 * m.success_rate, m.wall_time_mean);
    if (bench.flagged)
        std::fprintf(stderr, "warning: at least one method failed on every seed\n");
    std::printf("benchmark: %s fixture, budget %g, %d seeds -> %s\n", a.fixture.c_str(),
                a.budget, a.seeds, a.outdir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian reconstruction of photon-correlation signals from sparse histograms"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Fit a model to a histogram CSV");
    fit->add_option("--input", fit_args.input, "histogram CSV")->required();
    fit->add_option("--model", fit_args.model, "model variant")
        ->required()
        ->check(CLI::IsMember({"pulsed", "thermal"}));
    fit->add_option("--lambda", fit_args.lambda, "L1 prior weight; 0 is the MLE")
        ->capture_default_str();
    fit->add_option("--restarts", fit_args.restarts, "multi-start restarts")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    fit->add_option("--seed", fit_args.seed, "restart RNG seed")->capture_default_str();
    fit->add_option("--fix-background", fit_args.fix_background,
                    "hold the background level fixed at this value");
    CLI::Option* ng = fit->add_option("--n-gaussians", fit_args.n_gaussians,
                                      "thermal model component count")
                          ->capture_default_str()
                          ->check(CLI::PositiveNumber);
    fit->add_option("--output", fit_args.output, "fit report JSON path")->required();
    fit->add_option("--threads", fit_args.threads, "worker threads; 0 = auto")
        ->check(CLI::NonNegativeNumber);

    SimulateArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Sample synthetic histograms from a curve");
    CLI::Option* sim_report =
        simulate->add_option("--report", sim_args.report, "fit report JSON as the source curve");
    simulate->add_option("--params", sim_args.params, "ground-truth params JSON as the source")
        ->excludes(sim_report);
    simulate->add_option("--time-scale", sim_args.time_scale, "integration-time factor T")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--replicates", sim_args.replicates, "histograms to draw")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_args.seed, "sampler seed")->capture_default_str();
    simulate->add_option("--outdir", sim_args.outdir, "output directory")->required();

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a fit against a reference");
    evaluate->add_option("--fit", eval_args.fit, "fit report JSON")->required();
    evaluate
        ->add_option("--reference", eval_args.reference,
                     "histogram CSV, params JSON, or fit report JSON")
        ->required();
    evaluate->add_flag("--subtract-background", eval_args.subtract_background,
                       "remove the background level before scoring");

    BenchmarkArgs bench_args;
    CLI::App* benchmark = app.add_subcommand("benchmark", "Paired estimator comparison");
    benchmark->add_option("--fixture", bench_args.fixture, "synthetic ground truth")
        ->required()
        ->check(CLI::IsMember({"pulsed", "thermal"}));
    benchmark->add_option("--budget", bench_args.budget, "expected photons per histogram")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    benchmark->add_option("--seeds", bench_args.seeds, "ensemble size")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    benchmark->add_option("--seed", bench_args.seed, "master seed")->capture_default_str();
    benchmark->add_option("--methods", bench_args.methods, "estimators to compare")
        ->delimiter(',')
        ->check(CLI::IsMember({"map", "mle", "lsq"}));
    benchmark->add_option("--lambda-grid", bench_args.lambda_grid, "MAP prior weights to sweep")
        ->delimiter(',');
    benchmark->add_option("--restarts", bench_args.restarts, "multi-start restarts per fit")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    benchmark->add_option("--threads", bench_args.threads, "worker threads; 0 = auto")
        ->check(CLI::NonNegativeNumber);
    benchmark->add_option("--outdir", bench_args.outdir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit->parsed()) {
            if (fit_args.model == "pulsed" && ng->count() > 0) {
                std::fprintf(stderr, "error: --n-gaussians applies to the thermal model only\n");
                return kExitUsage;
            }
            return run_fit(fit_args);
        }
        if (simulate->parsed()) {
            if (sim_args.report.empty() && sim_args.params.empty()) {
                std::fprintf(stderr, "error: one of --report or --params is required\n");
                return kExitUsage;
            }
            return run_simulate(sim_args);
        }
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (benchmark->parsed()) return run_benchmark(bench_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
    return kExitUsage;
}
