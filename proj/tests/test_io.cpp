#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "g2fit/errors.hpp"
#include "g2fit/grid.hpp"
#include "g2fit/histogram.hpp"
#include "g2fit/io.hpp"
#include "g2fit/models.hpp"
#include "g2fit/multistart.hpp"
#include "g2fit/objectives.hpp"
#include "g2fit/rng.hpp"

using namespace g2fit;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("g2fit_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

double parse_back(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    REQUIRE(res.ec == std::errc{});
    REQUIRE(res.ptr == s.data() + s.size());
    return v;
}

}  // namespace

TEST_CASE("format_double: shortest form that parses back exactly") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(5.0) == "5");
    CHECK(format_double(-0.25) == "-0.25");
    CHECK(format_double(1e300) == "1e+300");

    RandomStream rng(3);
    for (int i = 0; i < 200; ++i) {
        const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        CHECK(parse_back(format_double(v)) == v);
    }
}

TEST_CASE("fnv1a64: published reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("file digest and text round trip") {
    TempDir dir;
    const std::string path = dir.file("blob.txt");

    write_text_atomic(path, "hello\n");
    CHECK(read_text(path) == "hello\n");
    CHECK(file_digest(path) == "fnv1a64:a9bc80cca21f28b3");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));

    // overwrite in place, digest follows the content
    write_text_atomic(path, "hello!\n");
    CHECK(read_text(path) == "hello!\n");
    CHECK(file_digest(path) != "fnv1a64:a9bc80cca21f28b3");
    CHECK(file_digest(path).rfind("fnv1a64:", 0) == 0);
    CHECK(file_digest(path).size() == 8 + 16);

    CHECK_THROWS_AS(read_text(dir.file("missing.txt")), FormatError);
    CHECK_THROWS_AS(file_digest(dir.file("missing.txt")), FormatError);
}

TEST_CASE("histogram CSV: canonical serialization") {
    const Histogram bare(DelayGrid::uniform(0.0, 1.0, 2), {3, 5});
    CHECK(histogram_csv(bare) == "tau,count\n0,3\n1,5\n");

    const Histogram with_unit(DelayGrid::uniform(0.0, 1.0, 2), {3, 5}, "ns");
    CHECK(histogram_csv(with_unit) == "# unit: ns\ntau,count\n0,3\n1,5\n");
}

TEST_CASE("histogram CSV: parsing") {
    TempDir dir;
    const std::string path = dir.file("hist.csv");
    auto parse = [&](const std::string& text) {
        write_text_atomic(path, text);
        return read_histogram(path);
    };

    SUBCASE("minimal two-row file") {
        const Histogram h = parse("tau,count\n0,3\n1,5\n");
        CHECK(h.grid().tau() == std::vector<double>{0.0, 1.0});
        CHECK(h.counts() == std::vector<std::int64_t>{3, 5});
        CHECK(h.grid().bin_width() == 1.0);
        CHECK(h.unit().empty());
        CHECK(h.total_photons() == 8);
        CHECK(h.max_count() == 5);
    }
    SUBCASE("unit comment, with or without a space") {
        CHECK(parse("# unit: ns\ntau,count\n0,3\n1,5\n").unit() == "ns");
        CHECK(parse("# unit:ps\ntau,count\n0,3\n1,5\n").unit() == "ps");
    }
    SUBCASE("CRLF and blank lines are tolerated") {
        const Histogram h = parse("# unit: ns\r\ntau,count\r\n0,3\r\n\r\n1,5\r\n");
        CHECK(h.unit() == "ns");
        CHECK(h.counts() == std::vector<std::int64_t>{3, 5});
    }
    SUBCASE("structural errors") {
        CHECK_THROWS_WITH_AS(parse(""), doctest::Contains("empty file"), FormatError);
        CHECK_THROWS_WITH_AS(parse("time,count\n0,3\n"), doctest::Contains("expected header"),
                             FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n"), doctest::Contains("no data rows"), FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n0,3\n"),
                             doctest::Contains("a single row cannot determine the bin width"),
                             FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n0,3\n# late comment\n1,5\n"),
                             doctest::Contains("comment after data"), FormatError);
    }
    SUBCASE("cell errors name the offending row") {
        CHECK_THROWS_WITH_AS(parse("tau,count\n0,3\n1,2.5\n"),
                             doctest::Contains("row 2 has fractional count"), FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n0,3\n1,abc\n"),
                             doctest::Contains("row 2 has invalid count"), FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n0,3\n1,-4\n"),
                             doctest::Contains("row 2 has negative count"), FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\nx,3\n1,5\n"),
                             doctest::Contains("row 1 has invalid tau"), FormatError);
        CHECK_THROWS_WITH_AS(parse("tau,count\n0 3\n1 5\n"), doctest::Contains("is not tau,count"),
                             FormatError);
    }
    SUBCASE("delays must form a uniform grid") {
        CHECK_THROWS_AS(parse("tau,count\n0,1\n1,2\n3,4\n"), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_histogram(dir.file("nope.csv")), FormatError);
    }
}

TEST_CASE("histogram CSV: write/read round trip preserves value equality") {
    TempDir dir;
    RandomStream rng(17);
    std::vector<std::int64_t> counts;
    for (int i = 0; i < 12; ++i)
        counts.push_back(static_cast<std::int64_t>(rng.uniform(0.0, 40.0)));
    const Histogram h(DelayGrid::symmetric(0.25, 6), counts, "ns");

    const std::string path = dir.file("round.csv");
    write_histogram(h, path);
    const Histogram back = read_histogram(path);
    CHECK(back == h);

    // a second write of the re-read histogram is byte-identical
    const std::string again = dir.file("round2.csv");
    write_histogram(back, again);
    CHECK(read_text(again) == read_text(path));
}

TEST_CASE("params file: pulsed variant") {
    TempDir dir;
    const std::string path = dir.file("params.json");
    write_text_atomic(path, R"({
  "variant": "pulsed",
  "unit": "ns",
  "grid": {"kind": "symmetric", "bin_width": 0.5, "n_bins_per_side": 4},
  "background": {"mode": "fixed", "value": 0.25},
  "n_side_pulses": 3,
  "theta": {"c1": 2.0, "c2": 0.5, "gamma1": 0.01, "gamma2": 1.5, "Lambda": 2.0}
})");
    const ParamsFile p = read_params(path);
    CHECK(p.variant == ModelVariant::PulsedEmitter);
    CHECK(p.unit == "ns");
    CHECK(p.grid.size() == 8);
    CHECK(p.grid.bin_width() == 0.5);
    CHECK(p.pulsed_spec.n_side_pulses == 3);
    CHECK(p.pulsed_spec.background.fixed);
    CHECK(p.pulsed_params.c0 == 0.25);
    CHECK(p.pulsed_params.c1 == 2.0);
    CHECK(p.pulsed_params.c2 == 0.5);
    CHECK(p.pulsed_params.gamma1 == 0.01);
    CHECK(p.pulsed_params.gamma2 == 1.5);
    CHECK(p.pulsed_params.Lambda == 2.0);
    CHECK(p.curve() == eval_pulsed(p.pulsed_params, p.pulsed_spec, p.grid));
}

TEST_CASE("params file: thermal variant counts Gaussians from theta keys") {
    TempDir dir;
    const std::string path = dir.file("params.json");
    write_text_atomic(path, R"({
  "variant": "thermal",
  "grid": {"kind": "uniform", "tau_min": -2.0, "bin_width": 1.0, "n_bins": 5},
  "theta": {"c0": 1.0, "c1": 2.0, "sigma1": 1.5, "c2": 0.5, "sigma2": 4.0}
})");
    const ParamsFile p = read_params(path);
    CHECK(p.variant == ModelVariant::ThermalGaussianSum);
    CHECK(p.unit.empty());
    CHECK(p.thermal_spec.num_gaussians == 2);
    CHECK_FALSE(p.thermal_spec.background.fixed);
    CHECK(p.thermal_params.c0 == 1.0);
    CHECK(p.thermal_params.c == std::vector<double>{2.0, 0.5});
    CHECK(p.thermal_params.sigma == std::vector<double>{1.5, 4.0});
    CHECK(p.curve() == eval_thermal(p.thermal_params, p.thermal_spec, p.grid));
}

TEST_CASE("params file: pulsed truncation defaults from the grid") {
    TempDir dir;
    const std::string path = dir.file("params.json");
    write_text_atomic(path, R"({
  "variant": "pulsed",
  "grid": {"kind": "explicit", "tau": [-1.0, 0.0, 1.0], "bin_width": 1.0},
  "theta": {"c0": 0.1, "c1": 1.0, "c2": 0.2, "gamma1": 0.0, "gamma2": 1.0, "Lambda": 5.0}
})");
    const ParamsFile p = read_params(path);
    CHECK(p.pulsed_spec.n_side_pulses == default_truncation(p.grid, 2.0 * p.grid.bin_width()));
    CHECK(p.pulsed_spec.n_side_pulses == 3);
}

TEST_CASE("params file: malformed inputs") {
    TempDir dir;
    const std::string path = dir.file("params.json");
    auto write_and_read = [&](const std::string& text) {
        write_text_atomic(path, text);
        return read_params(path);
    };

    CHECK_THROWS_AS(write_and_read("{"), FormatError);
    CHECK_THROWS_WITH_AS(write_and_read(R"({
  "variant": "chirped",
  "grid": {"kind": "uniform", "tau_min": 0.0, "bin_width": 1.0, "n_bins": 3},
  "theta": {}
})"),
                         doctest::Contains("unknown variant"), FormatError);
    CHECK_THROWS_WITH_AS(write_and_read(R"({
  "variant": "thermal",
  "grid": {"kind": "log", "tau_min": 0.0, "bin_width": 1.0, "n_bins": 3},
  "theta": {"c0": 1.0, "c1": 1.0, "sigma1": 1.0}
})"),
                         doctest::Contains("unknown grid kind"), FormatError);
    // required theta key absent
    CHECK_THROWS_AS(write_and_read(R"({
  "variant": "pulsed",
  "grid": {"kind": "uniform", "tau_min": 0.0, "bin_width": 1.0, "n_bins": 3},
  "theta": {"c0": 0.0, "c1": 1.0}
})"),
                    FormatError);
    CHECK_THROWS_AS(read_params(dir.file("missing.json")), FormatError);
}

TEST_CASE("model JSON round trip") {
    const Histogram hist(DelayGrid::symmetric(1.0, 3), {1, 2, 3, 4, 3, 2}, "ns");

    auto roundtrip_matches = [](const ModelSpec& spec) {
        const ModelSpec back = model_from_json(model_to_json(spec));
        REQUIRE(back.variant() == spec.variant());
        REQUIRE(back.dim() == spec.dim());
        for (std::size_t i = 0; i < spec.dim(); ++i) {
            CHECK(back.layout()[i].name == spec.layout()[i].name);
            CHECK(back.layout()[i].lower == spec.layout()[i].lower);
            CHECK(back.layout()[i].upper == spec.layout()[i].upper);
            CHECK(back.layout()[i].regularized == spec.layout()[i].regularized);
        }
        return back;
    };

    SUBCASE("pulsed, fixed background") {
        const ModelSpec spec =
            ModelSpec::pulsed_for(hist, BackgroundMode::fixed_background(0.5), 4);
        const ModelSpec back = roundtrip_matches(spec);
        CHECK(back.pulsed_spec().n_side_pulses == 4);
        CHECK(back.pulsed_spec().background.fixed);
        CHECK(back.pulsed_spec().background.value == 0.5);
    }
    SUBCASE("thermal, two Gaussians") {
        const ModelSpec spec = ModelSpec::thermal_for(hist, 2);
        const ModelSpec back = roundtrip_matches(spec);
        CHECK(back.thermal_spec().num_gaussians == 2);
        CHECK_FALSE(back.thermal_spec().background.fixed);
    }
    SUBCASE("unknown variant is rejected") {
        nlohmann::ordered_json j = model_to_json(ModelSpec::thermal_for(hist, 1));
        j["variant"] = "squeezed";
        CHECK_THROWS_AS(model_from_json(j), FormatError);
    }
}

namespace {

struct ReportFixture {
    Histogram hist{DelayGrid::symmetric(1.0, 3), {1, 2, 3, 4, 3, 2}, "ns"};
    ModelSpec spec = ModelSpec::thermal_for(hist, 1);
    std::vector<double> theta = {1.0, 3.0, 1.2};
    FitResult fit;
    ReportProvenance prov;

    ReportFixture() {
        fit.theta_hat = theta;
        fit.objective_value = -12.5;
        fit.objective_kind = ObjectiveKind::MLE;
        fit.converged = true;
        fit.n_restarts = 4;
        fit.n_converged = 3;
        fit.restart_records = {{0, {1.0, 1.0, 1.0}, -12.5, 7, true}};
        fit.fitted_curve = evaluate(spec, theta, hist.grid());
        fit.total_photons = hist.total_photons();
        fit.wall_time = 1.25;  // must not be serialized

        prov.input_path = "hist.csv";
        prov.input_digest = "fnv1a64:0123456789abcdef";
        prov.seed = 42;
        prov.plan.restarts = 4;
        prov.plan.seed = 42;
        prov.threads = 2;
    }
};

}  // namespace

TEST_CASE("fit report JSON: stable shape, no timing, byte-identical serialization") {
    ReportFixture fx;
    const nlohmann::ordered_json j =
        fit_report_json(fx.spec, fx.hist, ObjectiveConfig::mle(), fx.fit, fx.prov);

    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"schema_version", "model", "objective", "theta_hat",
                                           "unit", "fitted_curve", "fit", "metrics", "provenance"});

    const std::string text = json_text(j);
    CHECK(text.find("wall_time") == std::string::npos);
    CHECK(text.back() == '\n');
    CHECK(json_text(fit_report_json(fx.spec, fx.hist, ObjectiveConfig::mle(), fx.fit, fx.prov)) ==
          text);

    CHECK(j.at("objective").at("kind") == "mle");
    // canonical weights: one zero per regularized parameter (c1 here)
    CHECK(j.at("objective").at("lambda").get<std::vector<double>>() == std::vector<double>{0.0});
    CHECK(j.at("metrics").at("total_photons").get<std::int64_t>() == 15);
    CHECK(j.at("metrics").at("max_count").get<std::int64_t>() == 4);
    CHECK(j.at("fit").at("records").size() == 1);
    CHECK(j.at("provenance").at("threads").get<int>() == 2);
}

TEST_CASE("fit report JSON: write then read back") {
    TempDir dir;
    ReportFixture fx;
    const std::string path = dir.file("fit.json");
    write_text_atomic(path,
                      json_text(fit_report_json(fx.spec, fx.hist, ObjectiveConfig::mle(), fx.fit,
                                                fx.prov)));

    const FitReportFile report = read_fit_report(path);
    CHECK(report.model.variant() == ModelVariant::ThermalGaussianSum);
    CHECK(report.theta_names == std::vector<std::string>{"c0", "c1", "sigma1"});
    CHECK(report.theta_hat == fx.theta);
    CHECK(report.objective_kind == "mle");
    CHECK(report.objective_value == -12.5);
    CHECK(report.lambdas == std::vector<double>{0.0});
    CHECK(report.grid.tau() == fx.hist.grid().tau());
    CHECK(report.grid.bin_width() == fx.hist.grid().bin_width());
    CHECK(report.fitted_curve == fx.fit.fitted_curve);
    CHECK(report.unit == "ns");
    CHECK(report.total_photons == 15);
    CHECK(report.converged);

    SUBCASE("re-serializing the re-read report is stable") {
        // same inputs, same bytes: a second identical write matches the first
        const std::string second = dir.file("fit2.json");
        write_text_atomic(second, json_text(fit_report_json(fx.spec, fx.hist,
                                                            ObjectiveConfig::mle(), fx.fit,
                                                            fx.prov)));
        CHECK(read_text(second) == read_text(path));
    }
}

TEST_CASE("fit report JSON: non-finite objective survives as null") {
    TempDir dir;
    ReportFixture fx;
    fx.fit.objective_value = -std::numeric_limits<double>::infinity();
    const std::string path = dir.file("fit.json");
    write_text_atomic(path,
                      json_text(fit_report_json(fx.spec, fx.hist, ObjectiveConfig::mle(), fx.fit,
                                                fx.prov)));
    CHECK(read_text(path).find("\"value\": null") != std::string::npos);
    const FitReportFile report = read_fit_report(path);
    CHECK(report.objective_value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("fit report JSON: malformed files are format errors") {
    TempDir dir;
    const std::string path = dir.file("fit.json");
    write_text_atomic(path, "{\"schema_version\": 1}\n");
    CHECK_THROWS_AS(read_fit_report(path), FormatError);
    write_text_atomic(path, "not json\n");
    CHECK_THROWS_AS(read_fit_report(path), FormatError);
    CHECK_THROWS_AS(read_fit_report(dir.file("missing.json")), FormatError);
}

namespace {

EnsembleBenchmark tiny_benchmark() {
    EnsembleBenchmark bench;
    bench.variant = "thermal";
    bench.param_names = {"c0", "c1", "sigma1"};
    bench.theta_true = {2.0, 4.0, 1.5};
    bench.photon_budget = 500.0;
    bench.time_scale = 2.5;
    bench.n_seeds = 3;
    bench.seed = 11;

    MethodStats mle;
    mle.key = {ObjectiveKind::MLE, 0.0};
    mle.label = method_label(mle.key);
    mle.n_seeds = 3;
    mle.n_success = 2;
    mle.success_rate = 2.0 / 3.0;
    mle.wall_time_total = 0.6;
    mle.wall_time_mean = 0.2;
    mle.params = {{"c0", 0.1, 0.01, 0.05, {}},
                  {"c1", -0.2, 0.04, 0.15, {}},
                  {"sigma1", 0.0, 0.02, 0.1, {}}};

    MethodStats map = mle;
    map.key = {ObjectiveKind::MAP, 0.5};
    map.label = method_label(map.key);

    bench.methods = {mle, map};
    return bench;
}

}  // namespace

TEST_CASE("benchmark serialization") {
    const EnsembleBenchmark bench = tiny_benchmark();

    SUBCASE("labels") {
        CHECK(bench.methods[0].label == "mle");
        CHECK(bench.methods[1].label == "map@0.5");
    }
    SUBCASE("JSON shape") {
        const nlohmann::ordered_json j = benchmark_json(bench);
        CHECK(j.at("schema_version") == 1);
        CHECK(j.at("reference") == "synthetic ground truth curve");
        CHECK(j.at("fixture") == "thermal");
        CHECK(j.at("theta_true").get<std::vector<double>>() == bench.theta_true);
        CHECK(j.at("n_seeds") == 3);
        CHECK_FALSE(j.at("flagged").get<bool>());
        REQUIRE(j.at("methods").size() == 2);
        CHECK_FALSE(j.at("methods")[0].contains("lambda"));  // only MAP carries one
        CHECK(j.at("methods")[1].at("lambda") == 0.5);
        CHECK(j.at("methods")[0].at("params").size() == 3);
        CHECK(j.at("methods")[0].at("params")[2].at("name") == "sigma1");
        CHECK(json_text(j) == json_text(benchmark_json(bench)));
        // timing is printed, never persisted: re-runs must be byte-identical
        CHECK(json_text(j).find("wall_time") == std::string::npos);
    }
    SUBCASE("CSV shape") {
        const std::string csv = benchmark_csv(bench);
        CHECK(csv.rfind("# reference: synthetic ground truth curve\n", 0) == 0);
        CHECK(csv.find("method,parameter,true_value,bias,variance,median_abs_error,success_rate\n") !=
              std::string::npos);
        CHECK(csv.find("mle,c0,2,0.1,0.01,0.05,") != std::string::npos);
        CHECK(csv.find("map@0.5,sigma1,1.5,0,0.02,0.1,") != std::string::npos);
        // one header comment, one column row, one row per (method, parameter)
        std::size_t lines = 0;
        for (const char c : csv) lines += c == '\n';
        CHECK(lines == 2 + 2 * 3);
    }
}
