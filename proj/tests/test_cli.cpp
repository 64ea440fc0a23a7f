#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "g2fit/errors.hpp"
#include "g2fit/grid.hpp"
#include "g2fit/histogram.hpp"
#include "g2fit/io.hpp"

#ifndef G2FIT_CLI_PATH
#error "G2FIT_CLI_PATH must point at the CLI binary"
#endif

using namespace g2fit;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("g2fit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null",
        const std::string& stderr_path = "/dev/null") {
    const std::string cmd =
        std::string(G2FIT_CLI_PATH) + " " + args + " >" + stdout_path + " 2>" + stderr_path;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kParamsJson = R"({
  "variant": "thermal",
  "unit": "ns",
  "grid": {"kind": "uniform", "tau_min": -10.0, "bin_width": 1.0, "n_bins": 21},
  "theta": {"c0": 2.0, "c1": 40.0, "sigma1": 3.0}
})";

// One simulated histogram everyone fits; drawn once per process.
struct CliFixture {
    TempDir dir;
    std::string params = dir.file("params.json");
    std::string hist = (dir.path / "sim" / "replicate_0000.csv").string();

    CliFixture() {
        write_text_atomic(params, kParamsJson);
        REQUIRE(run("simulate --params " + params + " --replicates 1 --seed 5 --outdir " +
                    (dir.path / "sim").string()) == 0);
        REQUIRE(std::filesystem::exists(hist));
    }
};

CliFixture& fixture() {
    static CliFixture fx;
    return fx;
}

std::string fit_cmd(const std::string& output, const std::string& extra = "") {
    return "fit --input " + fixture().hist + " --model thermal --restarts 6 --seed 3 --output " +
           output + (extra.empty() ? "" : " " + extra);
}

}  // namespace

TEST_CASE("cli: usage errors exit 64") {
    CHECK(run("") == 64);
    CHECK(run("frobnicate") == 64);
    CHECK(run("fit --model thermal --output /dev/null") == 64);              // missing --input
    CHECK(run("fit --input x.csv --model gaussian --output o.json") == 64);  // unknown model
    CHECK(run("simulate --outdir /tmp/nowhere") == 64);  // neither --report nor --params
    CHECK(run("benchmark --fixture pulsed --methods ridge --outdir /tmp/nowhere") == 64);
    CHECK(run("benchmark --budget 10 --outdir /tmp/nowhere") == 64);  // missing --fixture
}

TEST_CASE("cli: help exits 0") {
    CHECK(run("--help") == 0);
    CHECK(run("fit --help") == 0);
}

TEST_CASE("cli fit: converged fit writes a readable report") {
    TempDir out;
    const std::string report = out.file("fit.json");
    const std::string stdout_path = out.file("stdout.txt");
    CHECK(run(fit_cmd(report), stdout_path) == 0);

    const FitReportFile fit = read_fit_report(report);
    CHECK(fit.converged);
    CHECK(fit.objective_kind == "mle");
    CHECK(fit.theta_names == std::vector<std::string>{"c0", "c1", "sigma1"});
    CHECK(fit.grid.size() == 21);
    CHECK(fit.unit == "ns");
    CHECK(fit.total_photons > 0);

    const std::string line = read_text(stdout_path);
    CHECK(line.find("objective") != std::string::npos);
    CHECK(line.find("photons") != std::string::npos);
    CHECK(line.find("restarts converged") != std::string::npos);
}

TEST_CASE("cli fit: deterministic re-runs and the lambda-zero default") {
    TempDir out;
    const std::string a = out.file("a.json");
    const std::string b = out.file("b.json");
    const std::string c = out.file("c.json");
    CHECK(run(fit_cmd(a)) == 0);
    CHECK(run(fit_cmd(b)) == 0);
    CHECK(run(fit_cmd(c, "--lambda 0")) == 0);

    const std::string bytes_a = read_text(a);
    CHECK(bytes_a == read_text(b));
    CHECK(bytes_a == read_text(c));
    CHECK(bytes_a.find("wall_time") == std::string::npos);

    // a different seed moves the restarts
    const std::string d = out.file("d.json");
    CHECK(run("fit --input " + fixture().hist +
              " --model thermal --restarts 6 --seed 4 --output " + d) == 0);
    CHECK(read_text(d) != bytes_a);
}

TEST_CASE("cli fit: input errors exit 1") {
    TempDir out;
    CHECK(run("fit --input " + out.file("missing.csv") +
              " --model thermal --output " + out.file("o.json")) == 1);

    const std::string bad = out.file("bad.csv");
    write_text_atomic(bad, "tau,count\n0,3\n");
    CHECK(run("fit --input " + bad + " --model thermal --output " + out.file("o.json")) == 1);
}

TEST_CASE("cli fit: --n-gaussians is a thermal-only flag") {
    TempDir out;
    CHECK(run("fit --input " + fixture().hist + " --model pulsed --n-gaussians 2 --output " +
              out.file("o.json")) == 64);
}

TEST_CASE("cli simulate: deterministic replicate files with a manifest") {
    TempDir out;
    const std::string dir_a = (out.path / "a").string();
    const std::string dir_b = (out.path / "b").string();
    const std::string base = "simulate --params " + fixture().params +
                             " --replicates 3 --seed 11 --outdir ";
    CHECK(run(base + dir_a) == 0);
    CHECK(run(base + dir_b) == 0);

    for (const std::string name :
         {"replicate_0000.csv", "replicate_0001.csv", "replicate_0002.csv", "manifest.json"}) {
        const std::string in_a = dir_a + "/" + name;
        CHECK(std::filesystem::exists(in_a));
        CHECK(read_text(in_a) == read_text(dir_b + "/" + name));
    }

    const Histogram h = read_histogram(dir_a + "/replicate_0001.csv");
    CHECK(h.size() == 21);
    CHECK(h.unit() == "ns");
    CHECK(h.total_photons() > 0);

    const std::string manifest = read_text(dir_a + "/manifest.json");
    CHECK(manifest.find("\"replicates\": 3") != std::string::npos);
    CHECK(manifest.find("replicate_0002.csv") != std::string::npos);
}

TEST_CASE("cli simulate: zero time scale empties every bin") {
    TempDir out;
    const std::string dir = (out.path / "zero").string();
    CHECK(run("simulate --params " + fixture().params +
              " --time-scale 0 --replicates 2 --seed 1 --outdir " + dir) == 0);
    for (const std::string name : {"replicate_0000.csv", "replicate_0001.csv"})
        CHECK(read_histogram(dir + "/" + name).total_photons() == 0);
}

TEST_CASE("cli simulate: a fit report works as the source") {
    TempDir out;
    const std::string report = out.file("fit.json");
    REQUIRE(run(fit_cmd(report)) == 0);
    const std::string dir = (out.path / "from_report").string();
    CHECK(run("simulate --report " + report + " --replicates 1 --seed 2 --outdir " + dir) == 0);
    CHECK(read_histogram(dir + "/replicate_0000.csv").size() == 21);

    // --report and --params are mutually exclusive
    CHECK(run("simulate --report " + report + " --params " + fixture().params + " --outdir " +
              (out.path / "x").string()) == 64);
}

TEST_CASE("cli evaluate: self-reference scores zero") {
    TempDir out;
    const std::string report = out.file("fit.json");
    REQUIRE(run(fit_cmd(report)) == 0);

    const std::string stdout_path = out.file("stdout.txt");
    CHECK(run("evaluate --fit " + report + " --reference " + report, stdout_path) == 0);
    const std::string text = read_text(stdout_path);
    CHECK(text.find("nrmse 0\n") != std::string::npos);
    CHECK(text.find("residuals:") != std::string::npos);
}

TEST_CASE("cli evaluate: against ground truth and raw counts") {
    TempDir out;
    const std::string report = out.file("fit.json");
    REQUIRE(run(fit_cmd(report)) == 0);

    const std::string stdout_path = out.file("stdout.txt");
    CHECK(run("evaluate --fit " + report + " --reference " + fixture().params, stdout_path) == 0);
    CHECK(read_text(stdout_path).find("nrmse 0.") != std::string::npos);

    CHECK(run("evaluate --fit " + report + " --reference " + fixture().hist) == 0);
    CHECK(run("evaluate --fit " + report + " --reference " + fixture().params +
              " --subtract-background") == 0);
}

TEST_CASE("cli evaluate: alignment and normalization failures exit 1") {
    TempDir out;
    const std::string report = out.file("fit.json");
    REQUIRE(run(fit_cmd(report)) == 0);

    const std::string other_grid = out.file("other_grid.json");
    write_text_atomic(other_grid, R"({
  "variant": "thermal",
  "grid": {"kind": "uniform", "tau_min": -5.0, "bin_width": 1.0, "n_bins": 11},
  "theta": {"c0": 2.0, "c1": 40.0, "sigma1": 3.0}
})");
    CHECK(run("evaluate --fit " + report + " --reference " + other_grid) == 1);

    const std::string flat = out.file("flat.json");
    write_text_atomic(flat, R"({
  "variant": "thermal",
  "grid": {"kind": "uniform", "tau_min": -10.0, "bin_width": 1.0, "n_bins": 21},
  "theta": {"c0": 5.0, "c1": 0.0, "sigma1": 3.0}
})");
    CHECK(run("evaluate --fit " + report + " --reference " + flat) == 1);

    CHECK(run("evaluate --fit " + out.file("missing.json") + " --reference " + report) == 1);
}

TEST_CASE("cli benchmark: smoke run with paired-method stability") {
    TempDir out;
    const std::string dir_ab = (out.path / "ab").string();
    const std::string dir_a = (out.path / "a").string();
    const std::string stderr_path = out.file("stderr.txt");

    const std::string base = "benchmark --fixture thermal --budget 200 --seeds 3 --seed 9 "
                             "--restarts 4 ";
    CHECK(run(base + "--methods mle,lsq --outdir " + dir_ab, "/dev/null", stderr_path) == 0);
    CHECK(read_text(stderr_path).find("below the 30 recommended") != std::string::npos);

    const std::string json_ab = read_text(dir_ab + "/benchmark.json");
    CHECK(std::filesystem::exists(dir_ab + "/benchmark.csv"));
    CHECK(json_ab.find("\"fixture\": \"thermal\"") != std::string::npos);
    CHECK(json_ab.find("wall_time") == std::string::npos);

    // paired design: dropping a method leaves the others' numbers unchanged
    CHECK(run(base + "--methods mle --outdir " + dir_a) == 0);
    const nlohmann::ordered_json full = nlohmann::ordered_json::parse(json_ab);
    const nlohmann::ordered_json solo =
        nlohmann::ordered_json::parse(read_text(dir_a + "/benchmark.json"));
    REQUIRE(full.at("methods").size() == 2);
    REQUIRE(solo.at("methods").size() == 1);
    CHECK(full.at("methods")[0] == solo.at("methods")[0]);

    // byte-identical re-run
    const std::string dir_c = (out.path / "c").string();
    CHECK(run(base + "--methods mle --outdir " + dir_c) == 0);
    CHECK(read_text(dir_c + "/benchmark.json") == read_text(dir_a + "/benchmark.json"));
    CHECK(read_text(dir_c + "/benchmark.csv") == read_text(dir_a + "/benchmark.csv"));
}
