#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "g2fit/benchmark.hpp"
#include "g2fit/histogram.hpp"
#include "g2fit/metrics.hpp"
#include "g2fit/models.hpp"
#include "g2fit/multistart.hpp"

namespace g2fit {

// --- primitives -------------------------------------------------------------

// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view bytes);

// "fnv1a64:<16 hex digits>" over the raw file bytes.
std::string file_digest(const std::string& path);

std::string read_text(const std::string& path);

// Single-writer atomic replace: temp file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

// --- histogram CSV ----------------------------------------------------------

// Format: optional "# unit: <string>" comment, header "tau,count", decimal
// tau, non-negative integer count, LF line endings.
Histogram read_histogram(const std::string& path);
std::string histogram_csv(const Histogram& hist);
void write_histogram(const Histogram& hist, const std::string& path);

// --- params file ------------------------------------------------------------

/// Ground-truth description used by `simulate`: model structure, parameter
/// values and the delay grid, without fitting bounds.
struct ParamsFile {
    ModelVariant variant = ModelVariant::PulsedEmitter;
    PulsedEmitterSpec pulsed_spec;
    PulsedEmitterParams pulsed_params;
    ThermalSumSpec thermal_spec;
    ThermalSumParams thermal_params;
    DelayGrid grid;
    std::string unit;

    std::vector<double> curve() const;
};

ParamsFile read_params(const std::string& path);

// --- fit report JSON --------------------------------------------------------

struct ReportProvenance {
    std::string input_path;
    std::string input_digest;
    std::uint64_t seed = 0;
    OptimizerSettings settings;
    MultiStartPlan plan;
    int threads = 1;
};

nlohmann::ordered_json model_to_json(const ModelSpec& spec);
ModelSpec model_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json fit_report_json(const ModelSpec& spec, const Histogram& hist,
                                       const ObjectiveConfig& config, const FitResult& fit,
                                       const ReportProvenance& prov);

/// Fit report re-read for downstream commands.
struct FitReportFile {
    ModelSpec model;
    std::vector<std::string> theta_names;
    std::vector<double> theta_hat;
    std::string objective_kind;
    double objective_value = 0;
    std::vector<double> lambdas;
    DelayGrid grid;
    std::vector<double> fitted_curve;
    std::string unit;
    std::int64_t total_photons = 0;
    bool converged = false;
};

FitReportFile read_fit_report(const std::string& path);

// Serialized with two-space indent and stable key order; identical inputs
// give identical bytes.
std::string json_text(const nlohmann::ordered_json& j);

// --- benchmark output -------------------------------------------------------

nlohmann::ordered_json benchmark_json(const EnsembleBenchmark& bench);
std::string benchmark_csv(const EnsembleBenchmark& bench);

}  // namespace g2fit
