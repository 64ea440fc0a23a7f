#include "g2fit/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "g2fit/errors.hpp"

namespace g2fit {

using nlohmann::ordered_json;

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FormatError(path + ": read failed");
    return std::move(buf).str();
}

std::string file_digest(const std::string& path) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_text(path))));
    return std::string("fnv1a64:") + hex;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError(tmp + ": cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw FormatError(tmp + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw FormatError(path + ": atomic replace failed");
    }
}

// --- histogram CSV ----------------------------------------------------------

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_full_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_full_int(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

Histogram read_histogram(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");

    std::string unit;
    std::string line;
    bool saw_header = false;
    std::vector<double> tau;
    std::vector<std::int64_t> counts;
    int row = 0;  // data row number, 1-based

    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(std::move(line));
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (saw_header) throw FormatError(path + ": comment after data at line " +
                                              std::to_string(line_no));
            const std::string prefix = "# unit:";
            if (line.rfind(prefix, 0) == 0) {
                std::size_t start = prefix.size();
                while (start < line.size() && line[start] == ' ') ++start;
                unit = line.substr(start);
            }
            continue;
        }
        if (!saw_header) {
            if (line != "tau,count")
                throw FormatError(path + ": expected header tau,count at line " +
                                  std::to_string(line_no));
            saw_header = true;
            continue;
        }
        ++row;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError(path + ": row " + std::to_string(row) + " is not tau,count");
        const std::string tau_text = line.substr(0, comma);
        const std::string count_text = line.substr(comma + 1);
        double t = 0;
        if (!parse_full_double(tau_text, t))
            throw FormatError(path + ": row " + std::to_string(row) + " has invalid tau '" +
                              tau_text + "'");
        std::int64_t c = 0;
        if (!parse_full_int(count_text, c)) {
            double as_real = 0;
            if (parse_full_double(count_text, as_real))
                throw FormatError(path + ": row " + std::to_string(row) +
                                  " has fractional count '" + count_text + "'");
            throw FormatError(path + ": row " + std::to_string(row) + " has invalid count '" +
                              count_text + "'");
        }
        if (c < 0)
            throw FormatError(path + ": row " + std::to_string(row) + " has negative count");
        tau.push_back(t);
        counts.push_back(c);
    }
    if (!saw_header) throw FormatError(path + ": empty file, expected tau,count header");
    if (tau.empty()) throw FormatError(path + ": no data rows");
    if (tau.size() == 1)
        throw FormatError(path + ": a single row cannot determine the bin width");

    const double bin_width =
        (tau.back() - tau.front()) / static_cast<double>(tau.size() - 1);
    try {
        return Histogram(DelayGrid(std::move(tau), bin_width), std::move(counts), unit);
    } catch (const ValidationError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

std::string histogram_csv(const Histogram& hist) {
    std::string out;
    if (!hist.unit().empty()) out += "# unit: " + hist.unit() + "\n";
    out += "tau,count\n";
    for (std::size_t i = 0; i < hist.size(); ++i) {
        out += format_double(hist.grid().tau()[i]);
        out += ',';
        out += std::to_string(hist.counts()[i]);
        out += '\n';
    }
    return out;
}

void write_histogram(const Histogram& hist, const std::string& path) {
    write_text_atomic(path, histogram_csv(hist));
}

// --- params file ------------------------------------------------------------

namespace {

DelayGrid grid_from_json(const ordered_json& g) {
    const std::string kind = g.value("kind", std::string("symmetric"));
    if (kind == "symmetric")
        return DelayGrid::symmetric(g.at("bin_width").get<double>(),
                                    g.at("n_bins_per_side").get<std::size_t>());
    if (kind == "uniform")
        return DelayGrid::uniform(g.at("tau_min").get<double>(), g.at("bin_width").get<double>(),
                                  g.at("n_bins").get<std::size_t>());
    if (kind == "explicit")
        return DelayGrid(g.at("tau").get<std::vector<double>>(), g.at("bin_width").get<double>());
    throw FormatError("unknown grid kind: " + kind);
}

BackgroundMode background_from_json(const ordered_json& j) {
    if (!j.contains("background")) return BackgroundMode::free_background();
    const auto& b = j.at("background");
    const std::string mode = b.at("mode").get<std::string>();
    if (mode == "free") return BackgroundMode::free_background();
    if (mode == "fixed") return BackgroundMode::fixed_background(b.at("value").get<double>());
    throw FormatError("unknown background mode: " + mode);
}

ordered_json background_to_json(const BackgroundMode& bg) {
    ordered_json b;
    b["mode"] = bg.fixed ? "fixed" : "free";
    if (bg.fixed) b["value"] = bg.value;
    return b;
}

}  // namespace

std::vector<double> ParamsFile::curve() const {
    if (variant == ModelVariant::PulsedEmitter)
        return eval_pulsed(pulsed_params, pulsed_spec, grid);
    return eval_thermal(thermal_params, thermal_spec, grid);
}

ParamsFile read_params(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        ParamsFile p{ModelVariant::PulsedEmitter, {}, {}, {}, {}, grid_from_json(j.at("grid")),
                     j.value("unit", std::string())};
        const std::string variant = j.at("variant").get<std::string>();
        const auto& theta = j.at("theta");
        const BackgroundMode bg = background_from_json(j);
        if (variant == "pulsed") {
            p.variant = ModelVariant::PulsedEmitter;
            p.pulsed_spec.background = bg;
            p.pulsed_spec.n_side_pulses =
                j.contains("n_side_pulses")
                    ? j.at("n_side_pulses").get<int>()
                    : default_truncation(p.grid, 2.0 * p.grid.bin_width());
            p.pulsed_params.c0 = bg.fixed ? bg.value : theta.at("c0").get<double>();
            p.pulsed_params.c1 = theta.at("c1").get<double>();
            p.pulsed_params.c2 = theta.at("c2").get<double>();
            p.pulsed_params.gamma1 = theta.at("gamma1").get<double>();
            p.pulsed_params.gamma2 = theta.at("gamma2").get<double>();
            p.pulsed_params.Lambda = theta.at("Lambda").get<double>();
        } else if (variant == "thermal") {
            p.variant = ModelVariant::ThermalGaussianSum;
            p.thermal_spec.background = bg;
            int K = j.value("num_gaussians", 0);
            if (K == 0)
                while (theta.contains("sigma" + std::to_string(K + 1))) ++K;
            p.thermal_spec.num_gaussians = K;
            p.thermal_params.c0 = bg.fixed ? bg.value : theta.at("c0").get<double>();
            for (int n = 1; n <= K; ++n) {
                p.thermal_params.c.push_back(theta.at("c" + std::to_string(n)).get<double>());
                p.thermal_params.sigma.push_back(
                    theta.at("sigma" + std::to_string(n)).get<double>());
            }
        } else {
            throw FormatError(path + ": unknown variant " + variant);
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

// --- fit report -------------------------------------------------------------

ordered_json model_to_json(const ModelSpec& spec) {
    ordered_json m;
    m["variant"] = variant_name(spec.variant());
    if (spec.variant() == ModelVariant::PulsedEmitter) {
        m["n_side_pulses"] = spec.pulsed_spec().n_side_pulses;
        m["background"] = background_to_json(spec.pulsed_spec().background);
    } else {
        m["num_gaussians"] = spec.thermal_spec().num_gaussians;
        m["background"] = background_to_json(spec.thermal_spec().background);
    }
    ordered_json layout = ordered_json::array();
    for (const auto& p : spec.layout()) {
        ordered_json row;
        row["name"] = p.name;
        row["lower"] = p.lower;
        row["upper"] = p.upper;
        row["regularized"] = p.regularized;
        layout.push_back(std::move(row));
    }
    m["layout"] = std::move(layout);
    return m;
}

ModelSpec model_from_json(const ordered_json& j) {
    std::vector<ParamSpec> layout;
    for (const auto& row : j.at("layout"))
        layout.push_back({row.at("name").get<std::string>(), row.at("lower").get<double>(),
                          row.at("upper").get<double>(), row.at("regularized").get<bool>()});
    const std::string variant = j.at("variant").get<std::string>();
    const BackgroundMode bg = background_from_json(j);
    if (variant == "pulsed") {
        PulsedEmitterSpec spec;
        spec.n_side_pulses = j.at("n_side_pulses").get<int>();
        spec.background = bg;
        return ModelSpec::pulsed(spec, std::move(layout));
    }
    if (variant == "thermal") {
        ThermalSumSpec spec;
        spec.num_gaussians = j.at("num_gaussians").get<int>();
        spec.background = bg;
        return ModelSpec::thermal(spec, std::move(layout));
    }
    throw FormatError("unknown variant " + variant);
}

ordered_json fit_report_json(const ModelSpec& spec, const Histogram& hist,
                             const ObjectiveConfig& config, const FitResult& fit,
                             const ReportProvenance& prov) {
    const ObjectiveConfig canon = normalized(config, spec);
    ordered_json j;
    j["schema_version"] = 1;
    j["model"] = model_to_json(spec);

    ordered_json obj;
    obj["kind"] = objective_kind_name(fit.objective_kind);
    obj["value"] = fit.objective_value;
    obj["lambda"] = canon.lambdas;
    j["objective"] = std::move(obj);

    ordered_json theta;
    ordered_json names = ordered_json::array();
    for (const auto& p : spec.layout()) names.push_back(p.name);
    theta["names"] = std::move(names);
    theta["values"] = fit.theta_hat;
    j["theta_hat"] = std::move(theta);
    j["unit"] = hist.unit();

    ordered_json curve;
    curve["bin_width"] = hist.grid().bin_width();
    curve["tau"] = hist.grid().tau();
    curve["y"] = fit.fitted_curve;
    j["fitted_curve"] = std::move(curve);

    ordered_json fj;
    fj["restarts"] = fit.n_restarts;
    fj["converged_restarts"] = fit.n_converged;
    fj["best_converged"] = fit.converged;
    fj["strategy"] = guess_strategy_name(prov.plan.guess_strategy);
    fj["keep_top"] = prov.plan.keep_top;
    ordered_json records = ordered_json::array();
    for (const auto& r : fit.restart_records) {
        ordered_json rec;
        rec["index"] = r.index;
        rec["guess"] = r.guess;
        rec["value"] = r.value;
        rec["iterations"] = r.iterations;
        rec["converged"] = r.converged;
        records.push_back(std::move(rec));
    }
    fj["records"] = std::move(records);
    j["fit"] = std::move(fj);

    ordered_json metrics;
    metrics["total_photons"] = fit.total_photons;
    metrics["photons_per_bin"] =
        static_cast<double>(fit.total_photons) / static_cast<double>(hist.size());
    metrics["max_count"] = hist.max_count();
    j["metrics"] = std::move(metrics);

    ordered_json pj;
    pj["input"] = prov.input_path;
    pj["input_digest"] = prov.input_digest;
    pj["seed"] = prov.seed;
    ordered_json settings;
    settings["xtol"] = prov.settings.xtol;
    settings["ftol"] = prov.settings.ftol;
    settings["max_iters"] = prov.settings.max_iters;
    settings["max_line_evals"] = prov.settings.max_line_evals;
    pj["settings"] = std::move(settings);
    pj["threads"] = prov.threads;
    j["provenance"] = std::move(pj);
    return j;
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

FitReportFile read_fit_report(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    try {
        const auto& curve = j.at("fitted_curve");
        DelayGrid grid(curve.at("tau").get<std::vector<double>>(),
                       curve.at("bin_width").get<double>());
        FitReportFile out{model_from_json(j.at("model")),
                          j.at("theta_hat").at("names").get<std::vector<std::string>>(),
                          j.at("theta_hat").at("values").get<std::vector<double>>(),
                          j.at("objective").at("kind").get<std::string>(),
                          0.0,
                          j.at("objective").at("lambda").get<std::vector<double>>(),
                          std::move(grid),
                          curve.at("y").get<std::vector<double>>(),
                          j.value("unit", std::string()),
                          j.at("metrics").at("total_photons").get<std::int64_t>(),
                          j.at("fit").at("best_converged").get<bool>()};
        const auto& value = j.at("objective").at("value");
        out.objective_value = value.is_null()
                                  ? -std::numeric_limits<double>::infinity()
                                  : value.get<double>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

// --- benchmark output -------------------------------------------------------

ordered_json benchmark_json(const EnsembleBenchmark& bench) {
    ordered_json j;
    j["schema_version"] = 1;
    j["reference"] = "synthetic ground truth curve";
    j["fixture"] = bench.variant;
    j["param_names"] = bench.param_names;
    j["theta_true"] = bench.theta_true;
    j["photon_budget"] = bench.photon_budget;
    j["time_scale"] = bench.time_scale;
    j["n_seeds"] = bench.n_seeds;
    j["seed"] = bench.seed;
    j["flagged"] = bench.flagged;
    ordered_json methods = ordered_json::array();
    for (const auto& m : bench.methods) {
        ordered_json mj;
        mj["label"] = m.label;
        mj["kind"] = objective_kind_name(m.key.kind);
        if (m.key.kind == ObjectiveKind::MAP) mj["lambda"] = m.key.lambda;
        mj["n_seeds"] = m.n_seeds;
        mj["n_success"] = m.n_success;
        mj["success_rate"] = m.success_rate;
        mj["total_failure"] = m.total_failure;
        ordered_json params = ordered_json::array();
        for (const auto& p : m.params) {
            ordered_json pj;
            pj["name"] = p.name;
            pj["bias"] = p.bias;
            pj["variance"] = p.variance;
            pj["median_abs_error"] = p.median_abs_error;
            params.push_back(std::move(pj));
        }
        mj["params"] = std::move(params);
        methods.push_back(std::move(mj));
    }
    j["methods"] = std::move(methods);
    return j;
}

std::string benchmark_csv(const EnsembleBenchmark& bench) {
    std::string out =
        "# reference: synthetic ground truth curve\n"
        "method,parameter,true_value,bias,variance,median_abs_error,success_rate\n";
    for (const auto& m : bench.methods) {
        for (std::size_t jdx = 0; jdx < m.params.size(); ++jdx) {
            const auto& p = m.params[jdx];
            out += m.label;
            out += ',';
            out += p.name;
            out += ',';
            out += format_double(bench.theta_true[jdx]);
            out += ',';
            out += format_double(p.bias);
            out += ',';
            out += format_double(p.variance);
            out += ',';
            out += format_double(p.median_abs_error);
            out += ',';
            out += format_double(m.success_rate);
            out += '\n';
        }
    }
    return out;
}

}  // namespace g2fit
