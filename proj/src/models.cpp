#include "g2fit/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "g2fit/errors.hpp"

namespace g2fit {

namespace {

[[noreturn]] void fail_param(const std::string& name, const std::string& requirement,
                             double value) {
    std::ostringstream os;
    os << "parameter " << name << " must be " << requirement << ", got " << value;
    throw ValidationError(os.str());
}

void check_nonneg(const std::string& name, double value) {
    if (!(value >= 0)) fail_param(name, ">= 0", value);
}

void check_positive(const std::string& name, double value) {
    if (!(value > 0)) fail_param(name, "> 0", value);
}

void validate(const PulsedEmitterParams& p, const PulsedEmitterSpec& spec) {
    if (spec.n_side_pulses < 1)
        throw ValidationError("n_side_pulses must be >= 1, got " +
                              std::to_string(spec.n_side_pulses));
    check_nonneg("c0", p.c0);
    check_nonneg("c1", p.c1);
    check_nonneg("c2", p.c2);
    check_nonneg("gamma1", p.gamma1);
    check_positive("gamma2", p.gamma2);
    check_positive("Lambda", p.Lambda);
}

void validate(const ThermalSumParams& p, const ThermalSumSpec& spec) {
    if (spec.num_gaussians < 1)
        throw ValidationError("num_gaussians must be >= 1, got " +
                              std::to_string(spec.num_gaussians));
    const auto k = static_cast<std::size_t>(spec.num_gaussians);
    if (p.c.size() != k || p.sigma.size() != k)
        throw ValidationError("thermal params carry " + std::to_string(p.c.size()) +
                              " amplitudes and " + std::to_string(p.sigma.size()) +
                              " widths for " + std::to_string(spec.num_gaussians) +
                              " Gaussians");
    check_nonneg("c0", p.c0);
    for (std::size_t n = 0; n < k; ++n) {
        check_nonneg("c" + std::to_string(n + 1), p.c[n]);
        check_positive("sigma" + std::to_string(n + 1), p.sigma[n]);
    }
}

void check_background(const BackgroundMode& bg) {
    if (bg.fixed && (!std::isfinite(bg.value) || !(bg.value >= 0)))
        throw ValidationError("fixed background must be finite and >= 0");
}

}  // namespace

const char* variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::PulsedEmitter: return "pulsed";
        case ModelVariant::ThermalGaussianSum: return "thermal";
    }
    return "unknown";
}

ModelSpec ModelSpec::pulsed(PulsedEmitterSpec spec, std::vector<ParamSpec> layout) {
    ModelSpec m;
    m.variant_ = ModelVariant::PulsedEmitter;
    m.pulsed_ = spec;
    m.layout_ = std::move(layout);
    m.validate_layout();
    return m;
}

ModelSpec ModelSpec::thermal(ThermalSumSpec spec, std::vector<ParamSpec> layout) {
    ModelSpec m;
    m.variant_ = ModelVariant::ThermalGaussianSum;
    m.thermal_ = spec;
    m.layout_ = std::move(layout);
    m.validate_layout();
    return m;
}

ModelSpec ModelSpec::pulsed_for(const Histogram& hist, BackgroundMode background,
                                std::optional<int> n_side_pulses) {
    const DelayGrid& grid = hist.grid();
    const double amp_hi = 10.0 * static_cast<double>(std::max<std::int64_t>(hist.max_count(), 1));
    const double tau_max = grid.max_abs_tau();
    const double rate_lo = 1e-4 / tau_max;
    const double rate_hi = 10.0 / grid.bin_width();
    const double period_lo = 2.0 * grid.bin_width();
    const double period_hi = tau_max;

    PulsedEmitterSpec spec;
    spec.background = background;
    spec.n_side_pulses = n_side_pulses ? *n_side_pulses : default_truncation(grid, period_lo);

    std::vector<ParamSpec> layout;
    if (!background.fixed) layout.push_back({"c0", 0.0, amp_hi, false});
    layout.push_back({"c1", 0.0, amp_hi, true});
    layout.push_back({"c2", 0.0, amp_hi, true});
    layout.push_back({"gamma1", rate_lo, rate_hi, false});
    layout.push_back({"gamma2", rate_lo, rate_hi, false});
    layout.push_back({"Lambda", period_lo, period_hi, false});
    return pulsed(spec, std::move(layout));
}

ModelSpec ModelSpec::thermal_for(const Histogram& hist, int num_gaussians,
                                 BackgroundMode background) {
    const DelayGrid& grid = hist.grid();
    const double amp_hi = 10.0 * static_cast<double>(std::max<std::int64_t>(hist.max_count(), 1));
    const double tau_max = grid.max_abs_tau();
    const double sigma_lo = grid.bin_width() / 10.0;
    const double sigma_hi = tau_max;

    ThermalSumSpec spec;
    spec.num_gaussians = num_gaussians;
    spec.background = background;

    std::vector<ParamSpec> layout;
    if (!background.fixed) layout.push_back({"c0", 0.0, amp_hi, false});
    for (int n = 1; n <= num_gaussians; ++n)
        layout.push_back({"c" + std::to_string(n), 0.0, amp_hi, true});
    for (int n = 1; n <= num_gaussians; ++n)
        layout.push_back({"sigma" + std::to_string(n), sigma_lo, sigma_hi, false});
    return thermal(spec, std::move(layout));
}

ModelSpec ModelSpec::rescaled_for(const Histogram& hist) const {
    ModelSpec fresh = variant_ == ModelVariant::PulsedEmitter
                          ? pulsed_for(hist, pulsed_.background, pulsed_.n_side_pulses)
                          : thermal_for(hist, thermal_.num_gaussians, thermal_.background);
    for (auto& p : fresh.layout_) {
        const int i = index_of(p.name);
        if (i >= 0) p.regularized = layout_[static_cast<std::size_t>(i)].regularized;
    }
    return fresh;
}

const PulsedEmitterSpec& ModelSpec::pulsed_spec() const {
    if (variant_ != ModelVariant::PulsedEmitter)
        throw ConfigError("model is not the pulsed variant");
    return pulsed_;
}

const ThermalSumSpec& ModelSpec::thermal_spec() const {
    if (variant_ != ModelVariant::ThermalGaussianSum)
        throw ConfigError("model is not the thermal variant");
    return thermal_;
}

int ModelSpec::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < layout_.size(); ++i)
        if (layout_[i].name == name) return static_cast<int>(i);
    return -1;
}

void ModelSpec::validate_layout() const {
    std::set<std::string> names;
    for (const auto& p : layout_) {
        if (!names.insert(p.name).second)
            throw LayoutError("duplicate layout parameter " + p.name);
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper))
            throw LayoutError("parameter " + p.name + " needs finite bounds with lower < upper");
    }

    std::set<std::string> expected;
    if (variant_ == ModelVariant::PulsedEmitter) {
        if (pulsed_.n_side_pulses < 1)
            throw ValidationError("n_side_pulses must be >= 1, got " +
                                  std::to_string(pulsed_.n_side_pulses));
        check_background(pulsed_.background);
        if (!pulsed_.background.fixed) expected.insert("c0");
        expected.insert({"c1", "c2", "gamma1", "gamma2", "Lambda"});
    } else {
        if (thermal_.num_gaussians < 1)
            throw ValidationError("num_gaussians must be >= 1, got " +
                                  std::to_string(thermal_.num_gaussians));
        check_background(thermal_.background);
        if (!thermal_.background.fixed) expected.insert("c0");
        for (int n = 1; n <= thermal_.num_gaussians; ++n) {
            expected.insert("c" + std::to_string(n));
            expected.insert("sigma" + std::to_string(n));
        }
    }
    if (names != expected) {
        std::ostringstream os;
        os << "layout names do not match the " << variant_name(variant_) << " structure; expected {";
        for (const auto& n : expected) os << ' ' << n;
        os << " } got {";
        for (const auto& n : names) os << ' ' << n;
        os << " }";
        throw LayoutError(os.str());
    }
}

namespace {

double fetch(const ModelSpec& spec, std::span<const double> theta, const std::string& name) {
    return theta[static_cast<std::size_t>(spec.index_of(name))];
}

void require_length(const ModelSpec& spec, std::span<const double> theta) {
    if (theta.size() != spec.dim())
        throw LayoutError("theta has " + std::to_string(theta.size()) + " entries for a " +
                          std::to_string(spec.dim()) + "-parameter layout");
}

}  // namespace

PulsedEmitterParams ModelSpec::unpack_pulsed(std::span<const double> theta) const {
    pulsed_spec();
    require_length(*this, theta);
    PulsedEmitterParams p;
    p.c0 = pulsed_.background.fixed ? pulsed_.background.value : fetch(*this, theta, "c0");
    p.c1 = fetch(*this, theta, "c1");
    p.c2 = fetch(*this, theta, "c2");
    p.gamma1 = fetch(*this, theta, "gamma1");
    p.gamma2 = fetch(*this, theta, "gamma2");
    p.Lambda = fetch(*this, theta, "Lambda");
    return p;
}

ThermalSumParams ModelSpec::unpack_thermal(std::span<const double> theta) const {
    thermal_spec();
    require_length(*this, theta);
    ThermalSumParams p;
    p.c0 = thermal_.background.fixed ? thermal_.background.value : fetch(*this, theta, "c0");
    p.c.resize(static_cast<std::size_t>(thermal_.num_gaussians));
    p.sigma.resize(static_cast<std::size_t>(thermal_.num_gaussians));
    for (int n = 1; n <= thermal_.num_gaussians; ++n) {
        p.c[static_cast<std::size_t>(n - 1)] = fetch(*this, theta, "c" + std::to_string(n));
        p.sigma[static_cast<std::size_t>(n - 1)] = fetch(*this, theta, "sigma" + std::to_string(n));
    }
    return p;
}

std::vector<double> ModelSpec::pack_pulsed(const PulsedEmitterParams& p) const {
    pulsed_spec();
    std::vector<double> theta(dim(), 0.0);
    auto put = [&](const std::string& name, double v) {
        const int i = index_of(name);
        if (i >= 0) theta[static_cast<std::size_t>(i)] = v;
    };
    put("c0", p.c0);
    put("c1", p.c1);
    put("c2", p.c2);
    put("gamma1", p.gamma1);
    put("gamma2", p.gamma2);
    put("Lambda", p.Lambda);
    return theta;
}

std::vector<double> ModelSpec::pack_thermal(const ThermalSumParams& p) const {
    const auto& spec = thermal_spec();
    if (p.c.size() != static_cast<std::size_t>(spec.num_gaussians) ||
        p.sigma.size() != static_cast<std::size_t>(spec.num_gaussians))
        throw LayoutError("thermal params do not match num_gaussians");
    std::vector<double> theta(dim(), 0.0);
    auto put = [&](const std::string& name, double v) {
        const int i = index_of(name);
        if (i >= 0) theta[static_cast<std::size_t>(i)] = v;
    };
    put("c0", p.c0);
    for (int n = 1; n <= spec.num_gaussians; ++n) {
        put("c" + std::to_string(n), p.c[static_cast<std::size_t>(n - 1)]);
        put("sigma" + std::to_string(n), p.sigma[static_cast<std::size_t>(n - 1)]);
    }
    return theta;
}

std::vector<double> eval_pulsed(const PulsedEmitterParams& params, const PulsedEmitterSpec& spec,
                                const DelayGrid& grid) {
    validate(params, spec);
    const int N = spec.n_side_pulses;
    if (grid.max_abs_tau() > (N - 0.5) * params.Lambda) {
        std::ostringstream os;
        os << "truncation N=" << N << " covers |tau| <= " << (N - 0.5) * params.Lambda
           << " but the grid reaches " << grid.max_abs_tau();
        throw TruncationError(os.str());
    }

    const double r = std::exp(-params.gamma2 * params.Lambda);
    // geo[k] = 1 + r + ... + r^{k-1}; side-peak runs are geometric in r.
    std::vector<double> geo(static_cast<std::size_t>(N) + 1);
    geo[0] = 0.0;
    double power = 1.0;
    for (int k = 1; k <= N; ++k) {
        geo[static_cast<std::size_t>(k)] = geo[static_cast<std::size_t>(k - 1)] + power;
        power *= r;
    }
    const double far_tail = r * geo[static_cast<std::size_t>(N)];  // sum_{n=1..N} r^n

    std::vector<double> y(grid.size());
    const auto& tau = grid.tau();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double t = std::abs(tau[i]);
        const double slow = std::exp(-params.gamma1 * t);
        const double fast = std::exp(-params.gamma2 * t);
        // Peaks behind the origin relative to t: distances t + n*Lambda.
        double side = fast * far_tail;
        const double q = t / params.Lambda;
        if (q >= N) {
            side += std::exp(-params.gamma2 * (t - N * params.Lambda)) *
                    geo[static_cast<std::size_t>(N)];
        } else {
            // Split the remaining peaks at the nearest period multiple below t:
            // n <= m sit at distance t - n*Lambda, n > m at n*Lambda - t.
            const int m = static_cast<int>(q);
            if (m >= 1)
                side += std::exp(-params.gamma2 * (t - m * params.Lambda)) *
                        geo[static_cast<std::size_t>(m)];
            side += std::exp(-params.gamma2 * ((m + 1) * params.Lambda - t)) *
                    geo[static_cast<std::size_t>(N - m)];
        }
        y[i] = params.c0 + params.c1 * slow * (params.c2 * fast + side);
    }
    return y;
}

std::vector<double> eval_thermal(const ThermalSumParams& params, const ThermalSumSpec& spec,
                                 const DelayGrid& grid) {
    validate(params, spec);
    std::vector<double> y(grid.size());
    const auto& tau = grid.tau();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        double acc = params.c0;
        for (std::size_t n = 0; n < params.c.size(); ++n) {
            const double z = tau[i] / params.sigma[n];
            acc += params.c[n] * std::exp(-0.5 * z * z);
        }
        y[i] = acc;
    }
    return y;
}

std::vector<double> evaluate(const ModelSpec& spec, std::span<const double> theta,
                             const DelayGrid& grid) {
    if (spec.variant() == ModelVariant::PulsedEmitter)
        return eval_pulsed(spec.unpack_pulsed(theta), spec.pulsed_spec(), grid);
    return eval_thermal(spec.unpack_thermal(theta), spec.thermal_spec(), grid);
}

int default_truncation(const DelayGrid& grid, double Lambda_lower_bound) {
    if (!(Lambda_lower_bound > 0) || !std::isfinite(Lambda_lower_bound))
        throw ValidationError("Lambda lower bound must be positive and finite");
    // Smallest N with (N-1)*bound >= max|tau| + bound, i.e. N >= max|tau|/bound + 2.
    const double n = std::ceil(grid.max_abs_tau() / Lambda_lower_bound) + 2.0;
    if (n > 1e6) throw ValidationError("period lower bound implies an unreasonable truncation");
    return static_cast<int>(n);
}

double center_peak_ratio(const PulsedEmitterParams& params, const PulsedEmitterSpec& spec) {
    validate(params, spec);
    const int N = spec.n_side_pulses;
    const double r = std::exp(-params.gamma2 * params.Lambda);
    double at_zero = params.c2;    // (y(0) - c0) / c1
    double at_period = params.c2 * r;
    double power = r;
    for (int n = 1; n <= N; ++n) {
        at_zero += 2.0 * power;
        at_period += std::pow(r, std::abs(1 - n)) + std::pow(r, 1 + n);
        power *= r;
    }
    at_period *= std::exp(-params.gamma1 * params.Lambda);
    return at_zero / at_period;
}

}  // namespace g2fit
