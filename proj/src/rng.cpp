#include "g2fit/rng.hpp"

#include <array>
#include <cmath>
#include <string>

#include "g2fit/errors.hpp"

namespace g2fit {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
    // splitmix64 finalizer over the (seed, k) pair.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (k + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double RandomStream::log_uniform(double lo, double hi) {
    if (!(lo > 0) || !(hi >= lo))
        throw ValidationError("log-uniform range needs 0 < lo <= hi");
    const double u = uniform01();
    return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

std::int64_t RandomStream::poisson(double rate) {
    if (std::isnan(rate) || rate < 0)
        throw ValidationError("Poisson rate must be >= 0, got " + std::to_string(rate));
    if (rate > 1e15) throw ValidationError("Poisson rate too large: " + std::to_string(rate));
    return rate < 30.0 ? poisson_inversion(rate) : poisson_ptrd(rate);
}

std::int64_t RandomStream::poisson_inversion(double rate) {
    // Sequential-search inversion: one uniform per draw.
    const double u = uniform01();
    double p = std::exp(-rate);
    double cdf = p;
    std::int64_t k = 0;
    while (u > cdf && k < 400) {
        ++k;
        p *= rate / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

std::int64_t RandomStream::poisson_ptrd(double rate) {
    // Hormann's PTRD transformed rejection, with the k <= 9 table squeeze.
    static const std::array<double, 10> log_fact = [] {
        std::array<double, 10> t{};
        double f = 1.0;
        t[0] = 0.0;
        for (int k = 1; k <= 9; ++k) {
            f *= k;
            t[static_cast<std::size_t>(k)] = std::log(f);
        }
        return t;
    }();
    const double smu = std::sqrt(rate);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_sqrt_2pi = 0.91893853320467267;

    while (true) {
        double u;
        double v = uniform01();
        if (v <= 0.86 * v_r) {
            u = v / v_r - 0.43;
            const double us = 0.5 - std::abs(u);
            return static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + rate + 0.445));
        }
        if (v >= v_r) {
            u = uniform01() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0 ? -0.5 : 0.5) - u;
            v = uniform01() * v_r;
        }
        const double us = 0.5 - std::abs(u);
        if (us < 0.013 && v > us) continue;
        const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.445);
        v = v * inv_alpha / (a / (us * us) + b);
        if (kf >= 10.0) {
            const double k = kf;
            const double bound = (k + 0.5) * std::log(rate / k) - rate - log_sqrt_2pi + k -
                                 (1.0 / 12.0 - 1.0 / (360.0 * k * k)) / k;
            if (std::log(v * smu) <= bound) return static_cast<std::int64_t>(kf);
        } else if (kf >= 0.0) {
            const int k = static_cast<int>(kf);
            if (std::log(v) <= kf * std::log(rate) - rate - log_fact[static_cast<std::size_t>(k)])
                return k;
        }
    }
}

}  // namespace g2fit
