#pragma once

#include <functional>
#include <span>
#include <vector>

namespace g2fit {

struct OptimizerSettings {
    double xtol = 1e-6;       // relative parameter tolerance
    double ftol = 1e-8;       // relative objective tolerance
    int max_iters = 200;      // outer Powell / LM iterations
    int max_line_evals = 100; // evaluation budget per line search
};

void validate(const OptimizerSettings& s);

// Everything below minimizes; multi-start negates the maximized public
// objectives once at that boundary.

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;
using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;

struct LineResult {
    double x = 0;
    double f = 0;
    int evals = 0;
    bool converged = false;
};

/// Brent parabolic-interpolation line minimization on a bracketing triple:
/// b strictly between a and c with f(b) < f(a) and f(b) < f(c).
LineResult brent_line_min(const ScalarFn& f, double a, double b, double c,
                          const OptimizerSettings& settings);

// Core loop with the bracket already validated and f(b) known.
LineResult brent_core(const ScalarFn& f, double a, double b, double c, double fb, double xtol,
                      int max_evals);

/// Downhill bracket search from two starting abscissae. Returns false if the
/// evaluation budget runs out before a bracket is found.
bool bracket_minimum(const ScalarFn& f, double& a, double& b, double& c, double& fa, double& fb,
                     double& fc, int max_evals, int& evals_used);

struct PowellResult {
    std::vector<double> x;
    double f = 0;
    int iterations = 0;
    int evals = 0;
    bool converged = false;
};

/// Powell's conjugate-direction minimization with box bounds handled by
/// clamp-and-penalize (quadratic penalty on the violation, weight
/// 1e6 * the objective scale at the start point); the returned x is feasible.
PowellResult powell_minimize(const VectorFn& f, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const OptimizerSettings& settings);

struct LMResult {
    std::vector<double> x;
    double sum_sq = 0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt on sum of squared residuals, forward-difference
/// Jacobian with step 1e-6 * (1 + |x_j|), Marquardt diagonal damping
/// (x10 on reject, /10 on accept). Steps are projected onto the box.
LMResult levenberg_marquardt(const ResidualFn& residual_fn, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const OptimizerSettings& settings);

}  // namespace g2fit
