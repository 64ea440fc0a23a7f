#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "g2fit/errors.hpp"
#include "g2fit/optim.hpp"

namespace g2fit {

namespace {

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

bool all_finite(const std::vector<double>& r) {
    for (double v : r)
        if (!std::isfinite(v)) return false;
    return true;
}

// Gaussian elimination with partial pivoting; false on a (near-)singular pivot.
bool solve_inplace(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(A[col * n + col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double mag = std::abs(A[row * n + col]);
            if (mag > best) {
                best = mag;
                pivot = row;
            }
        }
        if (!(best > 1e-30)) return false;
        if (pivot != col) {
            for (std::size_t k = col; k < n; ++k) std::swap(A[pivot * n + k], A[col * n + k]);
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / A[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = A[row * n + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) A[row * n + k] -= factor * A[col * n + k];
            b[row] -= factor * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        double acc = b[col];
        for (std::size_t k = col + 1; k < n; ++k) acc -= A[col * n + k] * b[k];
        b[col] = acc / A[col * n + col];
    }
    return true;
}

}  // namespace

LMResult levenberg_marquardt(const ResidualFn& residual_fn, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const OptimizerSettings& settings) {
    validate(settings);
    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("empty start point");
    if (lower.size() != n || upper.size() != n)
        throw ValidationError("bounds do not match the start point dimension");

    auto clamp = [&](std::vector<double> v) {
        for (std::size_t j = 0; j < n; ++j) v[j] = std::min(std::max(v[j], lower[j]), upper[j]);
        return v;
    };

    std::vector<double> x = clamp({x0.begin(), x0.end()});
    std::vector<double> r = residual_fn(x);
    if (!all_finite(r)) throw ValidationError("residuals are not finite at the start point");
    const std::size_t m = r.size();
    double S = sum_sq(r);

    LMResult result;
    result.x = x;
    result.sum_sq = S;
    if (S == 0.0) {
        result.converged = true;
        return result;
    }

    double mu = 1e-4;
    bool converged = false;
    int iter = 0;
    std::vector<double> J(m * n);
    std::vector<double> rj;

    while (iter < settings.max_iters && !converged) {
        ++iter;
        // Forward-difference Jacobian, stepping away from the nearer wall.
        std::vector<double> xs = x;
        for (std::size_t j = 0; j < n; ++j) {
            double h = 1e-6 * (1.0 + std::abs(x[j]));
            if (x[j] + h > upper[j]) h = -h;
            xs[j] = x[j] + h;
            rj = residual_fn(xs);
            xs[j] = x[j];
            if (rj.size() != m) throw ValidationError("residual length changed between calls");
            const double inv_h = 1.0 / h;
            for (std::size_t i = 0; i < m; ++i) J[i * n + j] = (rj[i] - r[i]) * inv_h;
        }
        // Normal equations.
        std::vector<double> A(n * n, 0.0), g(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double Jij = J[i * n + j];
                g[j] += Jij * r[i];
                for (std::size_t k = j; k < n; ++k) A[j * n + k] += Jij * J[i * n + k];
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < j; ++k) A[j * n + k] = A[k * n + j];
        double trace = 0.0;
        for (std::size_t j = 0; j < n; ++j) trace += A[j * n + j];
        const double ridge = trace > 0 ? trace / static_cast<double>(n) : 1.0;

        bool accepted = false;
        while (!accepted) {
            std::vector<double> Ad = A, rhs(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double d = A[j * n + j];
                Ad[j * n + j] = d + mu * (d > 0 ? d : ridge);
                rhs[j] = -g[j];
            }
            bool solved = solve_inplace(Ad, rhs, n);
            std::vector<double> x_new;
            double S_new = 0.0;
            std::vector<double> r_new;
            if (solved) {
                x_new = x;
                for (std::size_t j = 0; j < n; ++j) x_new[j] += rhs[j];
                x_new = clamp(std::move(x_new));
                r_new = residual_fn(x_new);
                S_new = all_finite(r_new) ? sum_sq(r_new) : std::numeric_limits<double>::infinity();
            }
            if (solved && S_new < S) {
                accepted = true;
                bool small_step = true;
                for (std::size_t j = 0; j < n; ++j)
                    small_step = small_step &&
                                 std::abs(x_new[j] - x[j]) <= settings.xtol * (1.0 + std::abs(x[j]));
                const double improvement = S - S_new;
                x = std::move(x_new);
                r = std::move(r_new);
                S = S_new;
                mu = std::max(mu / 10.0, 1e-12);
                if (S == 0.0 || small_step || improvement <= settings.ftol * S) converged = true;
            } else {
                mu *= 10.0;  // damping escalation, also the singular-matrix path
                if (mu > 1e12) break;
            }
        }
        if (!accepted) break;
    }

    result.x = x;
    result.sum_sq = S;
    result.iterations = iter;
    result.converged = converged;
    return result;
}

}  // namespace g2fit
