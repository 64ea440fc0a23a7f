#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "g2fit/errors.hpp"
#include "g2fit/optim.hpp"

namespace g2fit {

namespace {

constexpr double kTiny = 1e-25;
constexpr double kPenaltyFactor = 1e6;

struct Box {
    std::span<const double> lower;
    std::span<const double> upper;
    std::vector<double> scale;  // penalty normalization per dimension

    std::vector<double> clamp(std::span<const double> x) const {
        std::vector<double> out(x.begin(), x.end());
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = std::min(std::max(out[j], lower[j]), upper[j]);
        return out;
    }
};

// Penalized objective: evaluate at the clamped point, add the squared
// normalized violation so line searches feel a smooth wall.
class PenalizedFn {
  public:
    PenalizedFn(const VectorFn& f, const Box& box, double weight)
        : f_(f), box_(box), weight_(weight) {}

    double operator()(std::span<const double> x) {
        double penalty = 0.0;
        std::vector<double> xc(x.begin(), x.end());
        for (std::size_t j = 0; j < xc.size(); ++j) {
            double d = 0.0;
            if (xc[j] < box_.lower[j]) {
                d = (box_.lower[j] - xc[j]) / box_.scale[j];
                xc[j] = box_.lower[j];
            } else if (xc[j] > box_.upper[j]) {
                d = (xc[j] - box_.upper[j]) / box_.scale[j];
                xc[j] = box_.upper[j];
            }
            penalty += d * d;
        }
        ++evals_;
        return f_(xc) + weight_ * penalty;
    }

    int evals() const { return evals_; }

  private:
    const VectorFn& f_;
    const Box& box_;
    double weight_;
    int evals_ = 0;
};

// Minimizes along p + t * dir; moves p, rescales dir by the step, updates fret.
void line_minimize(PenalizedFn& f, std::vector<double>& p, std::vector<double>& dir, double& fret,
                   const OptimizerSettings& settings) {
    std::vector<double> trial(p.size());
    auto g = [&](double t) {
        for (std::size_t j = 0; j < p.size(); ++j) trial[j] = p[j] + t * dir[j];
        return f(trial);
    };
    double a = 0.0, b = 1.0, c = 0.0;
    double fa = 0.0, fb = 0.0, fc = 0.0;
    int used = 0;
    double t_best, f_best;
    if (bracket_minimum(g, a, b, c, fa, fb, fc, settings.max_line_evals, used)) {
        const int budget = std::max(1, settings.max_line_evals - used);
        const LineResult r = brent_core(g, a, b, c, fb, settings.xtol, budget);
        t_best = r.x;
        f_best = r.f;
    } else {
        t_best = a;
        f_best = fa;
        if (fb < f_best) { t_best = b; f_best = fb; }
        if (fc < f_best) { t_best = c; f_best = fc; }
    }
    double s = t_best;
    if (std::abs(s) < 1e-8) s = s < 0 ? -1e-8 : 1e-8;  // keep the direction alive
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] += t_best * dir[j];
        dir[j] *= s;
    }
    fret = f_best;
}

}  // namespace

PowellResult powell_minimize(const VectorFn& f, std::span<const double> x0,
                             std::span<const double> lower, std::span<const double> upper,
                             const OptimizerSettings& settings) {
    validate(settings);
    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("empty start point");
    if (lower.size() != n || upper.size() != n)
        throw ValidationError("bounds do not match the start point dimension");
    for (std::size_t j = 0; j < n; ++j)
        if (!(lower[j] <= upper[j])) throw ValidationError("bounds need lower <= upper");

    Box box{lower, upper, {}};
    box.scale.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = upper[j] - lower[j];
        box.scale[j] = std::isfinite(w) && w > 0 ? w : std::max(1.0, std::abs(x0[j]));
    }

    std::vector<double> start = box.clamp(x0);
    const double f0 = f(start);
    if (!std::isfinite(f0)) throw ValidationError("objective is not finite at the start point");
    const double weight = kPenaltyFactor * std::max(1.0, std::abs(f0));
    PenalizedFn wrapped(f, box, weight);

    // Coordinate direction set scaled to a tenth of each box width.
    std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        const double w = upper[j] - lower[j];
        dirs[j][j] = 0.1 * (std::isfinite(w) && w > 0 ? w : std::max(1.0, std::abs(start[j])));
    }

    std::vector<double> p = start;
    std::vector<double> pt = p;
    double fret = f0;
    PowellResult result;
    result.converged = false;

    for (int iter = 1; iter <= settings.max_iters; ++iter) {
        result.iterations = iter;
        const double fp = fret;
        std::size_t ibig = 0;
        double del = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double fptt = fret;
            line_minimize(wrapped, p, dirs[j], fret, settings);
            if (fptt - fret > del) {
                del = fptt - fret;
                ibig = j;
            }
        }
        if (2.0 * (fp - fret) <= settings.ftol * (std::abs(fp) + std::abs(fret)) + kTiny) {
            result.converged = true;
            break;
        }
        // Powell's direction replacement: try the average displacement.
        std::vector<double> ptt(n), xit(n);
        for (std::size_t j = 0; j < n; ++j) {
            ptt[j] = 2.0 * p[j] - pt[j];
            xit[j] = p[j] - pt[j];
            pt[j] = p[j];
        }
        const double fptt = wrapped(ptt);
        if (fptt < fp) {
            const double d1 = fp - fret - del;
            const double d2 = fp - fptt;
            const double t = 2.0 * (fp - 2.0 * fret + fptt) * d1 * d1 - del * d2 * d2;
            if (t < 0.0) {
                line_minimize(wrapped, p, xit, fret, settings);
                dirs[ibig] = dirs[n - 1];
                dirs[n - 1] = xit;
            }
        }
    }

    result.x = box.clamp(p);
    bool moved = false;
    for (std::size_t j = 0; j < n; ++j) moved = moved || result.x[j] != p[j];
    result.f = moved ? f(result.x) : fret;
    result.evals = wrapped.evals() + 1 + (moved ? 1 : 0);
    return result;
}

}  // namespace g2fit
