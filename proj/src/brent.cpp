#include <algorithm>
#include <cmath>

#include "g2fit/errors.hpp"
#include "g2fit/optim.hpp"

namespace g2fit {

void validate(const OptimizerSettings& s) {
    if (!(s.xtol > 0) || !(s.ftol > 0) || s.max_iters < 1 || s.max_line_evals < 1)
        throw ValidationError("optimizer settings must be positive with max_iters >= 1");
}

namespace {
constexpr double kGolden = 0.3819660;  // squared inverse golden ratio
constexpr double kZeps = 1e-10;        // absolute tolerance floor
constexpr double kGold = 1.618034;     // bracket expansion ratio
constexpr double kGrowLimit = 100.0;   // cap on parabolic bracket extrapolation
constexpr double kTiny = 1e-20;
}  // namespace

LineResult brent_core(const ScalarFn& f, double ax, double bx, double cx, double fbx, double xtol,
                      int max_evals) {
    double a = std::min(ax, cx);
    double b = std::max(ax, cx);
    double x = bx, w = bx, v = bx;
    double fx = fbx, fw = fbx, fv = fbx;
    double d = 0.0, e = 0.0;
    int evals = 0;

    while (true) {
        const double xm = 0.5 * (a + b);
        const double tol1 = xtol * std::abs(x) + kZeps;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) return {x, fx, evals, true};
        if (evals >= max_evals) return {x, fx, evals, false};

        bool parabolic = false;
        if (std::abs(e) > tol1) {
            // Parabola through (x, fx), (w, fw), (v, fv).
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double etemp = e;
            e = d;
            if (std::isfinite(p) && std::isfinite(q) &&
                std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
                parabolic = true;
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = kGolden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
        const double fu = f(u);
        ++evals;
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u;
                fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
}

LineResult brent_line_min(const ScalarFn& f, double a, double b, double c,
                          const OptimizerSettings& settings) {
    validate(settings);
    const double lo = std::min(a, c), hi = std::max(a, c);
    if (!(b > lo) || !(b < hi))
        throw BracketingError("bracket midpoint must lie strictly between the endpoints");
    const double fa = f(a), fb = f(b), fc = f(c);
    if (!(fb < fa) || !(fb < fc))
        throw BracketingError("bracket requires f(b) < f(a) and f(b) < f(c)");
    LineResult r = brent_core(f, a, b, c, fb, settings.xtol, settings.max_line_evals);
    r.evals += 3;
    return r;
}

bool bracket_minimum(const ScalarFn& f, double& ax, double& bx, double& cx, double& fa, double& fb,
                     double& fc, int max_evals, int& evals_used) {
    fa = f(ax);
    fb = f(bx);
    evals_used = 2;
    if (fb > fa) {
        std::swap(ax, bx);
        std::swap(fa, fb);
    }
    cx = bx + kGold * (bx - ax);
    fc = f(cx);
    ++evals_used;
    while (fb > fc) {
        if (evals_used >= max_evals) return false;
        // Parabolic extrapolation from a, b, c; fall back to golden growth.
        const double r = (bx - ax) * (fb - fc);
        const double q = (bx - cx) * (fb - fa);
        const double denom = 2.0 * std::copysign(std::max(std::abs(q - r), kTiny), q - r);
        double u = bx - ((bx - cx) * q - (bx - ax) * r) / denom;
        const double ulim = bx + kGrowLimit * (cx - bx);
        double fu;
        if ((bx - u) * (u - cx) > 0.0) {
            fu = f(u);
            ++evals_used;
            if (fu < fc) {
                ax = bx; bx = u;
                fa = fb; fb = fu;
                return true;
            }
            if (fu > fb) {
                cx = u;
                fc = fu;
                return true;
            }
            u = cx + kGold * (cx - bx);
            fu = f(u);
            ++evals_used;
        } else if ((cx - u) * (u - ulim) > 0.0) {
            fu = f(u);
            ++evals_used;
            if (fu < fc) {
                const double step = u - cx;
                bx = cx; cx = u; u = u + kGold * step;
                fb = fc; fc = fu; fu = f(u);
                ++evals_used;
            }
        } else if ((u - ulim) * (ulim - cx) >= 0.0) {
            u = ulim;
            fu = f(u);
            ++evals_used;
        } else {
            u = cx + kGold * (cx - bx);
            fu = f(u);
            ++evals_used;
        }
        ax = bx; bx = cx; cx = u;
        fa = fb; fb = fc; fc = fu;
    }
    return true;
}

}  // namespace g2fit
