#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "traffic/errors.hpp"

namespace traffic {

struct RootOptions {
    double f_tol = 0.0;       // stop once |f| <= f_tol
    double x_tol = 4.0e-16;   // relative bracket width
    int max_iter = 200;
};

// Bracketed root: regula falsi with the Illinois fix, bisection fallback.
template <class F>
double solve_bracketed(F&& f, double a, double b, double fa, double fb,
                       const RootOptions& opt = {}) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0) == (fb > 0))
        throw RootBracketError("no sign change on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "]");
    int side = 0;
    double width = std::abs(b - a);
    for (int it = 0; it < opt.max_iter; ++it) {
        double c = (a * fb - b * fa) / (fb - fa);
        const double lo = std::min(a, b), hi = std::max(a, b);
        if (!(c > lo && c < hi) || it % 4 == 3) c = 0.5 * (a + b);
        const double fc = f(c);
        if (fc == 0.0 || std::abs(fc) <= opt.f_tol) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == +1) fb *= 0.5;
            side = +1;
        }
        const double w = std::abs(b - a);
        if (w <= opt.x_tol * std::max(1.0, std::abs(c)) || w == width) break;
        width = w;
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

template <class F>
double solve_bracketed(F&& f, double a, double b, const RootOptions& opt = {}) {
    const double fa = f(a), fb = f(b);
    return solve_bracketed(f, a, b, fa, fb, opt);
}

// Expand from `start` towards `limit` by factor 1.6 on the distance until f changes sign.
template <class F>
double solve_expanding(F&& f, double start, double f_start, double limit, double f_limit,
                       const RootOptions& opt = {}) {
    if (f_start == 0.0) return start;
    double step = (limit - start) * 1.0e-3;
    double prev = start, f_prev = f_start;
    while (true) {
        double next = prev + step;
        if ((step > 0 && next >= limit) || (step < 0 && next <= limit)) {
            return solve_bracketed(f, prev, limit, f_prev, f_limit, opt);
        }
        const double fn = f(next);
        if ((fn > 0) != (f_prev > 0) || fn == 0.0) return solve_bracketed(f, prev, next, f_prev, fn, opt);
        prev = next;
        f_prev = fn;
        step *= 1.6;
    }
}

inline double cfl_number(double speed, double dt, double dx) { return speed * dt / dx; }

inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace traffic
