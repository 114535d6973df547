#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "traffic/lwr.hpp"

namespace traffic {

/// (lanes a, total density rho); per-lane density is rho / a.
struct ResonantState {
    double a = 1.0;
    double rho = 0.0;
    bool operator==(const ResonantState&) const = default;
};

enum class ResonantWaveKind { Shock, Rarefaction, Standing };

struct ResonantWave {
    ResonantWaveKind kind = ResonantWaveKind::Standing;
    ResonantState left, right;
    double speed_lo = 0.0;  ///< shock speed, or fan head
    double speed_hi = 0.0;  ///< shock speed, or fan tail
};

struct ResonantSolution {
    int case_id = 0;                           ///< 1..10
    std::vector<ResonantState> intermediates;  ///< U1[, U2] in left-to-right order
    std::vector<ResonantWave> waves;           ///< non-decreasing speeds
    double boundary_flux = 0.0;
};

/// Lane-scaled flux model f(a, rho) = a f1(rho / a).
struct LaneFlux {
    FundamentalDiagram fd;
    CapacityPoint cp;

    explicit LaneFlux(const FundamentalDiagram& d) : fd(d), cp(capacity_point(d)) {}

    double flux(const ResonantState& u) const { return u.a * f_star(fd, u.rho / u.a); }
    double fmax(double a) const { return a * cp.capacity; }
    double lambda(const ResonantState& u) const { return lambda_star(fd, u.rho / u.a); }
    double demand(const ResonantState& u) const {
        return u.rho / u.a < cp.alpha ? flux(u) : fmax(u.a);
    }
    double supply(const ResonantState& u) const {
        return u.rho / u.a < cp.alpha ? fmax(u.a) : flux(u);
    }

    /// rho on lane count a with f(a, rho) = target on the requested branch.
    double solve_density(double a, double target, bool overcritical) const {
        const double top = fmax(a);
        const double tol = 1e-12 * std::max(1.0, top);
        if (target > top + tol)
            throw RootBracketError("flux " + format_number(target) + " exceeds capacity " + format_number(top) +
                                   " on " + format_number(a) + " lanes");
        if (target < -tol) throw RootBracketError("negative target flux");
        if (target >= top) return a * cp.alpha;
        const double lo = overcritical ? cp.alpha : 0.0;
        const double hi = overcritical ? max_density(fd) : cp.alpha;
        auto g = [&](double r) { return a * f_star(fd, r) - target; };
        return a * solve_bracketed(g, lo, hi);
    }
};

namespace detail {

inline constexpr double kCriticalTol = 1e-12;

inline ResonantWave lane_wave(const LaneFlux& lf, const ResonantState& l, const ResonantState& r) {
    ResonantWave w;
    w.left = l;
    w.right = r;
    if (l.a != r.a) {
        w.kind = ResonantWaveKind::Standing;
        return w;
    }
    if (l.rho < r.rho) {
        w.kind = ResonantWaveKind::Shock;
        const double s = (r.rho - l.rho) > 0 ? (lf.flux(r) - lf.flux(l)) / (r.rho - l.rho) : 0.0;
        w.speed_lo = w.speed_hi = s;
    } else if (l.rho > r.rho) {
        w.kind = ResonantWaveKind::Rarefaction;
        w.speed_lo = lf.lambda(l);
        w.speed_hi = lf.lambda(r);
    } else {
        w.kind = ResonantWaveKind::Shock;
        w.speed_lo = w.speed_hi = lf.lambda(l);
    }
    return w;
}

}  // namespace detail

inline double boundary_flux(const ResonantState& ul, const ResonantState& ur, const LaneFlux& lf) {
    return std::min(lf.demand(ul), lf.supply(ur));
}

inline double boundary_flux(const ResonantState& ul, const ResonantState& ur, const FundamentalDiagram& fd) {
    return boundary_flux(ul, ur, LaneFlux(fd));
}

inline ResonantSolution classify(const ResonantState& ul, const ResonantState& ur, const LaneFlux& lf) {
    if (!(ul.a > 0 && ur.a > 0)) throw DomainError("lane count must be positive");
    const double alpha = lf.cp.alpha;
    const double fl = lf.flux(ul), fr = lf.flux(ur);
    const double cl = ul.rho / ul.a, cr = ur.rho / ur.a;
    const bool left_under = cl <= alpha + detail::kCriticalTol;
    const bool right_under = cr < alpha - detail::kCriticalTol;

    ResonantSolution sol;
    std::vector<ResonantState> chain{ul};
    auto push = [&](const ResonantState& s) {
        chain.push_back(s);
        sol.intermediates.push_back(s);
    };

    if (left_under) {
        const double a_star = fl / lf.cp.capacity;
        if (fr >= fl) {
            sol.case_id = 2;
            sol.boundary_flux = fl;
            push({ur.a, lf.solve_density(ur.a, fl, false)});
        } else if (!right_under) {
            sol.case_id = 3;
            sol.boundary_flux = fr;
            push({ul.a, lf.solve_density(ul.a, fr, true)});
        } else if (ur.a >= a_star) {
            sol.case_id = 1;
            sol.boundary_flux = fl;
            push({ur.a, lf.solve_density(ur.a, fl, false)});
        } else {
            sol.case_id = 4;
            const ResonantState u2{ur.a, ur.a * alpha};
            sol.boundary_flux = lf.fmax(ur.a);
            push({ul.a, lf.solve_density(ul.a, sol.boundary_flux, true)});
            push(u2);
        }
    } else {
        const double fmax_l = lf.fmax(ul.a);
        const ResonantState u_star{ul.a, ul.a * alpha};
        if (fr >= fmax_l) {
            sol.case_id = 6;
            sol.boundary_flux = fmax_l;
            push(u_star);
            push({ur.a, lf.solve_density(ur.a, fmax_l, false)});
        } else if (right_under && ur.a >= ul.a) {
            sol.case_id = 5;
            sol.boundary_flux = fmax_l;
            push(u_star);
            push({ur.a, lf.solve_density(ur.a, fmax_l, false)});
        } else if (!right_under) {
            sol.case_id = fl <= fr ? 7 : 8;
            sol.boundary_flux = fr;
            push({ul.a, lf.solve_density(ul.a, fr, true)});
        } else {
            // The standing wave lands on the critical line of the right lanes; the left wave
            // is a fan when that capacity is at least f(U_L) and a shock otherwise.
            const double fmax_r = lf.fmax(ur.a);
            sol.case_id = fmax_r >= fl ? 9 : 10;
            sol.boundary_flux = fmax_r;
            push({ul.a, lf.solve_density(ul.a, fmax_r, true)});
            push({ur.a, ur.a * alpha});
        }
    }
    chain.push_back(ur);
    // root-solved intermediates can miss an end state by rounding; drop those empty waves
    auto same = [](const ResonantState& x, const ResonantState& y) {
        return x.a == y.a && std::abs(x.rho - y.rho) <= 1e-12 * std::max(1.0, std::abs(y.rho));
    };
    for (std::size_t i = chain.size() - 2; i >= 1; --i) {
        if (same(chain[i], chain[i + 1])) chain[i] = chain[i + 1];
        if (same(chain[i], chain[i - 1])) chain[i] = chain[i - 1];
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto w = detail::lane_wave(lf, chain[i], chain[i + 1]);
        if (w.kind == ResonantWaveKind::Standing || w.left.rho != w.right.rho) sol.waves.push_back(w);
    }
    return sol;
}

inline ResonantSolution classify(const ResonantState& ul, const ResonantState& ur, const FundamentalDiagram& fd) {
    return classify(ul, ur, LaneFlux(fd));
}

}  // namespace traffic
