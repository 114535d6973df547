#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "traffic/diagrams.hpp"

namespace traffic {

enum class SecondOrderKind { Zhang, Pw };

/// Rarefaction curves for PW: the velocity-potential form v - v*(rho) = const, or the
/// exact integral curves v +- c0 ln(rho) = const of the isothermal system.
enum class PwCurves { Paper, Isothermal };

#ifdef TRAFFIC_PW_ISOTHERMAL_DEFAULT
inline constexpr PwCurves kDefaultPwCurves = PwCurves::Isothermal;
#else
inline constexpr PwCurves kDefaultPwCurves = PwCurves::Paper;
#endif

struct SecondOrderModel {
    SecondOrderKind kind = SecondOrderKind::Zhang;
    FundamentalDiagram fd;
    double tau = 1.0;
    double c0 = 0.0;
    PwCurves curves = kDefaultPwCurves;

    bool operator==(const SecondOrderModel&) const = default;

    WaveModel wave_model() const {
        return kind == SecondOrderKind::Pw ? WaveModel{WaveModelKind::Pw, c0} : WaveModel{WaveModelKind::Zhang, 0.0};
    }
};

/// Primitive state (rho, v).
struct State2 {
    double rho = 0.0;
    double v = 0.0;
    double m() const { return rho * v; }
    bool operator==(const State2&) const = default;
};

enum class WavePattern { Constant, H1, H2, R1, R2, R1R2, R1H2, H1H2, H1R2 };

inline const char* to_string(WavePattern p) {
    switch (p) {
        case WavePattern::Constant: return "Constant";
        case WavePattern::H1: return "H1";
        case WavePattern::H2: return "H2";
        case WavePattern::R1: return "R1";
        case WavePattern::R2: return "R2";
        case WavePattern::R1R2: return "R1R2";
        case WavePattern::R1H2: return "R1H2";
        case WavePattern::H1H2: return "H1H2";
        case WavePattern::H1R2: return "H1R2";
    }
    return "?";
}

struct WavePattern2 {
    WavePattern pattern = WavePattern::Constant;
    std::optional<State2> intermediate;  ///< U_m for two-wave patterns
    State2 boundary_avg;                 ///< state at x/t = 0
};

inline double velocity_flux(const SecondOrderModel& m, double rho) {
    return velocity_flux_phi(m.fd, rho, m.wave_model());
}

inline double lambda1(const SecondOrderModel& m, const State2& u) {
    return m.kind == SecondOrderKind::Pw ? u.v - m.c0 : u.v + u.rho * dv_star(m.fd, u.rho);
}

inline double lambda2(const SecondOrderModel& m, const State2& u) {
    return m.kind == SecondOrderKind::Pw ? u.v + m.c0 : u.v - u.rho * dv_star(m.fd, u.rho);
}

/// Velocity jump v_to - v_from across a shock joining densities rho_from -> rho_to.
inline double hugoniot_velocity_jump(const SecondOrderModel& m, double rho_from, double rho_to) {
    if (m.kind == SecondOrderKind::Pw && m.curves == PwCurves::Isothermal) {
        if (!(rho_from > 0.0 && rho_to > 0.0)) throw VacuumError("isothermal shock at zero density");
        return -m.c0 * std::abs(rho_from - rho_to) / std::sqrt(rho_from * rho_to);
    }
    const double dphi = velocity_flux(m, rho_from) - velocity_flux(m, rho_to);
    const double denom = m.kind == SecondOrderKind::Pw ? rho_from * rho_to : rho_from + rho_to;
    const double rad = 2.0 * (rho_from - rho_to) * dphi / denom;
    if (rad < 0.0) {
        if (rad > -1e-14) return 0.0;
        throw NegativeRadicandError("Hugoniot radicand " + format_number(rad));
    }
    return -std::sqrt(rad);
}

/// Function g with v - g(rho) constant along 1-rarefactions and v + g(rho) constant along 2-rarefactions.
inline double rarefaction_potential(const SecondOrderModel& m, double rho) {
    if (m.kind == SecondOrderKind::Pw && m.curves == PwCurves::Isothermal) {
        if (!(rho > 0.0)) throw VacuumError("isothermal curve at zero density");
        return -m.c0 * std::log(rho);
    }
    return v_star(m.fd, rho);
}

inline double rarefaction_potential_slope(const SecondOrderModel& m, double rho) {
    if (m.kind == SecondOrderKind::Pw && m.curves == PwCurves::Isothermal) return -m.c0 / rho;
    return dv_star(m.fd, rho);
}

/// v_to - v_from along a rarefaction of the given family.
inline double rarefaction_velocity_jump(const SecondOrderModel& m, double rho_from, double rho_to, int family) {
    const double d = rarefaction_potential(m, rho_to) - rarefaction_potential(m, rho_from);
    return family == 1 ? d : -d;
}

namespace detail {

// Velocity on the 1-wave curve through ul at density rho.
inline double curve1(const SecondOrderModel& m, const State2& ul, double rho) {
    if (rho > ul.rho) return ul.v + hugoniot_velocity_jump(m, ul.rho, rho);
    return ul.v + rarefaction_velocity_jump(m, ul.rho, rho, 1);
}

// Velocity jump of the 2-wave from density rho to rho_r.
inline double jump2(const SecondOrderModel& m, double rho, double rho_r) {
    if (rho_r < rho) return hugoniot_velocity_jump(m, rho, rho_r);
    return rarefaction_velocity_jump(m, rho, rho_r, 2);
}

inline constexpr double kCurveTol = 1e-9;

}  // namespace detail

/// Wave pattern and intermediate state. Single-wave patterns report the far state as intermediate.
inline WavePattern2 solve_intermediate(const SecondOrderModel& m, const State2& ul, const State2& ur) {
    if (!(ul.rho > 0.0) || !(ur.rho > 0.0)) throw VacuumError("non-positive density in Riemann data");
    WavePattern2 out;
    if (std::abs(ul.rho - ur.rho) < 1e-14 && std::abs(ul.v - ur.v) < 1e-14) {
        out.pattern = WavePattern::Constant;
        out.intermediate = ul;
        return out;
    }
    auto g = [&](double rho) { return detail::curve1(m, ul, rho) + detail::jump2(m, rho, ur.rho) - ur.v; };
    const double g_r = detail::curve1(m, ul, ur.rho) - ur.v;
    if (std::abs(g_r) < detail::kCurveTol) {
        out.pattern = ur.rho > ul.rho ? WavePattern::H1 : WavePattern::R1;
        out.intermediate = ur;
        return out;
    }
    const double g_l = ul.v + detail::jump2(m, ul.rho, ur.rho) - ur.v;
    if (std::abs(g_l) < detail::kCurveTol) {
        out.pattern = ur.rho < ul.rho ? WavePattern::H2 : WavePattern::R2;
        out.intermediate = ul;
        return out;
    }
    const double lo_rho = std::min(ul.rho, ur.rho), hi_rho = std::max(ul.rho, ur.rho);
    const double g_lo = ul.rho < ur.rho ? g_l : g_r;
    const double g_hi = ul.rho < ur.rho ? g_r : g_l;
    double rho_m;
    if (g_lo <= 0.0) {
        out.pattern = WavePattern::R1R2;
        const double floor = max_density(m.fd) * 1e-12;
        const double g_floor = g(floor);
        if (g_floor <= 0.0) throw VacuumError("Riemann problem requires a vacuum intermediate state");
        rho_m = solve_expanding(g, lo_rho, g_lo, floor, g_floor);
    } else if (g_hi >= 0.0) {
        out.pattern = WavePattern::H1H2;
        const double top = max_density(m.fd);
        const double g_top = g(top);
        if (g_top > 0.0) throw DomainError("intermediate density exceeds the jam density");
        rho_m = solve_expanding(g, hi_rho, g_hi, top, g_top);
    } else {
        out.pattern = ur.rho < ul.rho ? WavePattern::R1H2 : WavePattern::H1R2;
        rho_m = solve_bracketed(g, lo_rho, hi_rho, g_lo, g_hi);
    }
    out.intermediate = State2{rho_m, detail::curve1(m, ul, rho_m)};
    return out;
}

namespace detail {

// x/t = 0 inside a 1-fan leaving ul: lambda1 vanishes on the 1-curve.
inline State2 sonic_state(const SecondOrderModel& m, const State2& ul, double rho_other) {
    auto h = [&](double rho) { return lambda1(m, State2{rho, curve1(m, ul, rho)}); };
    const double rho = solve_bracketed(h, rho_other, ul.rho);
    return {rho, curve1(m, ul, rho)};
}

inline double shock_speed(const State2& a, const State2& b) {
    return (b.m() - a.m()) / (b.rho - a.rho);
}

inline State2 midpoint(const State2& a, const State2& b) {
    return {0.5 * (a.rho + b.rho), 0.5 * (a.v + b.v)};
}

// Upwind choice across a 2-wave joining um to ur.
inline State2 across_wave2(const SecondOrderModel& m, const State2& um, const State2& ur, bool shock) {
    if (shock) {
        const double s = shock_speed(um, ur);
        return s >= 0.0 ? um : ur;
    }
    return lambda2(m, um) >= 0.0 ? um : ur;
}

// Upwind choice across a 1-fan from ul to um, followed by the 2-wave to ur.
inline State2 across_fan1(const SecondOrderModel& m, const State2& ul, const State2& um, const State2& ur,
                          bool shock2) {
    if (lambda1(m, ul) > 0.0) return ul;
    if (lambda1(m, um) < 0.0) return across_wave2(m, um, ur, shock2);
    return sonic_state(m, ul, um.rho);
}

// Upwind choice across a 1-shock from ul to um.
inline State2 across_shock1(const SecondOrderModel& m, const State2& ul, const State2& um, const State2& ur,
                            bool shock2) {
    const double s = shock_speed(ul, um);
    if (s > 0.0) return ul;
    if (s == 0.0) return midpoint(ul, um);
    return across_wave2(m, um, ur, shock2);
}

}  // namespace detail

inline WavePattern2 solve_riemann2(const SecondOrderModel& m, const State2& ul, const State2& ur) {
    WavePattern2 w = solve_intermediate(m, ul, ur);
    const State2 um = *w.intermediate;
    switch (w.pattern) {
        case WavePattern::Constant: w.boundary_avg = ul; break;
        case WavePattern::H1: {
            const double s = detail::shock_speed(ul, ur);
            w.boundary_avg = s > 0.0 ? ul : s < 0.0 ? ur : detail::midpoint(ul, ur);
            break;
        }
        case WavePattern::R1: w.boundary_avg = detail::across_fan1(m, ul, ur, ur, false); break;
        case WavePattern::H2: w.boundary_avg = detail::across_wave2(m, ul, ur, true); break;
        case WavePattern::R2: w.boundary_avg = detail::across_wave2(m, ul, ur, false); break;
        case WavePattern::R1R2: w.boundary_avg = detail::across_fan1(m, ul, um, ur, false); break;
        case WavePattern::R1H2: w.boundary_avg = detail::across_fan1(m, ul, um, ur, true); break;
        case WavePattern::H1H2: w.boundary_avg = detail::across_shock1(m, ul, um, ur, true); break;
        case WavePattern::H1R2: w.boundary_avg = detail::across_shock1(m, ul, um, ur, false); break;
    }
    return w;
}

inline State2 boundary_average(const SecondOrderModel& m, const State2& ul, const State2& ur) {
    return solve_riemann2(m, ul, ur).boundary_avg;
}

/// PW boundary value averaged over [0, dt] when the sonic point of a 1-fan sits on the edge:
/// the zero-speed characteristic drifts under the relaxation source.
inline State2 pw_cauchy_boundary_average(const SecondOrderModel& m, const State2& ul, const State2& ur, double dt) {
    const WavePattern2 w = solve_riemann2(m, ul, ur);
    const bool fan1 = w.pattern == WavePattern::R1 || w.pattern == WavePattern::R1R2 || w.pattern == WavePattern::R1H2;
    if (m.kind != SecondOrderKind::Pw || !fan1) return w.boundary_avg;
    const State2 um = *w.intermediate;
    if (lambda1(m, ul) > 0.0 || lambda1(m, um) < 0.0) return w.boundary_avg;
    const State2 s0 = w.boundary_avg;
    const double b = (f_star(m.fd, s0.rho) - s0.m()) / (2.0 * m.tau * s0.rho);
    const double dv = -b * 0.5 * dt;
    return {s0.rho + dv / rarefaction_potential_slope(m, s0.rho), m.c0 + dv};
}

}  // namespace traffic
