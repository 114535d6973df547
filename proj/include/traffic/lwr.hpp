#pragma once

#include <algorithm>
#include <cmath>

#include "traffic/diagrams.hpp"

namespace traffic {

enum class ScalarWaveKind { Constant, Shock, Rarefaction };

struct ScalarRiemann {
    double rho_l = 0.0;
    double rho_r = 0.0;
    FundamentalDiagram fd;
};

struct ScalarWaveSolution {
    ScalarWaveKind kind = ScalarWaveKind::Constant;
    double rho_l = 0.0, rho_r = 0.0;
    double shock_speed = 0.0;
    double lambda_l = 0.0, lambda_r = 0.0;
    double boundary_state = 0.0;  ///< rho at x/t = 0
    double boundary_flux = 0.0;
    FundamentalDiagram fd;
};

inline constexpr double kConstantJump = 1e-14;

inline ScalarWaveSolution solve_riemann(const ScalarRiemann& p) {
    ScalarWaveSolution s;
    s.fd = p.fd;
    s.rho_l = p.rho_l;
    s.rho_r = p.rho_r;
    const double fl = f_star(p.fd, p.rho_l), fr = f_star(p.fd, p.rho_r);
    s.lambda_l = lambda_star(p.fd, p.rho_l);
    s.lambda_r = lambda_star(p.fd, p.rho_r);
    if (std::abs(p.rho_l - p.rho_r) < kConstantJump) {
        s.kind = ScalarWaveKind::Constant;
        s.boundary_state = p.rho_l;
    } else if (p.rho_l < p.rho_r) {
        s.kind = ScalarWaveKind::Shock;
        s.shock_speed = (fr - fl) / (p.rho_r - p.rho_l);
        s.boundary_state = s.shock_speed > 0.0 ? p.rho_l : p.rho_r;
    } else {
        s.kind = ScalarWaveKind::Rarefaction;
        if (s.lambda_l >= 0.0) {
            s.boundary_state = p.rho_l;
        } else if (s.lambda_r <= 0.0) {
            s.boundary_state = p.rho_r;
        } else {
            s.boundary_state = solve_bracketed([&](double r) { return lambda_star(p.fd, r); }, p.rho_r,
                                               p.rho_l, s.lambda_r, s.lambda_l);
        }
    }
    s.boundary_flux = s.boundary_state == p.rho_l   ? fl
                      : s.boundary_state == p.rho_r ? fr
                                                    : f_star(p.fd, s.boundary_state);
    return s;
}

/// Self-similar solution rho(x/t).
inline double sample_solution(const ScalarWaveSolution& s, double xi) {
    switch (s.kind) {
        case ScalarWaveKind::Constant: return s.rho_l;
        case ScalarWaveKind::Shock: return xi < s.shock_speed ? s.rho_l : s.rho_r;
        case ScalarWaveKind::Rarefaction:
            if (xi <= s.lambda_l) return s.rho_l;
            if (xi >= s.lambda_r) return s.rho_r;
            return solve_bracketed([&](double r) { return lambda_star(s.fd, r) - xi; }, s.rho_r, s.rho_l,
                                   s.lambda_r - xi, s.lambda_l - xi);
    }
    return s.rho_l;
}

inline double demand(const FundamentalDiagram& fd, const CapacityPoint& cp, double rho) {
    return rho < cp.alpha ? f_star(fd, rho) : cp.capacity;
}

inline double supply(const FundamentalDiagram& fd, const CapacityPoint& cp, double rho) {
    return rho < cp.alpha ? cp.capacity : f_star(fd, rho);
}

inline double demand_supply_flux(double rho_l, double rho_r, const FundamentalDiagram& fd,
                                 const CapacityPoint& cp) {
    return std::min(demand(fd, cp, rho_l), supply(fd, cp, rho_r));
}

inline double demand_supply_flux(double rho_l, double rho_r, const FundamentalDiagram& fd) {
    return demand_supply_flux(rho_l, rho_r, fd, capacity_point(fd));
}

}  // namespace traffic
