#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "traffic/errors.hpp"
#include "traffic/numerics.hpp"

namespace traffic {

enum class DiagramFamily { Greenshields, Polynomial, Greenberg, Underwood, Newell, KernerSigmoid };

inline const char* to_string(DiagramFamily f) {
    switch (f) {
        case DiagramFamily::Greenshields: return "greenshields";
        case DiagramFamily::Polynomial: return "polynomial";
        case DiagramFamily::Greenberg: return "greenberg";
        case DiagramFamily::Underwood: return "underwood";
        case DiagramFamily::Newell: return "newell";
        case DiagramFamily::KernerSigmoid: return "kerner";
    }
    return "?";
}

/// Equilibrium speed-density relation v*(rho). Only the fields of the chosen family are read.
struct FundamentalDiagram {
    DiagramFamily family = DiagramFamily::Newell;
    double free_speed = 1.0;       ///< v_f
    double jam_density = 1.0;      ///< rho_j (Underwood: optimal density)
    double jam_wave_speed = -1.0;  ///< c_j, Newell only, sign ignored
    double exponent = 2.0;         ///< Polynomial n
    double greenberg_speed = 1.0;  ///< v_0
    double sigmoid_speed = 5.0461;
    double sigmoid_center = 0.25;
    double sigmoid_width = 0.06;
    double sigmoid_offset = 3.72e-6;
    double phi_anchor = 0.5;       ///< lower limit of the quadrature for phi (KernerSigmoid)

    bool operator==(const FundamentalDiagram&) const = default;

    static FundamentalDiagram greenshields(double vf, double rhoj) {
        FundamentalDiagram d;
        d.family = DiagramFamily::Greenshields;
        d.free_speed = vf;
        d.jam_density = rhoj;
        return d;
    }
    static FundamentalDiagram polynomial(double vf, double rhoj, double n) {
        FundamentalDiagram d = greenshields(vf, rhoj);
        d.family = DiagramFamily::Polynomial;
        d.exponent = n;
        return d;
    }
    static FundamentalDiagram greenberg(double v0, double rhoj) {
        FundamentalDiagram d;
        d.family = DiagramFamily::Greenberg;
        d.greenberg_speed = v0;
        d.jam_density = rhoj;
        return d;
    }
    static FundamentalDiagram underwood(double vf, double rho0) {
        FundamentalDiagram d = greenshields(vf, rho0);
        d.family = DiagramFamily::Underwood;
        return d;
    }
    static FundamentalDiagram newell(double vf, double cj, double rhoj) {
        FundamentalDiagram d = greenshields(vf, rhoj);
        d.family = DiagramFamily::Newell;
        d.jam_wave_speed = cj;
        return d;
    }
    static FundamentalDiagram newell_normalized() { return newell(1.0, -1.0, 1.0); }
    static FundamentalDiagram kerner() {
        FundamentalDiagram d;
        d.family = DiagramFamily::KernerSigmoid;
        return d;
    }
};

/// Upper end of the admissible density range.
inline double max_density(const FundamentalDiagram& fd) {
    switch (fd.family) {
        case DiagramFamily::Underwood: return 2.0 * fd.jam_density;
        case DiagramFamily::KernerSigmoid:
            return fd.sigmoid_center + fd.sigmoid_width * std::log(1.0 / fd.sigmoid_offset - 1.0);
        default: return fd.jam_density;
    }
}

namespace detail {

inline void check_density(const FundamentalDiagram& fd, double rho) {
    const double top = max_density(fd);
    if (!(rho >= 0.0) || rho > top * (1.0 + 1e-12))
        throw DomainError("density " + format_number(rho) + " outside [0, " + format_number(top) + "]");
    if (rho == 0.0 && fd.family == DiagramFamily::Greenberg)
        throw DomainError("Greenberg diagram is undefined at zero density");
}

inline double newell_k(const FundamentalDiagram& fd) { return std::abs(fd.jam_wave_speed) / fd.free_speed; }

inline double sigmoid_exp(const FundamentalDiagram& fd, double rho) {
    return std::exp((rho - fd.sigmoid_center) / fd.sigmoid_width);
}

}  // namespace detail

inline double v_star(const FundamentalDiagram& fd, double rho) {
    detail::check_density(fd, rho);
    switch (fd.family) {
        case DiagramFamily::Greenshields: return fd.free_speed * (1.0 - rho / fd.jam_density);
        case DiagramFamily::Polynomial:
            return fd.free_speed * (1.0 - std::pow(rho / fd.jam_density, fd.exponent));
        case DiagramFamily::Greenberg: return fd.greenberg_speed * std::log(fd.jam_density / rho);
        case DiagramFamily::Underwood: return fd.free_speed * std::exp(-rho / fd.jam_density);
        case DiagramFamily::Newell:
            if (rho == 0.0) return fd.free_speed;
            return fd.free_speed * (1.0 - std::exp(detail::newell_k(fd) * (1.0 - fd.jam_density / rho)));
        case DiagramFamily::KernerSigmoid:
            return fd.sigmoid_speed * (1.0 / (1.0 + detail::sigmoid_exp(fd, rho)) - fd.sigmoid_offset);
    }
    return 0.0;
}

inline double dv_star(const FundamentalDiagram& fd, double rho) {
    detail::check_density(fd, rho);
    switch (fd.family) {
        case DiagramFamily::Greenshields: return -fd.free_speed / fd.jam_density;
        case DiagramFamily::Polynomial:
            return -fd.free_speed * fd.exponent * std::pow(rho, fd.exponent - 1.0) /
                   std::pow(fd.jam_density, fd.exponent);
        case DiagramFamily::Greenberg: return -fd.greenberg_speed / rho;
        case DiagramFamily::Underwood:
            return -fd.free_speed / fd.jam_density * std::exp(-rho / fd.jam_density);
        case DiagramFamily::Newell: {
            if (rho == 0.0) return 0.0;
            const double k = detail::newell_k(fd);
            return -fd.free_speed * k * fd.jam_density / (rho * rho) *
                   std::exp(k * (1.0 - fd.jam_density / rho));
        }
        case DiagramFamily::KernerSigmoid: {
            const double e = detail::sigmoid_exp(fd, rho);
            return -fd.sigmoid_speed * e / (fd.sigmoid_width * (1.0 + e) * (1.0 + e));
        }
    }
    return 0.0;
}

inline double f_star(const FundamentalDiagram& fd, double rho) {
    if (rho == 0.0) {
        detail::check_density(fd, rho);
        return 0.0;
    }
    return rho * v_star(fd, rho);
}

/// Characteristic speed of the scalar model, f*'(rho) = v* + rho v*'.
inline double lambda_star(const FundamentalDiagram& fd, double rho) {
    return v_star(fd, rho) + rho * dv_star(fd, rho);
}

enum class WaveModelKind { Lwr, Zhang, Pw };

struct WaveModel {
    WaveModelKind kind = WaveModelKind::Lwr;
    double c0 = 0.0;  ///< PW anticipation speed
};

namespace detail {

// phi for the sigmoid has no closed form. A table of node values on a fixed grid plus one
// short Gauss rule from the nearest node keeps each call cheap; the table is rebuilt when the
// diagram changes.
inline double kerner_phi(const FundamentalDiagram& fd, double rho) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    constexpr int kNodes = 512;
    auto integrand = [&](double s) {
        const double d = dv_star(fd, s);
        return s * d * d;
    };
    struct Table {
        FundamentalDiagram fd;
        double h = 0.0;
        std::vector<double> phi;
    };
    thread_local Table table;
    if (table.phi.empty() || !(table.fd == fd)) {
        table.fd = fd;
        table.h = max_density(fd) / kNodes;
        table.phi.assign(kNodes + 1, 0.0);
        for (int k = 1; k <= kNodes; ++k)
            table.phi[k] = table.phi[k - 1] + Rule::integrate(integrand, (k - 1) * table.h, k * table.h);
        const int ka = std::clamp(static_cast<int>(std::lround(fd.phi_anchor / table.h)), 0, kNodes);
        const double at_anchor = table.phi[ka] + Rule::integrate(integrand, ka * table.h, fd.phi_anchor);
        for (double& p : table.phi) p -= at_anchor;
    }
    const int k = std::clamp(static_cast<int>(std::lround(rho / table.h)), 0, kNodes);
    return table.phi[k] + Rule::integrate(integrand, k * table.h, rho);
}

}  // namespace detail

/// phi with phi'(rho) = rho v*'(rho)^2, closed form where one exists.
inline double zhang_phi(const FundamentalDiagram& fd, double rho) {
    detail::check_density(fd, rho);
    switch (fd.family) {
        case DiagramFamily::Greenshields: {
            const double u = rho / fd.jam_density;
            return 0.5 * fd.free_speed * fd.free_speed * u * u;
        }
        case DiagramFamily::Polynomial: {
            const double n = fd.exponent;
            return 0.5 * n * fd.free_speed * fd.free_speed * std::pow(rho / fd.jam_density, 2.0 * n);
        }
        case DiagramFamily::Greenberg: return fd.greenberg_speed * fd.greenberg_speed * std::log(rho);
        case DiagramFamily::Underwood: {
            const double u = rho / fd.jam_density;
            return -0.25 * fd.free_speed * fd.free_speed * (1.0 + 2.0 * u) * std::exp(-2.0 * u);
        }
        case DiagramFamily::Newell: {
            if (rho == 0.0) return 0.0;
            const double k = detail::newell_k(fd);
            return 0.5 * fd.free_speed * fd.free_speed * (fd.jam_density * k / rho + 0.5) *
                   std::exp(2.0 * k * (1.0 - fd.jam_density / rho));
        }
        case DiagramFamily::KernerSigmoid: return detail::kerner_phi(fd, rho);
    }
    return 0.0;
}

inline double velocity_flux_phi(const FundamentalDiagram& fd, double rho, const WaveModel& model) {
    if (model.kind == WaveModelKind::Pw) {
        detail::check_density(fd, rho);
        return model.c0 * model.c0 * rho;
    }
    return zhang_phi(fd, rho);
}

struct WaveSpeeds {
    double lambda_star;
    double sound_speed;  ///< c(rho) = -rho v*' for Zhang, c0 for PW
    double lambda1;
    double lambda2;
};

inline WaveSpeeds wave_speeds(const FundamentalDiagram& fd, double rho, double v, const WaveModel& model) {
    WaveSpeeds w{};
    const double d = dv_star(fd, rho);
    w.lambda_star = v_star(fd, rho) + rho * d;
    switch (model.kind) {
        case WaveModelKind::Lwr:
            w.sound_speed = -rho * d;
            w.lambda1 = w.lambda2 = w.lambda_star;
            break;
        case WaveModelKind::Zhang:
            w.sound_speed = -rho * d;
            w.lambda1 = v + rho * d;
            w.lambda2 = v - rho * d;
            break;
        case WaveModelKind::Pw:
            w.sound_speed = model.c0;
            w.lambda1 = v - model.c0;
            w.lambda2 = v + model.c0;
            break;
    }
    return w;
}

/// alpha with lambda*(alpha) = 0, the density of maximum flow.
inline double critical_density(const FundamentalDiagram& fd) {
    const double top = max_density(fd);
    const double lo = fd.family == DiagramFamily::Greenberg ? top * 1e-9 : 0.0;
    const double flo = lambda_star(fd, lo), fhi = lambda_star(fd, top);
    if ((flo > 0) == (fhi > 0)) throw NoSignChangeError("lambda* keeps one sign on the density domain");
    return solve_bracketed([&](double r) { return lambda_star(fd, r); }, lo, top, flo, fhi);
}

/// Critical density and capacity flow, precomputed for hot loops.
struct CapacityPoint {
    double alpha = 0.0;
    double capacity = 0.0;
};

inline CapacityPoint capacity_point(const FundamentalDiagram& fd) {
    CapacityPoint c;
    c.alpha = critical_density(fd);
    c.capacity = f_star(fd, c.alpha);
    return c;
}

/// Roots of rho v*'(rho) + c0 = 0 bounding the PW instability band.
/// Empty when c0 is large enough that no root exists.
inline std::optional<std::pair<double, double>> pw_stability_bounds(const FundamentalDiagram& fd, double c0) {
    const double top = max_density(fd);
    const int mesh = 4000;
    auto h = [&](double r) { return r * dv_star(fd, r) + c0; };
    std::vector<double> roots;
    double prev_r = top * 1e-6, prev_h = h(prev_r);
    for (int i = 1; i <= mesh; ++i) {
        const double r = top * i / mesh;
        const double hr = h(r);
        if ((hr > 0) != (prev_h > 0)) roots.push_back(solve_bracketed(h, prev_r, r, prev_h, hr));
        prev_r = r;
        prev_h = hr;
    }
    if (roots.empty()) return std::nullopt;
    if (roots.size() != 2)
        throw RootCountError("expected two sign changes of rho v*' + c0, found " + std::to_string(roots.size()));
    return std::make_pair(roots[0], roots[1]);
}

}  // namespace traffic
