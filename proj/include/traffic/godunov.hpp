#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "traffic/lwr.hpp"
#include "traffic/resonant.hpp"
#include "traffic/waves2nd.hpp"

namespace traffic {

enum class BoundaryKind { Neumann, Periodic, GhostDirichlet };

template <class S>
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Neumann;
    S left{};
    S right{};
    bool operator==(const BoundaryCondition&) const = default;
};

template <class S>
struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 1;
    BoundaryCondition<S> bc;

    double dx() const { return (x_max - x_min) / n_cells; }
    double center(int i) const { return x_min + (i + 0.5) * dx(); }
    void validate() const {
        if (n_cells < 1) throw ValidationError("grid needs at least one cell");
        if (!(x_max > x_min)) throw ValidationError("grid needs x_max > x_min");
    }
};

template <class S>
std::vector<S> with_ghosts(const std::vector<S>& cells, const BoundaryCondition<S>& bc, int g) {
    const int n = static_cast<int>(cells.size());
    std::vector<S> ext(n + 2 * g);
    for (int i = 0; i < n; ++i) ext[i + g] = cells[i];
    for (int k = 0; k < g; ++k) {
        switch (bc.kind) {
            case BoundaryKind::Neumann:
                ext[k] = cells.front();
                ext[n + g + k] = cells.back();
                break;
            case BoundaryKind::Periodic:
                ext[k] = cells[((n - g + k) % n + n) % n];
                ext[n + g + k] = cells[k % n];
                break;
            case BoundaryKind::GhostDirichlet:
                ext[k] = bc.left;
                ext[n + g + k] = bc.right;
                break;
        }
    }
    return ext;
}

struct LwrModel {
    FundamentalDiagram fd;
    bool operator==(const LwrModel&) const = default;
};

struct ResonantModel {
    FundamentalDiagram fd;  ///< per lane
    bool operator==(const ResonantModel&) const = default;
};

enum class Scheme { FirstOrder, SecondOrder, Pember, Fractional, LeVeque };
enum class SourceTiming { Implicit, Midpoint };
enum class EdgeSolver { Riemann, Cauchy };
enum class LeVequeForm { FluxDifference, Fluctuation };

inline const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::FirstOrder: return "first_order";
        case Scheme::SecondOrder: return "second_order";
        case Scheme::Pember: return "pember";
        case Scheme::Fractional: return "fractional";
        case Scheme::LeVeque: return "leveque";
    }
    return "?";
}

struct StepOptions {
    SourceTiming source = SourceTiming::Implicit;
    EdgeSolver edge = EdgeSolver::Riemann;
    LeVequeForm leveque = LeVequeForm::FluxDifference;
    bool operator==(const StepOptions&) const = default;
};

/// Mass fluxes through the two domain ends during the last step.
struct StepDiagnostics {
    double left_mass_flux = 0.0;
    double right_mass_flux = 0.0;
};

template <class S>
struct SimulationState {
    std::vector<S> cells;
    double t = 0.0;
};

// ---------------------------------------------------------------- wave speeds

inline double max_speed(const LwrModel& m, double rho) { return std::abs(lambda_star(m.fd, rho)); }
inline double max_speed(const ResonantModel& m, const ResonantState& u) {
    return std::abs(lambda_star(m.fd, u.rho / u.a));
}
inline double max_speed(const SecondOrderModel& m, const State2& u) {
    return std::max(std::abs(lambda1(m, u)), std::abs(lambda2(m, u)));
}

template <class Model, class S>
double max_speed(const Model& m, const std::vector<S>& ext) {
    double s = 0.0;
    for (const auto& u : ext) s = std::max(s, max_speed(m, u));
    return s;
}

template <class Model, class S>
double cfl_dt(const SimulationState<S>& st, const Grid1D<S>& g, const Model& m, double cfl_target = 0.9,
              double dt_max = std::numeric_limits<double>::infinity()) {
    const double s = max_speed(m, with_ghosts(st.cells, g.bc, 1));
    if (s <= 0.0) return dt_max;
    return std::min(dt_max, cfl_target * g.dx() / s);
}

namespace detail {

template <class Model, class S>
void check_cfl(const Model& m, const std::vector<S>& ext, double dt, double dx) {
    const double c = cfl_number(max_speed(m, ext), dt, dx);
    if (c > 1.0 + 1e-12) throw CflViolation("CFL number " + format_number(c) + " exceeds 1");
}

inline void check_lengths(std::size_t cells, int n) {
    if (cells != static_cast<std::size_t>(n))
        throw LengthMismatchError("state has " + std::to_string(cells) + " cells, grid has " + std::to_string(n));
}

}  // namespace detail

// ---------------------------------------------------------------- scalar models

inline SimulationState<double> step_first_order(const SimulationState<double>& st, const Grid1D<double>& g,
                                                const LwrModel& m, double dt, StepDiagnostics* diag = nullptr) {
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    const auto ext = with_ghosts(st.cells, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    std::vector<double> flux(n + 1);
    for (int e = 0; e <= n; ++e) flux[e] = solve_riemann({ext[e], ext[e + 1], m.fd}).boundary_flux;
    SimulationState<double> out{st.cells, st.t + dt};
    const double r = dt / g.dx();
    for (int i = 0; i < n; ++i) {
        out.cells[i] -= r * (flux[i + 1] - flux[i]);
        if (out.cells[i] < 0.0) throw VacuumError("negative density in cell " + std::to_string(i));
    }
    if (diag) *diag = {flux[0], flux[n]};
    return out;
}

inline SimulationState<ResonantState> step_first_order(const SimulationState<ResonantState>& st,
                                                       const Grid1D<ResonantState>& g, const ResonantModel& m,
                                                       double dt, StepDiagnostics* diag = nullptr) {
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    const auto ext = with_ghosts(st.cells, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    const LaneFlux lf(m.fd);
    std::vector<double> flux(n + 1);
    for (int e = 0; e <= n; ++e) flux[e] = boundary_flux(ext[e], ext[e + 1], lf);
    SimulationState<ResonantState> out{st.cells, st.t + dt};
    const double r = dt / g.dx();
    for (int i = 0; i < n; ++i) {
        out.cells[i].rho -= r * (flux[i + 1] - flux[i]);
        if (out.cells[i].rho < 0.0) throw VacuumError("negative density in cell " + std::to_string(i));
    }
    if (diag) *diag = {flux[0], flux[n]};
    return out;
}

// ---------------------------------------------------------------- 2x2 models

namespace detail {

struct Flux2 {
    double mass;
    double second;
};

// Second conserved variable: v for Zhang, m for PW.
inline double to_q(const SecondOrderModel& m, const State2& u) {
    return m.kind == SecondOrderKind::Pw ? u.m() : u.v;
}

inline State2 from_q(const SecondOrderModel& m, double rho, double q) {
    if (!(rho > 0.0)) throw VacuumError("non-positive density " + format_number(rho));
    return m.kind == SecondOrderKind::Pw ? State2{rho, q / rho} : State2{rho, q};
}

inline double q_equilibrium(const SecondOrderModel& m, double rho) {
    return m.kind == SecondOrderKind::Pw ? f_star(m.fd, rho) : v_star(m.fd, rho);
}

inline Flux2 physical_flux(const SecondOrderModel& m, const State2& u) {
    if (m.kind == SecondOrderKind::Pw) return {u.m(), u.m() * u.v + m.c0 * m.c0 * u.rho};
    return {u.m(), 0.5 * u.v * u.v + velocity_flux(m, u.rho)};
}

inline double relaxation_source(const SecondOrderModel& m, const State2& u) {
    return (q_equilibrium(m, u.rho) - to_q(m, u)) / m.tau;
}

inline State2 edge_state(const SecondOrderModel& m, const State2& l, const State2& r, double dt, EdgeSolver e) {
    if (e == EdgeSolver::Cauchy && m.kind == SecondOrderKind::Pw) return pw_cauchy_boundary_average(m, l, r, dt);
    return boundary_average(m, l, r);
}

// Conservative update with the relaxation source; relax = false drops the source.
inline std::vector<State2> corrector(const SecondOrderModel& m, const std::vector<State2>& cells,
                                     const std::vector<Flux2>& flux, double dt, double dx, SourceTiming timing,
                                     bool relax) {
    const int n = static_cast<int>(cells.size());
    const double r = dt / dx;
    const double k = relax ? dt / m.tau : 0.0;
    std::vector<State2> out(n);
    for (int i = 0; i < n; ++i) {
        const double rho = cells[i].rho - r * (flux[i + 1].mass - flux[i].mass);
        if (!(rho > 0.0))
            throw VacuumError("density " + format_number(rho) + " in cell " + std::to_string(i));
        const double q = to_q(m, cells[i]);
        const double rhs = q - r * (flux[i + 1].second - flux[i].second);
        double qn;
        if (timing == SourceTiming::Midpoint) {
            qn = (rhs + k * (q_equilibrium(m, 0.5 * (rho + cells[i].rho)) - 0.5 * q)) / (1.0 + 0.5 * k);
        } else {
            qn = (rhs + k * q_equilibrium(m, rho)) / (1.0 + k);
        }
        out[i] = from_q(m, rho, qn);
    }
    return out;
}

inline std::vector<Flux2> first_order_fluxes(const SecondOrderModel& m, const std::vector<State2>& ext,
                                             double dt, EdgeSolver e, std::vector<State2>* edges = nullptr) {
    const int ne = static_cast<int>(ext.size()) - 1;
    std::vector<Flux2> flux(ne);
    if (edges) edges->resize(ne);
    for (int i = 0; i < ne; ++i) {
        const State2 s = edge_state(m, ext[i], ext[i + 1], dt, e);
        flux[i] = physical_flux(m, s);
        if (edges) (*edges)[i] = s;
    }
    return flux;
}

inline State2 relax_implicit(const SecondOrderModel& m, const State2& u, double h) {
    const double k = h / m.tau;
    return from_q(m, u.rho, (to_q(m, u) + k * q_equilibrium(m, u.rho)) / (1.0 + k));
}

inline double van_leer(double a, double b, double c) {
    const double dp = c - b, dm = b - a;
    if (dp * dm <= 0.0) return 0.0;
    const double s = (c - a) > 0 ? 1.0 : -1.0;
    return s * std::min({2.0 * std::abs(dp), 2.0 * std::abs(dm), 0.5 * std::abs(c - a)});
}

struct CharBasis {
    std::array<double, 2> lambda;
    std::array<std::array<double, 2>, 2> t;     // columns are right eigenvectors in (rho, q)
    std::array<std::array<double, 2>, 2> tinv;
};

inline CharBasis char_basis(const SecondOrderModel& m, const State2& u) {
    CharBasis b{};
    if (m.kind == SecondOrderKind::Pw) {
        const double l1 = u.v - m.c0, l2 = u.v + m.c0;
        b.lambda = {l1, l2};
        b.t = {{{1.0, 1.0}, {l1, l2}}};
        const double det = l2 - l1;
        b.tinv = {{{l2 / det, -1.0 / det}, {-l1 / det, 1.0 / det}}};
    } else {
        const double d = dv_star(m.fd, u.rho);
        if (std::abs(d) < 1e-300) throw SingularTransformError("v*' vanishes at rho=" + format_number(u.rho));
        b.lambda = {u.v + u.rho * d, u.v - u.rho * d};
        b.t = {{{1.0, 1.0}, {d, -d}}};
        b.tinv = {{{0.5, 0.5 / d}, {0.5, -0.5 / d}}};
    }
    return b;
}

inline std::array<double, 2> mul(const std::array<std::array<double, 2>, 2>& a, const std::array<double, 2>& x) {
    return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
}

}  // namespace detail

inline SimulationState<State2> step_first_order(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                                const SecondOrderModel& m, double dt, const StepOptions& opt = {},
                                                StepDiagnostics* diag = nullptr) {
    detail::check_lengths(st.cells.size(), g.n_cells);
    const auto ext = with_ghosts(st.cells, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    const auto flux = detail::first_order_fluxes(m, ext, dt, opt.edge);
    if (diag) *diag = {flux.front().mass, flux.back().mass};
    return {detail::corrector(m, st.cells, flux, dt, g.dx(), opt.source, true), st.t + dt};
}

/// MUSCL predictor in characteristic variables frozen at each cell, then the Godunov corrector.
inline SimulationState<State2> step_second_order(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                                 const SecondOrderModel& m, double dt, const StepOptions& opt = {},
                                                 StepDiagnostics* diag = nullptr) {
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    const auto ext = with_ghosts(st.cells, g.bc, 2);
    detail::check_cfl(m, ext, dt, g.dx());
    const double r = dt / g.dx();
    // faces[j] = {state at left face, state at right face} of ext cell j, for j = 1..n+2
    std::vector<std::array<State2, 2>> faces(ext.size());
    for (int j = 1; j <= n + 2; ++j) {
        const auto b = detail::char_basis(m, ext[j]);
        const std::array<double, 2> um{ext[j - 1].rho, detail::to_q(m, ext[j - 1])};
        const std::array<double, 2> u0{ext[j].rho, detail::to_q(m, ext[j])};
        const std::array<double, 2> up{ext[j + 1].rho, detail::to_q(m, ext[j + 1])};
        const auto wm = detail::mul(b.tinv, um), w0 = detail::mul(b.tinv, u0), wp = detail::mul(b.tinv, up);
        std::array<double, 2> wl{}, wr{};
        for (int p = 0; p < 2; ++p) {
            const double slope = detail::van_leer(wm[p], w0[p], wp[p]);
            wr[p] = w0[p] + 0.5 * (1.0 - b.lambda[p] * r) * slope;
            wl[p] = w0[p] - 0.5 * (1.0 + b.lambda[p] * r) * slope;
        }
        const auto ul = detail::mul(b.t, wl), ur = detail::mul(b.t, wr);
        faces[j] = {detail::from_q(m, ul[0], ul[1]), detail::from_q(m, ur[0], ur[1])};
    }
    std::vector<detail::Flux2> flux(n + 1);
    for (int e = 0; e <= n; ++e) {
        const State2 s = detail::edge_state(m, faces[e + 1][1], faces[e + 2][0], dt, opt.edge);
        flux[e] = detail::physical_flux(m, s);
    }
    if (diag) *diag = {flux.front().mass, flux.back().mass};
    return {detail::corrector(m, st.cells, flux, dt, g.dx(), opt.source, true), st.t + dt};
}

/// Explicit source averaged over the two edge states.
inline SimulationState<State2> step_pember(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                           const SecondOrderModel& m, double dt, const StepOptions& opt = {},
                                           StepDiagnostics* diag = nullptr) {
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    const auto ext = with_ghosts(st.cells, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    std::vector<State2> edges;
    const auto flux = detail::first_order_fluxes(m, ext, dt, opt.edge, &edges);
    const double r = dt / g.dx();
    SimulationState<State2> out{std::vector<State2>(n), st.t + dt};
    for (int i = 0; i < n; ++i) {
        const double rho = st.cells[i].rho - r * (flux[i + 1].mass - flux[i].mass);
        if (!(rho > 0.0)) throw VacuumError("density " + format_number(rho) + " in cell " + std::to_string(i));
        const double src = 0.5 * (detail::relaxation_source(m, edges[i]) + detail::relaxation_source(m, edges[i + 1]));
        const double q = detail::to_q(m, st.cells[i]) - r * (flux[i + 1].second - flux[i].second) + dt * src;
        out.cells[i] = detail::from_q(m, rho, q);
    }
    if (diag) *diag = {flux.front().mass, flux.back().mass};
    return out;
}

/// Half relaxation, homogeneous Godunov step, half relaxation.
inline SimulationState<State2> step_fractional(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                               const SecondOrderModel& m, double dt, const StepOptions& opt = {},
                                               StepDiagnostics* diag = nullptr) {
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    std::vector<State2> half(n);
    for (int i = 0; i < n; ++i) half[i] = detail::relax_implicit(m, st.cells[i], 0.5 * dt);
    const auto ext = with_ghosts(half, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    const auto flux = detail::first_order_fluxes(m, ext, dt, opt.edge);
    auto cells = detail::corrector(m, half, flux, dt, g.dx(), opt.source, false);
    for (auto& u : cells) u = detail::relax_implicit(m, u, 0.5 * dt);
    if (diag) *diag = {flux.front().mass, flux.back().mass};
    return {std::move(cells), st.t + dt};
}

namespace detail {

inline std::vector<double> cubic_real_roots(double a3, double a2, double a1, double a0) {
    std::vector<double> roots;
    const double b = a2 / a3, c = a1 / a3, d = a0 / a3;
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        roots.push_back(std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s) - b / 3.0);
    } else {
        const double rr = std::sqrt(std::max(0.0, -p / 3.0));
        if (rr == 0.0) {
            roots.push_back(-b / 3.0);
        } else {
            const double arg = std::clamp(-0.5 * q / (rr * rr * rr), -1.0, 1.0);
            const double phi = std::acos(arg);
            for (int k = 0; k < 3; ++k) roots.push_back(2.0 * rr * std::cos((phi - 2.0 * M_PI * k) / 3.0) - b / 3.0);
        }
    }
    for (auto& x : roots) {
        for (int it = 0; it < 3; ++it) {
            const double f = ((a3 * x + a2) * x + a1) * x + a0;
            const double df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
            if (df == 0.0) break;
            x -= f / df;
        }
    }
    return roots;
}

}  // namespace detail

/// Half-width delta of the in-cell standing jump (rho - delta, m) | (rho + delta, m) whose PW
/// momentum-flux difference equals K = s(U) dx.
inline double leveque_standing_delta(double rho, double m, double K, double c0) {
    if (K == 0.0) return 0.0;
    const double a3 = 2.0 * c0 * c0, a2 = -K, a1 = 2.0 * m * m - 2.0 * c0 * c0 * rho * rho, a0 = K * rho * rho;
    double best = std::numeric_limits<double>::infinity();
    for (double x : detail::cubic_real_roots(a3, a2, a1, a0)) {
        if (std::abs(x) < rho && std::abs(x) < std::abs(best)) best = x;
    }
    if (!std::isfinite(best)) throw NoAdmissibleRootError("no root with |delta| < rho for rho=" + format_number(rho));
    return best;
}

/// Quasi-steady wave propagation: each cell carries a standing jump balancing its source.
inline SimulationState<State2> step_leveque(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                            const SecondOrderModel& m, double dt, const StepOptions& opt = {},
                                            StepDiagnostics* diag = nullptr) {
    if (m.kind != SecondOrderKind::Pw) throw ValidationError("the quasi-steady scheme is defined for PW only");
    const int n = g.n_cells;
    detail::check_lengths(st.cells.size(), n);
    const auto ext = with_ghosts(st.cells, g.bc, 1);
    detail::check_cfl(m, ext, dt, g.dx());
    const int ne = n + 2;
    std::vector<State2> minus(ne), plus(ne);
    for (int j = 0; j < ne; ++j) {
        const double mom = ext[j].m();
        const double K = detail::relaxation_source(m, ext[j]) * g.dx();
        const double delta = leveque_standing_delta(ext[j].rho, mom, K, m.c0);
        minus[j] = detail::from_q(m, ext[j].rho - delta, mom);
        plus[j] = detail::from_q(m, ext[j].rho + delta, mom);
    }
    std::vector<detail::Flux2> flux(n + 1);
    for (int e = 0; e <= n; ++e) flux[e] = detail::physical_flux(m, detail::edge_state(m, plus[e], minus[e + 1], dt, opt.edge));
    const double r = dt / g.dx();
    SimulationState<State2> out{std::vector<State2>(n), st.t + dt};
    for (int i = 0; i < n; ++i) {
        double dm = flux[i + 1].mass - flux[i].mass;
        double dq = flux[i + 1].second - flux[i].second;
        if (opt.leveque == LeVequeForm::Fluctuation) {
            const auto fp = detail::physical_flux(m, plus[i + 1]), fm = detail::physical_flux(m, minus[i + 1]);
            dm -= fp.mass - fm.mass;
            dq -= fp.second - fm.second;
        }
        const double rho = st.cells[i].rho - r * dm;
        if (!(rho > 0.0)) throw VacuumError("density " + format_number(rho) + " in cell " + std::to_string(i));
        out.cells[i] = detail::from_q(m, rho, st.cells[i].m() - r * dq);
    }
    if (diag) *diag = {flux.front().mass, flux.back().mass};
    return out;
}

// ---------------------------------------------------------------- driver

struct DtPolicy {
    enum class Kind { Cfl, Fixed, Ratio } kind = Kind::Cfl;
    double value = 0.9;  ///< CFL target, dt, or dt/dx
    bool operator==(const DtPolicy&) const = default;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> rho;
    std::vector<double> v;      ///< empty for scalar models
    std::vector<double> lanes;  ///< resonant model only
};

using Trajectory = std::vector<Snapshot>;

template <class Model, class S>
struct SimulationConfig {
    Model model;
    Grid1D<S> grid;
    std::vector<S> initial;
    Scheme scheme = Scheme::FirstOrder;
    StepOptions options;
    DtPolicy dt;
    double dt_max = std::numeric_limits<double>::infinity();
    double t_end = 0.0;
    std::vector<double> output_times;  ///< empty means {t_end}
};

inline Snapshot to_snapshot(double t, const std::vector<double>& cells) { return {t, cells, {}, {}}; }

inline Snapshot to_snapshot(double t, const std::vector<ResonantState>& cells) {
    Snapshot s{t, {}, {}, {}};
    for (const auto& c : cells) {
        s.rho.push_back(c.rho);
        s.lanes.push_back(c.a);
    }
    return s;
}

inline Snapshot to_snapshot(double t, const std::vector<State2>& cells) {
    Snapshot s{t, {}, {}, {}};
    for (const auto& c : cells) {
        s.rho.push_back(c.rho);
        s.v.push_back(c.v);
    }
    return s;
}

namespace detail {

inline double relaxation_time(const LwrModel&) { return std::numeric_limits<double>::infinity(); }
inline double relaxation_time(const ResonantModel&) { return std::numeric_limits<double>::infinity(); }
inline double relaxation_time(const SecondOrderModel& m) { return m.tau; }

template <class S>
SimulationState<S> step_scalar(const SimulationState<S>& st, const Grid1D<S>& g, const LwrModel& m, Scheme s,
                               const StepOptions&, double dt) {
    if (s != Scheme::FirstOrder) throw ValidationError("scalar LWR supports the first-order scheme only");
    return step_first_order(st, g, m, dt);
}

inline SimulationState<ResonantState> step_scalar(const SimulationState<ResonantState>& st,
                                                  const Grid1D<ResonantState>& g, const ResonantModel& m, Scheme s,
                                                  const StepOptions&, double dt) {
    if (s != Scheme::FirstOrder) throw ValidationError("the resonant model supports the first-order scheme only");
    return step_first_order(st, g, m, dt);
}

inline SimulationState<State2> step_scalar(const SimulationState<State2>& st, const Grid1D<State2>& g,
                                           const SecondOrderModel& m, Scheme s, const StepOptions& o, double dt) {
    switch (s) {
        case Scheme::FirstOrder: return step_first_order(st, g, m, dt, o);
        case Scheme::SecondOrder: return step_second_order(st, g, m, dt, o);
        case Scheme::Pember: return step_pember(st, g, m, dt, o);
        case Scheme::Fractional: return step_fractional(st, g, m, dt, o);
        case Scheme::LeVeque: return step_leveque(st, g, m, dt, o);
    }
    return st;
}

}  // namespace detail

template <class Model, class S>
SimulationState<S> step(const SimulationState<S>& st, const Grid1D<S>& g, const Model& m, Scheme s,
                        const StepOptions& o, double dt) {
    return detail::step_scalar(st, g, m, s, o, dt);
}

template <class Model, class S>
Trajectory run_simulation(const SimulationConfig<Model, S>& cfg) {
    cfg.grid.validate();
    detail::check_lengths(cfg.initial.size(), cfg.grid.n_cells);
    std::vector<double> outputs = cfg.output_times;
    if (outputs.empty()) outputs.push_back(cfg.t_end);
    std::sort(outputs.begin(), outputs.end());
    Trajectory traj;
    SimulationState<S> st{cfg.initial, 0.0};
    long step_index = 0;
    for (double target : outputs) {
        while (st.t < target) {
            double dt;
            switch (cfg.dt.kind) {
                case DtPolicy::Kind::Cfl:
                    dt = cfl_dt(st, cfg.grid, cfg.model, cfg.dt.value, cfg.dt_max);
                    // stiff source: drop well below the relaxation time
                    if (detail::relaxation_time(cfg.model) < dt) dt = 0.5 * detail::relaxation_time(cfg.model);
                    break;
                case DtPolicy::Kind::Fixed: dt = cfg.dt.value; break;
                case DtPolicy::Kind::Ratio: dt = cfg.dt.value * cfg.grid.dx(); break;
            }
            if (!(dt > 0.0)) throw CflViolation("non-positive time step");
            const bool last = st.t + dt >= target - 1e-9 * dt;
            if (last) dt = target - st.t;
            try {
                st = step(st, cfg.grid, cfg.model, cfg.scheme, cfg.options, dt);
                if (last) st.t = target;
            } catch (const Error& e) {
                throw Error(e.error_class(), "step " + std::to_string(step_index) + " (t=" + format_number(st.t) +
                                                 "): " + e.what());
            }
            ++step_index;
        }
        traj.push_back(to_snapshot(st.t, st.cells));
    }
    return traj;
}

}  // namespace traffic
