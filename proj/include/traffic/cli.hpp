#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "traffic/analysis.hpp"
#include "traffic/lwr.hpp"
#include "traffic/network.hpp"
#include "traffic/resonant.hpp"
#include "traffic/scenario.hpp"

namespace traffic {

inline constexpr const char* kToolVersion = "traffic 0.1.0";

struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    template <class... T>
    void add(const T&... cells) {
        rows.push_back({cell(cells)...});
    }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double x) { return format_number(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long x) { return std::to_string(x); }
};

struct RunOutput {
    std::vector<std::string> notes;  ///< extra header lines, "key: value"
    std::vector<CsvTable> tables;
};

// ---------------------------------------------------------------- CSV

inline std::string emit_csv(const Scenario& s, const RunOutput& out) {
    std::ostringstream os;
    os << "# " << kToolVersion << "\n";
    os << "# command: " << detail::name_of(s.command) << "\n";
    os << "# seed: " << s.seed << "\n";
    os << "# units: " << s.units << "\n";
    os << "# scenario:\n";
    std::istringstream ini(emit_scenario(s));
    for (std::string line; std::getline(ini, line);) os << (line.empty() ? "#" : "# " + line) << "\n";
    os << "# end scenario\n";
    for (const auto& n : out.notes) os << "# " << n << "\n";
    for (const auto& t : out.tables) {
        if (out.tables.size() > 1) os << "# table: " << t.name << "\n";
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << "\n";
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
    }
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write to " + path + " failed");
}

/// Recovers the scenario echoed in a CSV header.
inline Scenario scenario_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, ini;
    bool inside = false;
    while (std::getline(in, line)) {
        if (line == "# scenario:") {
            inside = true;
            continue;
        }
        if (line == "# end scenario") return parse_scenario(ini);
        if (!inside) continue;
        if (line.rfind("#", 0) != 0) break;
        ini += (line.size() > 2 ? line.substr(2) : std::string()) + "\n";
    }
    throw ParseError("no complete scenario block in the CSV header");
}

// ---------------------------------------------------------------- model setup

inline SecondOrderModel second_order_model(const Scenario& s) {
    SecondOrderModel m;
    m.kind = s.model == ModelKind::Pw ? SecondOrderKind::Pw : SecondOrderKind::Zhang;
    m.fd = s.fd;
    m.tau = s.tau;
    m.c0 = s.c0;
    m.curves = s.curves;
    return m;
}

namespace detail {

inline double initial_density(const InitialSpec& in, double x) {
    switch (in.kind) {
        case InitialKind::Constant: return in.rho;
        case InitialKind::Jump: return x < in.x0 ? in.rho_l : in.rho_r;
        case InitialKind::Sine: return in.base + in.amplitude * std::sin(2.0 * M_PI * x / in.period);
        case InitialKind::Segments:
            for (const auto& g : in.segments)
                if (x >= g.x0 && x < g.x1) return g.rho;
            return in.rho_default;
    }
    return in.rho;
}

inline double initial_velocity(const InitialSpec& in, const FundamentalDiagram& fd, double x, double rho) {
    switch (in.kind) {
        case InitialKind::Constant: return in.v ? *in.v : v_star(fd, rho);
        case InitialKind::Jump: {
            const auto& v = x < in.x0 ? in.v_l : in.v_r;
            return v ? *v : v_star(fd, rho);
        }
        case InitialKind::Sine:
            if (in.velocity == VelocityProfile::Cosine)
                return v_star(fd, in.base) + in.v_amplitude * std::cos(2.0 * M_PI * x / in.period);
            return v_star(fd, rho) + in.v_offset;
        case InitialKind::Segments: return v_star(fd, rho);
    }
    return v_star(fd, rho);
}

template <class S>
Grid1D<S> make_grid(const Scenario& s, int cells, S left, S right) {
    Grid1D<S> g;
    g.x_min = s.x_min;
    g.x_max = s.x_max;
    g.n_cells = cells;
    g.bc.kind = s.bc;
    if (s.bc == BoundaryKind::GhostDirichlet) {
        g.bc.left = left;
        g.bc.right = right;
    }
    return g;
}

template <class Model, class S>
SimulationConfig<Model, S> base_config(const Scenario& s, Model model, Grid1D<S> grid) {
    SimulationConfig<Model, S> c;
    c.model = model;
    c.grid = grid;
    c.scheme = s.scheme;
    c.options = s.options;
    c.dt = s.dt;
    c.t_end = s.t_end;
    c.output_times = s.outputs;
    return c;
}

}  // namespace detail

/// Runs the scenario's time-dependent problem on `cells` cells.
inline Trajectory simulate(const Scenario& s, int cells) {
    switch (s.model) {
        case ModelKind::Lwr: {
            auto c = detail::base_config(s, LwrModel{s.fd}, detail::make_grid(s, cells, s.ghost_rho_l, s.ghost_rho_r));
            for (int i = 0; i < cells; ++i) c.initial.push_back(detail::initial_density(s.initial, c.grid.center(i)));
            return run_simulation(c);
        }
        case ModelKind::Resonant: {
            auto c = detail::base_config(s, ResonantModel{s.fd},
                                         detail::make_grid(s, cells, ResonantState{s.ghost_a_l, s.ghost_rho_l},
                                                           ResonantState{s.ghost_a_r, s.ghost_rho_r}));
            for (int i = 0; i < cells; ++i) {
                const double x = c.grid.center(i);
                double a = s.initial.lanes;
                if (s.initial.kind == InitialKind::Jump) a = x < s.initial.x0 ? s.initial.lanes_l : s.initial.lanes_r;
                c.initial.push_back({a, detail::initial_density(s.initial, x)});
            }
            return run_simulation(c);
        }
        case ModelKind::Zhang:
        case ModelKind::Pw: {
            const SecondOrderModel m = second_order_model(s);
            auto c = detail::base_config(s, m, detail::make_grid(s, cells, State2{s.ghost_rho_l, s.ghost_v_l},
                                                                 State2{s.ghost_rho_r, s.ghost_v_r}));
            for (int i = 0; i < cells; ++i) {
                const double x = c.grid.center(i);
                const double rho = detail::initial_density(s.initial, x);
                c.initial.push_back({rho, detail::initial_velocity(s.initial, s.fd, x, rho)});
            }
            return run_simulation(c);
        }
    }
    return {};
}

// ---------------------------------------------------------------- runners

inline RunOutput run_riemann(const Scenario& s) {
    RunOutput out;
    CsvTable t;
    t.name = "riemann";
    const auto& r = s.riemann;
    switch (s.model) {
        case ModelKind::Lwr: {
            const auto w = solve_riemann({r.rho_l, r.rho_r, s.fd});
            t.columns = {"pattern", "rho_l", "rho_r", "shock_speed", "lambda_l", "lambda_r", "rho_boundary",
                         "boundary_flux"};
            const char* kind = w.kind == ScalarWaveKind::Shock         ? "shock"
                               : w.kind == ScalarWaveKind::Rarefaction ? "rarefaction"
                                                                       : "constant";
            t.add(std::string(kind), w.rho_l, w.rho_r, w.shock_speed, w.lambda_l, w.lambda_r, w.boundary_state,
                  w.boundary_flux);
            break;
        }
        case ModelKind::Resonant: {
            const auto sol = classify({r.a_l, r.rho_l}, {r.a_r, r.rho_r}, s.fd);
            t.columns = {"case", "index", "lanes", "rho", "boundary_flux"};
            for (std::size_t i = 0; i < sol.intermediates.size(); ++i)
                t.add(sol.case_id, static_cast<int>(i + 1), sol.intermediates[i].a, sol.intermediates[i].rho,
                      sol.boundary_flux);
            if (sol.intermediates.empty()) t.add(sol.case_id, 0, r.a_l, r.rho_l, sol.boundary_flux);
            break;
        }
        case ModelKind::Zhang:
        case ModelKind::Pw: {
            const SecondOrderModel m = second_order_model(s);
            const State2 ul{r.rho_l, r.v_l ? *r.v_l : v_star(s.fd, r.rho_l)};
            const State2 ur{r.rho_r, r.v_r ? *r.v_r : v_star(s.fd, r.rho_r)};
            const auto w = solve_riemann2(m, ul, ur);
            t.columns = {"pattern", "rho_m", "v_m", "rho_boundary", "v_boundary", "mass_flux"};
            t.add(std::string(to_string(w.pattern)), w.intermediate->rho, w.intermediate->v, w.boundary_avg.rho,
                  w.boundary_avg.v, w.boundary_avg.m());
            break;
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline RunOutput run_simulate(const Scenario& s) {
    RunOutput out;
    CsvTable t;
    t.name = "simulate";
    t.columns = {"t", "cell", "x", "rho"};
    const bool second = s.model == ModelKind::Zhang || s.model == ModelKind::Pw;
    if (second) t.columns.push_back("v");
    if (s.model == ModelKind::Resonant) t.columns.push_back("lanes");
    const double dx = (s.x_max - s.x_min) / s.cells;
    for (const auto& snap : simulate(s, s.cells)) {
        for (std::size_t i = 0; i < snap.rho.size(); ++i) {
            std::vector<std::string> row{format_number(snap.t), std::to_string(i),
                                         format_number(s.x_min + (i + 0.5) * dx), format_number(snap.rho[i])};
            if (second) row.push_back(format_number(snap.v[i]));
            if (s.model == ModelKind::Resonant) row.push_back(format_number(snap.lanes[i]));
            t.rows.push_back(std::move(row));
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline CsvTable convergence_table(const ConvergenceReport& rep) {
    CsvTable t;
    t.name = "convergence";
    t.columns = {"n_fine", "n_coarse", "field", "norm", "eps", "rate"};
    for (const auto& r : rep.rows)
        t.add(2 * r.n_coarse, r.n_coarse, r.field, std::string(to_string(r.norm)), r.eps,
              std::isnan(r.rate) ? std::string() : format_number(r.rate));
    return t;
}

inline RunOutput run_converge(const Scenario& s) {
    RunOutput out;
    const auto rep = run_convergence([&](int n) { return simulate(s, n).back(); }, s.grids);
    out.tables.push_back(convergence_table(rep));
    return out;
}

inline RunOutput run_stability(const Scenario& s) {
    RunOutput out;
    const auto rep = stability_probe([&](int n) { return simulate(s, n).back(); }, s.grids, s.band);
    out.notes.push_back(std::string("verdict: ") + to_string(rep.verdict));
    out.notes.push_back("ratio: " + format_number(rep.ratio));
    if (!rep.breakdown.empty()) out.notes.push_back("breakdown: " + rep.breakdown);
    out.tables.push_back(convergence_table(rep.errors));
    return out;
}

inline RunOutput run_network(const Scenario& s) {
    RunOutput out;
    Network net(s.network, s.seed);
    std::vector<int> dests;
    for (const auto& z : s.network.zones)
        if (z.role == ZoneRole::Destination) dests.push_back(z.id);
    CsvTable zones, links;
    zones.name = "zones";
    zones.columns = {"step", "t", "zone", "count"};
    for (int d : dests) zones.columns.push_back("dest_" + std::to_string(d));
    links.name = "connectors";
    links.columns = {"step", "t", "connector", "from", "to", "vehicles"};
    double min_length = std::numeric_limits<double>::infinity();
    for (const auto& z : s.network.zones)
        if (z.role == ZoneRole::Interior) min_length = std::min(min_length, z.length);
    double max_residual = 0.0;
    for (int k = 1; k <= s.network.steps; ++k) {
        net.step();
        max_residual = std::max(max_residual, std::abs(net.conservation_residual()));
        if (k % s.output_every != 0 && k != s.network.steps) continue;
        const double t = k * s.network.dt;
        for (const auto& z : net.zones()) {
            std::vector<std::string> row{std::to_string(k), format_number(t), std::to_string(z.spec.id)};
            if (z.spec.role == ZoneRole::Destination) {
                row.push_back(format_number(net.sink_count(z.spec.id)));
                for (std::size_t i = 0; i < dests.size(); ++i)
                    row.push_back(format_number(dests[i] == z.spec.id ? net.sink_count(z.spec.id) : 0.0));
            } else if (z.spec.role == ZoneRole::Origin) {
                std::map<int, double> backlog;
                double total = 0.0;
                for (const auto& p : z.queue) {
                    backlog[p.destination] += p.count;
                    total += p.count;
                }
                row.push_back(format_number(total));
                for (int d : dests) row.push_back(format_number(backlog[d]));
            } else {
                row.push_back(format_number(z.count));
                for (int d : dests) {
                    auto it = z.by_destination.find(d);
                    row.push_back(format_number(it == z.by_destination.end() ? 0.0 : it->second));
                }
            }
            zones.rows.push_back(std::move(row));
        }
        for (const auto& f : net.last_flows()) links.add(k, t, f.connector, f.from, f.to, f.vehicles);
    }
    out.notes.push_back("cfl: " + (std::isfinite(min_length) ? format_number(network_cfl(s.network.fd, s.network.dt, min_length)) : "none"));
    out.notes.push_back("rng: std::mt19937_64 seed " + std::to_string(s.seed));
    out.notes.push_back("max_conservation_residual: " + format_number(max_residual));
    out.tables.push_back(std::move(zones));
    out.tables.push_back(std::move(links));
    return out;
}

inline RunOutput run_scenario(const Scenario& s) {
    switch (s.command) {
        case Command::Riemann: return run_riemann(s);
        case Command::Simulate: return run_simulate(s);
        case Command::Converge: return run_converge(s);
        case Command::Stability: return run_stability(s);
        case Command::Network: return run_network(s);
    }
    return {};
}

}  // namespace traffic
