// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.
// Exit status is 0 when the failing set equals --known-fail (default: empty).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "traffic/cli.hpp"

using namespace traffic;

namespace {

// ---------------------------------------------------------------- pinned tolerances

constexpr int kC1Problems = 1000;
constexpr int kC1Cells = 1024;
constexpr double kC1Time = 0.4;
constexpr double kC1L1Cells = 2.0;     // L1 error below 2 dx
constexpr double kC1FrontCells = 1.0;  // shock front within 1 cell of s t
constexpr int kC2States = 100;
constexpr double kC2Tol = 1e-10;
constexpr double kC3FirstLo = 0.85, kC3FirstHi = 1.1;
constexpr double kC3SecondLo = 0.9, kC3SecondHi = 1.35;
constexpr double kC3ErrorFactor = 3.0;
constexpr double kC4BoundsTol = 0.002;
constexpr double kC5FirstRate = 0.97, kC5FirstTol = 0.15;
constexpr double kC6Cfl = 0.8444;  // compared after rounding to 4 decimals
constexpr double kC6Flux = 12.0, kC6FluxTol = 0.5;
constexpr double kC7Residual = 1e-8;
constexpr int kC7JamStep = 60, kC7JamTol = 15;
constexpr double kC7JamFraction = 0.99;  // "reaches jam density": lane density at least 0.99 rho_j

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string join(const std::vector<double>& v, int digits = 4) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i], digits);
    return s + "]";
}

Scenario bundled(const std::string& name) { return load_scenario(TRAFFIC_SCENARIO_DIR "/" + name); }

ConvergenceReport converge(const Scenario& s) {
    return run_convergence([&](int n) { return simulate(s, n).back(); }, s.grids);
}

bool all_in(const std::vector<double>& v, double lo, double hi) {
    for (double x : v)
        if (!(x >= lo && x <= hi)) return false;
    return !v.empty();
}

// ---------------------------------------------------------------- 1. LWR exactness

Outcome lwr_exactness() {
    const auto fd = FundamentalDiagram::newell_normalized();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst_l1 = 0.0, worst_front = 0.0;
    int l1_fail = 0, front_fail = 0, shocks = 0;
    SimulationConfig<LwrModel, double> c;
    c.model = {fd};
    c.grid.x_min = -1.0;
    c.grid.x_max = 1.0;
    c.grid.n_cells = kC1Cells;
    c.t_end = kC1Time;
    const double dx = c.grid.dx();
    for (int k = 0; k < kC1Problems; ++k) {
        const double l = U(rng), r = U(rng);
        c.initial.assign(kC1Cells, 0.0);
        for (int i = 0; i < kC1Cells; ++i) c.initial[i] = c.grid.center(i) < 0.0 ? l : r;
        const auto snap = run_simulation(c).back();
        const auto exact = solve_riemann({l, r, fd});
        double l1 = 0.0;
        for (int i = 0; i < kC1Cells; ++i)
            l1 += std::abs(snap.rho[i] - sample_solution(exact, c.grid.center(i) / kC1Time)) * dx;
        worst_l1 = std::max(worst_l1, l1 / dx);
        if (!(l1 < kC1L1Cells * dx)) ++l1_fail;
        if (exact.kind == ScalarWaveKind::Shock && std::abs(r - l) > 1e-3) {
            ++shocks;
            // front: first cell past the mid value, interpolated to the crossing point
            const double mid = 0.5 * (l + r);
            double front = NAN;
            for (int i = 0; i + 1 < kC1Cells; ++i) {
                const double a = snap.rho[i] - mid, b = snap.rho[i + 1] - mid;
                if ((a <= 0.0) != (b <= 0.0)) {
                    front = c.grid.center(i) + dx * a / (a - b);
                    break;
                }
            }
            const double off = std::abs(front - exact.shock_speed * kC1Time) / dx;
            worst_front = std::max(worst_front, std::isnan(off) ? INFINITY : off);
            if (!(off <= kC1FrontCells)) ++front_fail;
        }
    }
    Outcome o;
    o.pass = l1_fail == 0 && front_fail == 0;
    o.detail = std::to_string(kC1Problems) + " problems, worst L1 " + fmt(worst_l1) + " dx (limit " +
               fmt(kC1L1Cells) + "), " + std::to_string(shocks) + " shocks, worst front offset " +
               fmt(worst_front) + " cells (limit " + fmt(kC1FrontCells) + ")";
    return o;
}

// ---------------------------------------------------------------- 2. flux equivalence

Outcome flux_equivalence() {
    const LaneFlux lf(FundamentalDiagram::newell_normalized());
    double worst = 0.0;
    long count = 0;
    for (double ratio : {0.5, 0.75, 1.0, 1.5, 2.0}) {
        const double al = 2.0, ar = 2.0 * ratio;
        for (int i = 0; i < kC2States; ++i) {
            for (int j = 0; j < kC2States; ++j) {
                const ResonantState ul{al, al * (i + 0.5) / kC2States}, ur{ar, ar * (j + 0.5) / kC2States};
                const double ds = std::min(lf.demand(ul), lf.supply(ur));
                worst = std::max(worst, std::abs(classify(ul, ur, lf).boundary_flux - ds));
                ++count;
            }
        }
    }
    return {worst < kC2Tol, std::to_string(count) + " state pairs, max |classifier - min(D, S)| = " + fmt(worst, 3) +
                                " (limit " + fmt(kC2Tol, 3) + ")"};
}

// ---------------------------------------------------------------- 3. Zhang convergence

Outcome zhang_convergence() {
    // L1 errors printed in the published tables, pairs 128-64 .. 1024-512
    const std::vector<double> first_rho{3.43e-3, 1.75e-3, 8.84e-4, 4.44e-4}, first_v{4.83e-3, 2.46e-3, 1.24e-3, 6.25e-4};
    const std::vector<double> second_rho{5.81e-3, 2.98e-3, 1.46e-3, 7.06e-4}, second_v{8.24e-3, 4.20e-3, 2.05e-3, 9.93e-4};
    const auto r1 = converge(bundled("zhang_first_order.ini"));
    const auto r2 = converge(bundled("zhang_second_order.ini"));
    const auto rates1 = r1.rates("rho", NormKind::L1);
    auto rates2 = r2.rates("rho", NormKind::L1);
    const auto rates2v = r2.rates("v", NormKind::L1);
    rates2.insert(rates2.end(), rates2v.begin(), rates2v.end());
    const bool ok1 = all_in(rates1, kC3FirstLo, kC3FirstHi);
    const bool ok2 = all_in(rates2, kC3SecondLo, kC3SecondHi);
    double worst_factor = 0.0;
    auto factors = [&](const std::vector<double>& ours, const std::vector<double>& paper) {
        for (std::size_t i = 0; i < paper.size() && i < ours.size(); ++i)
            worst_factor = std::max(worst_factor, std::max(ours[i] / paper[i], paper[i] / ours[i]));
    };
    factors(r1.errors("rho", NormKind::L1), first_rho);
    factors(r1.errors("v", NormKind::L1), first_v);
    factors(r2.errors("rho", NormKind::L1), second_rho);
    factors(r2.errors("v", NormKind::L1), second_v);
    const bool ok3 = worst_factor <= kC3ErrorFactor;
    std::string d = "first-order rho L1 rates " + join(rates1) + " in [" + fmt(kC3FirstLo) + ", " + fmt(kC3FirstHi) +
                    "]: " + (ok1 ? "yes" : "no") + "; second-order L1 rates (rho, v) " + join(rates2) + " in [" +
                    fmt(kC3SecondLo) + ", " + fmt(kC3SecondHi) + "]: " + (ok2 ? "yes" : "no") +
                    "; worst error factor vs printed " + fmt(worst_factor, 3) + " (limit " + fmt(kC3ErrorFactor) +
                    "); first rho eps " + join(r1.errors("rho", NormKind::L1), 3) + ", second rho eps " +
                    join(r2.errors("rho", NormKind::L1), 3);
    return {ok1 && ok2 && ok3, d};
}

// ---------------------------------------------------------------- 4. PW stability

Outcome pw_stability() {
    std::string d;
    bool ok = true;
    for (const char* bc : {"periodic", "neumann"}) {
        for (const char* level : {"016", "017"}) {
            const auto s = bundled(std::string("pw_stability_") + level + "_" + bc + ".ini");
            const auto rep = stability_probe([&](int n) { return simulate(s, n).back(); }, s.grids, s.band);
            const bool want_stable = std::string(level) == "016";
            const bool good = (rep.verdict == StabilityVerdict::Stable) == want_stable;
            ok = ok && good;
            d += std::string("rho_h=0.") + (level + 1) + " " + bc + ": " + to_string(rep.verdict) +
                 (rep.breakdown.empty() ? " ratio " + fmt(rep.ratio, 3) : " (" + rep.breakdown.substr(0, 60) + ")") +
                 "; ";
        }
    }
    const auto fd = FundamentalDiagram::kerner();
    const auto b = pw_stability_bounds(fd, 2.48445);
    const bool ok_b = b && std::abs(b->first - 0.173) <= kC4BoundsTol && std::abs(b->second - 0.396) <= kC4BoundsTol;
    d += "bounds " + (b ? "(" + fmt(b->first, 5) + ", " + fmt(b->second, 5) + ")" : std::string("none")) +
         " vs (0.173, 0.396) +- " + fmt(kC4BoundsTol);
    return {ok && ok_b, d};
}

// ---------------------------------------------------------------- 5. PW schemes

Outcome pw_schemes() {
    const auto first = converge(bundled("pw_first_order.ini"));
    const auto frac = converge(bundled("pw_fractional.ini"));
    const auto lev = converge(bundled("pw_leveque.ini"));
    const auto r1 = first.rates("rho", NormKind::L1);
    const bool ok1 = all_in(r1, kC5FirstRate - kC5FirstTol, kC5FirstRate + kC5FirstTol);
    double min_frac = INFINITY;
    for (const auto& row : frac.rows)
        if (!std::isnan(row.rate)) min_frac = std::min(min_frac, row.rate);
    const bool ok2 = min_frac < 0.0;
    const auto lr = lev.rates("rho", NormKind::L1), lv = lev.rates("v", NormKind::L1);
    bool ok3 = !lr.empty() && lr.size() == lv.size();
    for (std::size_t i = 0; ok3 && i < lr.size(); ++i) ok3 = lv[i] < lr[i];
    std::string d = "first-order rho L1 rates " + join(r1) + " within " + fmt(kC5FirstRate) + " +- " +
                    fmt(kC5FirstTol) + ": " + (ok1 ? "yes" : "no") + "; fractional min rate over all fields/norms " +
                    fmt(min_frac) + " (needs < 0): " + (ok2 ? "yes" : "no") + "; LeVeque L1 rates rho " + join(lr) +
                    " v " + join(lv) + " (v must be lower): " + (ok3 ? "yes" : "no");
    return {ok1 && ok2 && ok3, d};
}

// ---------------------------------------------------------------- 6. CFL and boundary flux

Outcome cfl_reproduction() {
    const auto s = bundled("network_freeway.ini");
    const double cfl = network_cfl(s.network.fd, s.network.dt, 0.6);
    const double rounded = std::round(cfl * 1e4) / 1e4;
    const LaneFlux lf(s.network.fd);
    const double per_lane = lf.fmax(1.0) * s.network.dt;
    const bool ok_cfl = rounded == kC6Cfl;
    const bool ok_flux = std::abs(per_lane - kC6Flux) < kC6FluxTol;
    return {ok_cfl && ok_flux, "CFL " + fmt(cfl, 6) + " (rounded " + fmt(rounded, 4) + ", expected " + fmt(kC6Cfl) +
                                   "); max flux per lane per step " + fmt(per_lane) + " (expected " + fmt(kC6Flux) +
                                   " +- " + fmt(kC6FluxTol) + ")"};
}

// ---------------------------------------------------------------- 7. network conservation

Outcome network_conservation() {
    const auto s = bundled("network_freeway.ini");
    Network net(s.network, s.seed);
    const auto& fd = s.network.fd;
    const double alpha = capacity_point(fd).alpha;
    double worst = 0.0, peak = 0.0;
    int jam_step = -1, congested_step = -1;
    for (int k = 1; k <= s.network.steps; ++k) {
        net.step();
        worst = std::max(worst, std::abs(net.conservation_residual()));
        const double rho = net.lane_density(net.zone(2));
        peak = std::max(peak, rho);
        if (congested_step < 0 && rho > alpha) congested_step = k;
        if (jam_step < 0 && rho >= kC7JamFraction * max_density(fd)) jam_step = k;
    }
    const bool ok_res = worst < kC7Residual;
    const bool ok_jam = jam_step >= kC7JamStep - kC7JamTol && jam_step <= kC7JamStep + kC7JamTol;
    const double leaked = net.crossed(19, 19, 23);
    const bool ok_route = leaked == 0.0 && net.crossed(19, 23, 23) > 0.0;
    std::string d = "max residual " + fmt(worst, 3) + " (limit " + fmt(kC7Residual, 3) + "); zone 2 reaches " +
                    fmt(kC7JamFraction) + " rho_j at step " + (jam_step < 0 ? std::string("never") : std::to_string(jam_step)) +
                    " (expected " + std::to_string(kC7JamStep) + " +- " + std::to_string(kC7JamTol) +
                    "), peak lane density " + fmt(peak) + ", overcritical from step " + std::to_string(congested_step) +
                    "; dest-23 vehicles past connector 19 on the mainline " + fmt(leaked) + ", via the off-ramp " +
                    fmt(net.crossed(19, 23, 23));
    return {ok_res && ok_jam && ok_route, d};
}

// ---------------------------------------------------------------- 8. property suites

Outcome property_suites() {
    std::vector<std::string> bins;
    std::stringstream in(TRAFFIC_UNIT_TESTS);
    for (std::string b; std::getline(in, b, '|');)
        if (!b.empty()) bins.push_back(b);
    std::string failed;
    for (const auto& b : bins) {
        const std::string cmd = "\"" + b + "\" --gtest_brief=1 > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) failed += " " + b.substr(b.find_last_of('/') + 1);
    }
    return {failed.empty() && !bins.empty(),
            std::to_string(bins.size()) + " suites run" + (failed.empty() ? std::string(", all green") : ", failing:" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known, only;
    auto parse_list = [](const std::string& s, std::set<int>& out) {
        std::stringstream in(s);
        for (std::string x; std::getline(in, x, ',');)
            if (!x.empty()) out.insert(std::stoi(x));
    };
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--known-fail" && i + 1 < argc) parse_list(argv[++i], known);
        else if (a == "--only" && i + 1 < argc) parse_list(argv[++i], only);
        else {
            std::fprintf(stderr, "usage: acceptance [--known-fail 3,5] [--only 1,2]\n");
            return 2;
        }
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"LWR exactness", lwr_exactness},
        {"flux-formula equivalence", flux_equivalence},
        {"Zhang convergence", zhang_convergence},
        {"PW stability threshold", pw_stability},
        {"PW scheme comparison", pw_schemes},
        {"CFL reproduction", cfl_reproduction},
        {"network conservation", network_conservation},
        {"property suites", property_suites},
    };
    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) failed.insert(id);
        std::printf("%s %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::set<int> expected;
    for (int k : known)
        if (only.empty() || only.count(k)) expected.insert(k);
    if (failed == expected) {
        if (!failed.empty()) std::printf("failing criteria match the documented known set\n");
        return 0;
    }
    std::printf("failing set differs from the documented known set\n");
    return 1;
}
