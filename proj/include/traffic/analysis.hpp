#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "traffic/errors.hpp"
#include "traffic/godunov.hpp"

namespace traffic {

enum class NormKind { L1, L2, Linf };

inline const char* to_string(NormKind k) {
    switch (k) {
        case NormKind::L1: return "L1";
        case NormKind::L2: return "L2";
        case NormKind::Linf: return "Linf";
    }
    return "?";
}

/// Averages pairs of the fine solution onto the coarse grid and subtracts the coarse solution.
inline std::vector<double> coarsen_diff(const std::vector<double>& fine, const std::vector<double>& coarse) {
    if (fine.size() != 2 * coarse.size())
        throw LengthMismatchError("fine grid has " + std::to_string(fine.size()) + " cells, coarse has " +
                                  std::to_string(coarse.size()));
    std::vector<double> e(coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) e[i] = 0.5 * (fine[2 * i] + fine[2 * i + 1]) - coarse[i];
    return e;
}

/// Mean-normalised norms, so values are comparable across grids.
inline double norm(const std::vector<double>& e, NormKind k) {
    if (e.empty()) throw EmptyVectorError("norm of an empty vector");
    double acc = 0.0;
    for (double x : e) {
        switch (k) {
            case NormKind::L1: acc += std::abs(x); break;
            case NormKind::L2: acc += x * x; break;
            case NormKind::Linf: acc = std::max(acc, std::abs(x)); break;
        }
    }
    if (k == NormKind::L1) return acc / e.size();
    if (k == NormKind::L2) return std::sqrt(acc / e.size());
    return acc;
}

inline double convergence_rate(double eps_coarse, double eps_fine) {
    if (!(eps_coarse > 0.0) || !(eps_fine > 0.0)) throw NonPositiveError("convergence rate needs positive errors");
    return std::log2(eps_coarse / eps_fine);
}

struct ConvergenceRow {
    int n_coarse = 0;  ///< the pair is (2 n_coarse, n_coarse)
    std::string field;
    NormKind norm = NormKind::L1;
    double eps = 0.0;
    double rate = NAN;  ///< against the previous pair; NaN for the first
};

struct ConvergenceReport {
    std::vector<int> grids;
    std::vector<ConvergenceRow> rows;

    double eps(int n_coarse, const std::string& field, NormKind k) const {
        for (const auto& r : rows)
            if (r.n_coarse == n_coarse && r.field == field && r.norm == k) return r.eps;
        return NAN;
    }
    std::vector<double> rates(const std::string& field, NormKind k) const {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.field == field && r.norm == k && !std::isnan(r.rate)) out.push_back(r.rate);
        return out;
    }
    std::vector<double> errors(const std::string& field, NormKind k) const {
        std::vector<double> out;
        for (const auto& r : rows)
            if (r.field == field && r.norm == k) out.push_back(r.eps);
        return out;
    }
};

using SolveAtGrid = std::function<Snapshot(int n_cells)>;

/// Self-convergence over successively doubled grids.
inline ConvergenceReport run_convergence(const SolveAtGrid& solve, std::vector<int> grids) {
    std::sort(grids.begin(), grids.end());
    if (grids.size() < 2) throw ValidationError("convergence needs at least two grids");
    for (std::size_t i = 1; i < grids.size(); ++i)
        if (grids[i] != 2 * grids[i - 1]) throw ValidationError("grids must double at every level");
    std::vector<Snapshot> sols;
    for (int n : grids) sols.push_back(solve(n));
    ConvergenceReport rep;
    rep.grids = grids;
    const bool has_v = !sols.front().v.empty();
    for (NormKind k : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
        for (const std::string field : {"rho", "v"}) {
            if (field == "v" && !has_v) continue;
            double prev = NAN;
            for (std::size_t i = 0; i + 1 < sols.size(); ++i) {
                const auto& c = field == "rho" ? sols[i].rho : sols[i].v;
                const auto& f = field == "rho" ? sols[i + 1].rho : sols[i + 1].v;
                ConvergenceRow row;
                row.n_coarse = grids[i];
                row.field = field;
                row.norm = k;
                row.eps = norm(coarsen_diff(f, c), k);
                if (!std::isnan(prev) && prev > 0.0 && row.eps > 0.0) row.rate = convergence_rate(prev, row.eps);
                prev = row.eps;
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

enum class StabilityVerdict { Stable, Unstable };

inline const char* to_string(StabilityVerdict v) { return v == StabilityVerdict::Stable ? "Stable" : "Unstable"; }

struct StabilityReport {
    StabilityVerdict verdict = StabilityVerdict::Unstable;
    ConvergenceReport errors;
    double ratio = NAN;  ///< finest-pair L1(rho) error over the previous pair
    double band = 0.05;
    std::string breakdown;  ///< error text when a run failed outright
};

/// Numerically stable when the rho L1 self-convergence error shrinks under refinement by
/// more than the hysteresis band.
inline StabilityReport stability_probe(const SolveAtGrid& solve, std::vector<int> grids = {512, 1024, 2048},
                                       double band = 0.05) {
    StabilityReport rep;
    rep.band = band;
    // a run that blows up (vacuum or density past jam) is the unstable outcome, not a harness failure
    try {
        rep.errors = run_convergence(solve, std::move(grids));
    } catch (const Error& e) {
        if (e.error_class() != "VacuumError" && e.error_class() != "DomainError") throw;
        rep.breakdown = e.error_class() + ": " + e.what();
        return rep;
    }
    const auto e = rep.errors.errors("rho", NormKind::L1);
    rep.ratio = e[e.size() - 1] / e[e.size() - 2];
    rep.verdict = rep.ratio < 1.0 - band ? StabilityVerdict::Stable : StabilityVerdict::Unstable;
    return rep;
}

}  // namespace traffic
