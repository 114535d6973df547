#include <gtest/gtest.h>

#include <random>

#include "traffic/lwr.hpp"
#include "traffic/resonant.hpp"

using namespace traffic;

namespace {

// Greenshields with v_f = rho_j = 1: f(a, rho) = rho (1 - rho / a), alpha = 1/2, capacity a / 4.
const FundamentalDiagram kGs = FundamentalDiagram::greenshields(1.0, 1.0);

struct CaseRow {
    ResonantState ul, ur;
    int case_id;
    double flux;
};

void check_solution(const ResonantSolution& sol, const ResonantState& ul, const ResonantState& ur, const LaneFlux& lf) {
    double last = -std::numeric_limits<double>::infinity();
    for (const auto& w : sol.waves) {
        ASSERT_GE(w.speed_lo, last - 1e-12) << "case " << sol.case_id;
        ASSERT_GE(w.speed_hi, w.speed_lo - 1e-12);
        last = w.speed_hi;
        if (w.kind == ResonantWaveKind::Standing) {
            const double scale = std::max(1.0, lf.fmax(std::max(w.left.a, w.right.a)));
            ASSERT_NEAR(lf.flux(w.left), lf.flux(w.right), 1e-10 * scale) << "case " << sol.case_id;
            const double dl = w.left.rho / w.left.a - lf.cp.alpha, dr = w.right.rho / w.right.a - lf.cp.alpha;
            const bool on_gamma = std::abs(dl) < 1e-9 || std::abs(dr) < 1e-9;
            ASSERT_TRUE(on_gamma || (dl > 0) == (dr > 0)) << "standing wave crosses the critical curve, case "
                                                          << sol.case_id;
        }
    }
    if (!sol.waves.empty()) {
        EXPECT_EQ(sol.waves.front().left, ul);
        EXPECT_EQ(sol.waves.back().right, ur);
    }
}

}  // namespace

TEST(Resonant, TenCaseTable) {
    const std::vector<CaseRow> rows{
        {{1, 0.4}, {1, 0.1}, 1, 0.24},  {{1, 0.1}, {1, 0.4}, 2, 0.09},  {{1, 0.4}, {1, 0.9}, 3, 0.09},
        {{2, 0.8}, {1, 0.1}, 4, 0.25},  {{1, 0.8}, {2, 0.2}, 5, 0.25},  {{1, 0.8}, {2, 0.6}, 6, 0.25},
        {{1, 0.8}, {1, 0.7}, 7, 0.21},  {{1, 0.7}, {1, 0.8}, 8, 0.16},  {{2, 1.8}, {1, 0.3}, 9, 0.25},
        {{2, 1.6}, {1, 0.3}, 10, 0.25},
    };
    const LaneFlux lf(kGs);
    for (const auto& r : rows) {
        const auto sol = classify(r.ul, r.ur, lf);
        EXPECT_EQ(sol.case_id, r.case_id);
        EXPECT_NEAR(sol.boundary_flux, r.flux, 1e-14) << "case " << r.case_id;
        EXPECT_NEAR(boundary_flux(r.ul, r.ur, lf), r.flux, 1e-14) << "case " << r.case_id;
        check_solution(sol, r.ul, r.ur, lf);
    }
}

TEST(Resonant, TableFluxByCase) {
    // Types 1,2 -> f(U_L); 3,7,8 -> f(U_R); 4,9,10 -> f_R^max; 5,6 -> f_L^max.
    const LaneFlux lf(FundamentalDiagram::newell_normalized());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0), A(0.5, 4.0);
    for (int i = 0; i < 10000; ++i) {
        const ResonantState ul{A(rng), 0}, ur{A(rng), 0};
        const ResonantState l{ul.a, ul.a * U(rng)}, r{ur.a, ur.a * U(rng)};
        const auto sol = classify(l, r, lf);
        double want = 0.0;
        switch (sol.case_id) {
            case 1:
            case 2: want = lf.flux(l); break;
            case 3:
            case 7:
            case 8: want = lf.flux(r); break;
            case 4:
            case 9:
            case 10: want = lf.fmax(r.a); break;
            case 5:
            case 6: want = lf.fmax(l.a); break;
            default: FAIL() << "case id " << sol.case_id;
        }
        ASSERT_NEAR(sol.boundary_flux, want, 1e-12);
        check_solution(sol, l, r, lf);
    }
}

TEST(Resonant, IdentityGivesZeroStrengthWaves) {
    const ResonantState u{2.0, 0.6};
    const auto sol = classify(u, u, kGs);
    EXPECT_NEAR(sol.boundary_flux, LaneFlux(kGs).flux(u), 1e-15);
}

TEST(Resonant, DemandSupplyOnGamma) {
    const LaneFlux lf(kGs);
    const ResonantState u{3.0, 1.5};
    EXPECT_DOUBLE_EQ(lf.demand(u), lf.fmax(3.0));
    EXPECT_DOUBLE_EQ(lf.supply(u), lf.fmax(3.0));
    const ResonantState under{3.0, 0.6};
    EXPECT_LT(lf.demand(under), lf.fmax(3.0));
}

TEST(Resonant, PerLaneScaling) {
    const LaneFlux lf(FundamentalDiagram::newell(60.0, -10.0, 250.0));
    EXPECT_NEAR(lf.fmax(3.0), 3.0 * lf.fmax(1.0), 1e-12);
    EXPECT_NEAR(lf.flux({3.0, 180.0}), 3.0 * f_star(lf.fd, 60.0), 1e-9);
}

TEST(Resonant, CrossSolverGrid) {
    const LaneFlux lf(FundamentalDiagram::newell_normalized());
    double worst = 0.0;
    for (double ratio : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double al = 1.0, ar = ratio;
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 100; ++j) {
                const ResonantState l{al, al * (i + 0.5) / 100.0}, r{ar, ar * (j + 0.5) / 100.0};
                worst = std::max(worst, std::abs(boundary_flux(l, r, lf) - classify(l, r, lf).boundary_flux));
            }
        }
    }
    EXPECT_LT(worst, 1e-10);
}

TEST(Resonant, HomogeneousReduction) {
    const auto fd = FundamentalDiagram::newell_normalized();
    const LaneFlux lf(fd);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double l = U(rng), r = U(rng);
        ASSERT_EQ(boundary_flux({1.0, l}, {1.0, r}, lf), demand_supply_flux(l, r, fd, lf.cp));
    }
}

// Lebacque's conditions, one expression per row.
TEST(Resonant, LebacqueComparisonRows) {
    const LaneFlux lf(FundamentalDiagram::newell_normalized());
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> A(0.5, 4.0), Uc(0.0, 1.0);
    int seen[8] = {};
    for (int i = 0; i < 20000; ++i) {
        const double al = A(rng), ar = A(rng);
        const ResonantState l{al, al * Uc(rng)}, r{ar, ar * Uc(rng)};
        const bool l_oc = l.rho / l.a > lf.cp.alpha, r_oc = r.rho / r.a > lf.cp.alpha;
        const double fl = lf.flux(l), fr = lf.flux(r), fmax_l = lf.fmax(al), fmax_r = lf.fmax(ar);
        const int row = (al <= ar ? 0 : 4) + (l_oc ? 2 : 0) + (r_oc ? 1 : 0);
        double want = 0.0;
        switch (row) {
            case 0: want = fl; break;
            case 1: want = std::min(fl, fr); break;
            case 2: want = fmax_l; break;
            case 3: want = std::min(fmax_l, fr); break;
            case 4: want = std::min(fmax_r, fl); break;
            case 5: want = std::min(fl, fr); break;
            case 6: want = fmax_r; break;
            case 7: want = fr; break;
        }
        ++seen[row];
        ASSERT_NEAR(boundary_flux(l, r, lf), want, 1e-12) << "row " << row;
    }
    for (int k = 0; k < 8; ++k) EXPECT_GT(seen[k], 0) << "row " << k;
}

TEST(Resonant, InfeasibleIntermediateIsReported) {
    const LaneFlux lf(kGs);
    EXPECT_THROW(lf.solve_density(1.0, 0.3, false), RootBracketError);
}
