#include <gtest/gtest.h>

#include <set>

#include "traffic/network.hpp"
#include "traffic/scenario.hpp"

using namespace traffic;

namespace {

const FundamentalDiagram kFreeway = FundamentalDiagram::newell(60.0, -10.0, 250.0);
constexpr double kDt = 30.0 / 3600.0;

ZoneSpec interior(int id, double lanes, double length = 0.6) {
    ZoneSpec z;
    z.id = id;
    z.lanes = lanes;
    z.length = length;
    return z;
}

ZoneSpec origin(int id, double lanes, std::vector<Platoon> platoons, bool jammed = true, double rate = 0.0) {
    ZoneSpec z = interior(id, lanes);
    z.role = ZoneRole::Origin;
    z.platoons = std::move(platoons);
    z.jammed = jammed;
    z.arrival_rate = rate;
    return z;
}

ZoneSpec sink(int id, double lanes = 3) {
    ZoneSpec z = interior(id, lanes);
    z.role = ZoneRole::Destination;
    return z;
}

ConnectorSpec link(int id, std::vector<int> up, std::vector<int> down) {
    ConnectorSpec c;
    c.id = id;
    c.upstream = std::move(up);
    c.downstream = std::move(down);
    return c;
}

NetworkSpec spec_of(std::vector<ZoneSpec> zones, std::vector<ConnectorSpec> connectors) {
    NetworkSpec s;
    s.fd = kFreeway;
    s.dt = kDt;
    s.zones = std::move(zones);
    s.connectors = std::move(connectors);
    return s;
}

double flow(const Network& n, int connector, int to) {
    double f = 0.0;
    for (const auto& c : n.last_flows())
        if (c.connector == connector && c.to == to) f += c.vehicles;
    return f;
}

// Two-level consistency, FIFO order, positivity and the jam bound for every interior zone.
void check_zones(const Network& n) {
    for (const auto& z : n.zones()) {
        if (z.spec.role != ZoneRole::Interior) continue;
        double q = 0.0, d = 0.0;
        long seq = std::numeric_limits<long>::min();
        for (const auto& p : z.queue) {
            ASSERT_GT(p.count, 0.0);
            ASSERT_GE(p.entry_seq, seq) << "zone " << z.spec.id;
            seq = p.entry_seq;
            q += p.count;
        }
        for (const auto& [dest, c] : z.by_destination) d += c;
        ASSERT_NEAR(z.count, q, 1e-9) << "zone " << z.spec.id;
        ASSERT_NEAR(z.count, d, 1e-9) << "zone " << z.spec.id;
        ASSERT_LE(z.count, 250.0 * z.spec.lanes * z.spec.length * (1.0 + 1e-9));
    }
}

NetworkSpec freeway() { return load_scenario(TRAFFIC_SCENARIO_DIR "/network_freeway.ini").network; }

}  // namespace

TEST(Network, UpdateZoneCounts) {
    EXPECT_EQ(update_zone_counts(10, 0, 0), 10);
    EXPECT_EQ(update_zone_counts(10, 3, 2), 11);
    EXPECT_THROW(update_zone_counts(1, 0, 2), NegativeCountError);
}

TEST(Network, Cfl) {
    EXPECT_NEAR(network_cfl(kFreeway, kDt, 0.6), 60.0 * kDt / 0.6, 1e-12);
    auto s = spec_of({origin(0, 3, {{9, 1}}), interior(1, 3), sink(9)}, {link(1, {0}, {1}), link(2, {1}, {9})});
    s.dt = 0.02;
    EXPECT_THROW(Network(s, 1), CflViolation);
}

TEST(Network, ConstructionErrors) {
    auto bad = spec_of({origin(0, 1, {{9, 1}}), origin(1, 1, {{9, 1}}), interior(2, 1), sink(9)},
                       {link(1, {0, 1}, {2}), link(2, {2}, {9})});
    bad.connectors[0].merge_fractions = {0.5, 0.6};
    EXPECT_THROW(Network(bad, 1), FractionSumError);
    auto lost = spec_of({origin(0, 1, {{7, 1}}), interior(1, 1), sink(9)}, {link(1, {0}, {1}), link(2, {1}, {9})});
    EXPECT_THROW(Network(lost, 1), UnroutableError);
}

TEST(Network, ZeroDemandIsStatic) {
    auto s = spec_of({origin(0, 3, {{9, 5}}, false, 0.0), interior(1, 3), sink(9)},
                     {link(1, {0}, {1}), link(2, {1}, {9})});
    Network n(s, 4);
    for (int k = 0; k < 50; ++k) {
        n.step();
        for (const auto& f : n.last_flows()) ASSERT_EQ(f.vehicles, 0.0);
    }
    EXPECT_EQ(n.zone(1).count, 0.0);
    EXPECT_EQ(n.cumulative_input(), 0.0);
}

TEST(Network, DemandAtSixtyPerLane) {
    // a full step of flow out of a lone zone is dt times its demand
    auto s = spec_of({origin(0, 3, {{9, 1}}, false, 0.0), interior(1, 3), sink(9)},
                     {link(1, {0}, {1}), link(2, {1}, {9})});
    const LaneFlux lf(kFreeway);
    EXPECT_NEAR(lf.demand({3.0, 180.0}), 3.0 * 1476.0, 3.0);
    EXPECT_NEAR(lf.supply({3.0, 0.0}), lf.fmax(3.0), 1e-9);
    // a jammed zone still offers its capacity downstream; only its supply vanishes
    EXPECT_NEAR(lf.demand({3.0, 750.0}), lf.fmax(3.0), 1e-9);
    EXPECT_NEAR(lf.supply({3.0, 750.0}), 0.0, 1e-9);
    EXPECT_NEAR(lf.fmax(1.0) * kDt, 12.3, 0.05);
}

TEST(Network, LaneDropCapacity) {
    auto s = spec_of({origin(0, 3, {{9, 10}}), interior(1, 3), interior(2, 1), sink(9, 1)},
                     {link(1, {0}, {1}), link(2, {1}, {2}), link(3, {2}, {9})});
    Network n(s, 2);
    const LaneFlux lf(kFreeway);
    for (int k = 0; k < 400; ++k) n.step();
    EXPECT_NEAR(flow(n, 2, 2), lf.fmax(1.0) * kDt, 1e-9);
    // the one-lane zone approaches critical density from below
    EXPECT_NEAR(flow(n, 3, 9), lf.fmax(1.0) * kDt, 1e-2);
    EXPECT_GT(n.lane_density(n.zone(1)), lf.cp.alpha);
    EXPECT_LT(n.conservation_residual(), 1e-8);
}

TEST(Network, MergeSplitsSupply) {
    auto s = spec_of({origin(0, 1, {{9, 10}}), origin(1, 3, {{9, 10}}), interior(2, 1), sink(9, 1)},
                     {link(1, {0, 1}, {2}), link(2, {2}, {9})});
    Network n(s, 3);
    n.step();
    const LaneFlux lf(kFreeway);
    const double supply = lf.fmax(1.0) * kDt;
    double from0 = 0, from1 = 0;
    for (const auto& f : n.last_flows()) {
        if (f.connector != 1) continue;
        (f.from == 0 ? from0 : from1) += f.vehicles;
    }
    EXPECT_NEAR(from0, 0.25 * supply, 1e-12);
    EXPECT_NEAR(from1, 0.75 * supply, 1e-12);
}

TEST(Network, MergeTieBreakIsSeeded) {
    auto s = spec_of({origin(0, 1, {{8, 3}, {9, 3}}), origin(1, 1, {{9, 3}, {8, 3}}), interior(2, 2), sink(8, 1),
                      sink(9, 1)},
                     {link(1, {0, 1}, {2}), link(2, {2}, {8, 9})});
    auto order = [&](std::uint64_t seed) {
        Network n(s, seed);
        for (int k = 0; k < 6; ++k) n.step();
        std::vector<std::pair<int, double>> q;
        for (const auto& p : n.zone(2).queue) q.emplace_back(p.destination, p.count);
        return q;
    };
    EXPECT_EQ(order(11), order(11));
    std::set<std::vector<std::pair<int, double>>> seen;
    for (std::uint64_t seed = 1; seed <= 16; ++seed) seen.insert(order(seed));
    EXPECT_GT(seen.size(), 1u);
}

TEST(Network, DivergeAllToOneBranch) {
    auto s = spec_of({origin(0, 3, {{8, 10}}), interior(1, 3), interior(2, 2), interior(3, 1), sink(8, 2),
                      sink(9, 1)},
                     {link(1, {0}, {1}), link(2, {1}, {2, 3}), link(3, {2}, {8}), link(4, {3}, {9})});
    Network n(s, 5);
    for (int k = 0; k < 200; ++k) {
        n.step();
        ASSERT_EQ(flow(n, 2, 3), 0.0);
        check_zones(n);
    }
    EXPECT_GT(n.crossed(2, 2, 8), 0.0);
    EXPECT_EQ(n.crossed(2, 3, 8), 0.0);
    EXPECT_EQ(n.zone(3).count, 0.0);
}

TEST(Network, BlockedHeadAndSkipFlag) {
    // branch 3 never drains, so its vehicles eventually block the diverge head
    auto make = [](bool skip) {
        auto s = spec_of({origin(0, 3, {{8, 20}, {9, 4}}), interior(1, 3), interior(2, 2), interior(3, 1),
                          sink(8, 2), sink(9, 1)},
                         {link(1, {0}, {1}), link(2, {1}, {2, 3}), link(3, {2}, {8}), link(4, {3}, {9})});
        s.connectors[3].metering = {{3, 0.0}};
        s.connectors[1].skip_blocked = skip;
        return s;
    };
    Network strict(make(false), 6), skip(make(true), 6);
    for (int k = 0; k < 400; ++k) {
        strict.step();
        skip.step();
        check_zones(strict);
        check_zones(skip);
        ASSERT_LT(std::abs(strict.conservation_residual()), 1e-8);
        ASSERT_LT(std::abs(skip.conservation_residual()), 1e-8);
    }
    EXPECT_EQ(skip.sink_count(9), 0.0);
    EXPECT_GT(skip.sink_count(8), 1.2 * strict.sink_count(8));
}

TEST(Network, FreewayInvariantsAndDeterminism) {
    const auto s = freeway();
    Network a(s, 1), b(s, 1);
    for (int k = 0; k < 300; ++k) {
        a.step();
        b.step();
        ASSERT_LT(std::abs(a.conservation_residual()), 1e-8) << "step " << k;
        check_zones(a);
        for (const auto& f : a.last_flows()) ASSERT_GE(f.vehicles, 0.0);
    }
    ASSERT_EQ(a.zones().size(), b.zones().size());
    for (std::size_t i = 0; i < a.zones().size(); ++i) {
        const auto &za = a.zones()[i], &zb = b.zones()[i];
        EXPECT_EQ(za.count, zb.count);
        ASSERT_EQ(za.queue.size(), zb.queue.size());
        for (std::size_t k = 0; k < za.queue.size(); ++k) {
            EXPECT_EQ(za.queue[k].count, zb.queue[k].count);
            EXPECT_EQ(za.queue[k].destination, zb.queue[k].destination);
        }
    }
    EXPECT_EQ(a.crossed(19, 19, 23), 0.0);
}
