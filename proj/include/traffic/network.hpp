#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "traffic/resonant.hpp"

namespace traffic {

/// A group of vehicles with one destination that moves as a unit.
struct Macroparticle {
    int destination = 0;
    double count = 0.0;
    long entry_seq = 0;  ///< step at which it entered its current zone
};

enum class ZoneRole { Interior, Origin, Destination };
enum class SinkPolicy { Infinite, MirrorZone, MirrorDestination };

struct Platoon {
    int destination = 0;
    double count = 0.0;
    bool operator==(const Platoon&) const = default;
};

struct ZoneSpec {
    int id = 0;
    ZoneRole role = ZoneRole::Interior;
    double length = 1.0;
    double lanes = 1.0;
    // origin
    std::vector<Platoon> platoons;  ///< repeating arrival pattern
    bool jammed = true;             ///< unlimited backlog; otherwise arrivals at arrival_rate
    double arrival_rate = 0.0;
    // destination
    SinkPolicy sink = SinkPolicy::Infinite;
    int mirror_zone = 0;
    int mirror_destination = 0;

    bool operator==(const ZoneSpec&) const = default;
};

struct Metering {
    int zone = 0;
    double rate = 0.0;  ///< vehicles per unit time
    bool operator==(const Metering&) const = default;
};

struct ConnectorSpec {
    int id = 0;
    std::vector<int> upstream;
    std::vector<int> downstream;
    std::vector<double> merge_fractions;  ///< empty: proportional to upstream lanes
    std::vector<Metering> metering;
    bool skip_blocked = false;  ///< diverge: later particles may pass a blocked head bound elsewhere
    bool operator==(const ConnectorSpec&) const = default;
};

struct NetworkSpec {
    FundamentalDiagram fd;  ///< per lane
    double dt = 1.0;
    int steps = 0;
    std::vector<ZoneSpec> zones;
    std::vector<ConnectorSpec> connectors;
    bool operator==(const NetworkSpec&) const = default;
};

enum class ConnectorKind { Linear, Merge, Diverge };

/// Vehicles moved from one zone to another through a connector during one step.
struct ConnectorFlow {
    int connector = 0;
    int from = 0;
    int to = 0;
    double vehicles = 0.0;
};

inline double update_zone_counts(double n, double f_in, double f_out) {
    const double next = n + f_in - f_out;
    if (next < -1e-9) throw NegativeCountError("zone count would become " + format_number(next));
    return next;
}

inline double network_cfl(const FundamentalDiagram& fd, double dt, double dx) {
    const double s = std::max(std::abs(lambda_star(fd, 0.0)), std::abs(lambda_star(fd, max_density(fd))));
    return cfl_number(s, dt, dx);
}

class Network {
public:
    struct Zone {
        ZoneSpec spec;
        std::deque<Macroparticle> queue;
        double count = 0.0;
        std::map<int, double> by_destination;
        std::size_t pattern_pos = 0;
        double pattern_left = 0.0;  ///< vehicles still to emit from the current platoon
        std::set<int> reachable;
    };

    Network(const NetworkSpec& spec, std::uint64_t seed)
        : spec_(spec), lf_(spec.fd), rng_(seed) {
        if (!(spec.dt > 0.0)) throw ValidationError("network dt must be positive");
        for (const auto& z : spec.zones) {
            if (index_.count(z.id)) throw ValidationError("duplicate zone id " + std::to_string(z.id));
            if (!(z.length > 0.0) || !(z.lanes > 0.0)) throw ValidationError("zone " + std::to_string(z.id) + " needs positive length and lanes");
            index_[z.id] = zones_.size();
            Zone zone;
            zone.spec = z;
            zones_.push_back(zone);
        }
        double min_len = std::numeric_limits<double>::infinity();
        for (const auto& z : zones_)
            if (z.spec.role == ZoneRole::Interior) min_len = std::min(min_len, z.spec.length);
        if (std::isfinite(min_len) && network_cfl(spec.fd, spec.dt, min_len) > 1.0)
            throw CflViolation("network CFL " + format_number(network_cfl(spec.fd, spec.dt, min_len)) + " exceeds 1");
        for (const auto& c : spec.connectors) {
            if (c.upstream.empty() || c.downstream.empty())
                throw ValidationError("connector " + std::to_string(c.id) + " needs upstream and downstream zones");
            if (c.upstream.size() > 1 && c.downstream.size() > 1)
                throw ValidationError("connector " + std::to_string(c.id) + " mixes merge and diverge");
            for (int u : c.upstream) zone(u);
            for (int d : c.downstream) zone(d);
            Link l;
            l.spec = c;
            l.kind = c.upstream.size() > 1 ? ConnectorKind::Merge
                     : c.downstream.size() > 1 ? ConnectorKind::Diverge
                                               : ConnectorKind::Linear;
            if (l.kind == ConnectorKind::Merge) {
                if (c.merge_fractions.empty()) {
                    double total = 0.0;
                    for (int u : c.upstream) total += zone(u).spec.lanes;
                    for (int u : c.upstream) l.fractions.push_back(zone(u).spec.lanes / total);
                } else {
                    if (c.merge_fractions.size() != c.upstream.size())
                        throw ValidationError("connector " + std::to_string(c.id) + " fraction count differs from upstream count");
                    double total = 0.0;
                    for (double f : c.merge_fractions) total += f;
                    if (std::abs(total - 1.0) > 1e-9)
                        throw FractionSumError("merge fractions of connector " + std::to_string(c.id) + " sum to " + format_number(total));
                    l.fractions = c.merge_fractions;
                }
            }
            links_.push_back(l);
        }
        compute_reachability();
        for (const auto& z : zones_) {
            for (const auto& p : z.spec.platoons) {
                if (!z.reachable.count(p.destination))
                    throw UnroutableError("destination " + std::to_string(p.destination) + " unreachable from zone " + std::to_string(z.spec.id));
            }
        }
    }

    const NetworkSpec& spec() const { return spec_; }
    long step_index() const { return step_; }
    double time() const { return step_ * spec_.dt; }
    const std::vector<Zone>& zones() const { return zones_; }
    const Zone& zone(int id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw ValidationError("unknown zone " + std::to_string(id));
        return zones_[it->second];
    }
    const std::vector<ConnectorFlow>& last_flows() const { return flows_; }
    double cumulative_input() const { return input_; }
    double cumulative_output() const { return output_; }
    double sink_count(int zone_id) const {
        auto it = absorbed_.find(zone_id);
        return it == absorbed_.end() ? 0.0 : it->second;
    }
    /// Vehicles that crossed a connector to a given downstream zone, per destination.
    double crossed(int connector, int to, int destination) const {
        auto it = crossed_.find({connector, to, destination});
        return it == crossed_.end() ? 0.0 : it->second;
    }

    double interior_total() const {
        double s = 0.0;
        for (const auto& z : zones_)
            if (z.spec.role == ZoneRole::Interior) s += z.count;
        return s;
    }
    double conservation_residual() const { return interior_total() + output_ - input_; }

    /// Per-lane density of an interior zone.
    double lane_density(const Zone& z) const { return z.count / (z.spec.length * z.spec.lanes); }

    double lane_speed(const Zone& z) const { return v_star(spec_.fd, std::min(lane_density(z), max_density(spec_.fd))); }

    void step() {
        for (auto& z : zones_)
            if (z.spec.role == ZoneRole::Origin) top_up(z);
        flows_.clear();
        std::vector<std::vector<Transfer>> plans(links_.size());
        for (std::size_t i = 0; i < links_.size(); ++i) plans[i] = plan(links_[i]);

        // aggregate level
        std::map<int, double> in, out;
        for (std::size_t i = 0; i < links_.size(); ++i) {
            for (const auto& t : plans[i]) {
                out[t.from] += t.vehicles;
                in[t.to] += t.vehicles;
            }
        }
        for (auto& z : zones_) {
            const int id = z.spec.id;
            switch (z.spec.role) {
                case ZoneRole::Interior: z.count = update_zone_counts(z.count, in[id], out[id]); break;
                case ZoneRole::Origin: input_ += out[id]; break;
                case ZoneRole::Destination: output_ += in[id]; break;
            }
        }

        // disaggregate level: detach everything first, then attach
        std::vector<std::map<int, std::vector<std::vector<Macroparticle>>>> moving(links_.size());
        for (std::size_t i = 0; i < links_.size(); ++i) {
            for (int u : links_[i].spec.upstream) {
                double total = 0.0;
                for (const auto& t : plans[i])
                    if (t.from == u) total += t.vehicles;
                if (total <= 0.0) continue;
                std::map<int, std::vector<Macroparticle>> streams;
                if (links_[i].kind == ConnectorKind::Diverge && links_[i].spec.skip_blocked) {
                    std::map<int, double> per_branch;
                    for (const auto& t : plans[i]) per_branch[t.to] += t.vehicles;
                    streams = detach_by_branch(mutable_zone(u), links_[i], per_branch);
                } else {
                    streams = detach(mutable_zone(u), links_[i], total);
                }
                for (auto& [to, parts] : streams) moving[i][to].push_back(std::move(parts));
            }
        }
        ++step_;
        for (std::size_t i = 0; i < links_.size(); ++i) {
            for (auto& [to, streams] : moving[i]) {
                for (auto& p : interleave(streams)) attach(mutable_zone(to), links_[i].spec.id, p);
            }
        }
        for (std::size_t i = 0; i < links_.size(); ++i)
            for (const auto& t : plans[i]) flows_.push_back({links_[i].spec.id, t.from, t.to, t.vehicles});
    }

private:
    struct Link {
        ConnectorSpec spec;
        ConnectorKind kind = ConnectorKind::Linear;
        std::vector<double> fractions;
    };
    struct Transfer {
        int from;
        int to;
        double vehicles;
    };

    Zone& mutable_zone(int id) { return zones_[index_.at(id)]; }

    void compute_reachability() {
        for (auto& z : zones_)
            if (z.spec.role == ZoneRole::Destination) z.reachable.insert(z.spec.id);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& l : links_) {
                for (int u : l.spec.upstream) {
                    auto& zu = mutable_zone(u);
                    for (int d : l.spec.downstream) {
                        for (int dest : zone(d).reachable) changed |= zu.reachable.insert(dest).second;
                    }
                }
            }
        }
    }

    int route(const Link& l, int destination) const {
        for (int d : l.spec.downstream)
            if (zone(d).reachable.count(destination)) return d;
        throw UnroutableError("no branch of connector " + std::to_string(l.spec.id) + " leads to destination " +
                              std::to_string(destination));
    }

    double queued(const Zone& z) const {
        double s = 0.0;
        for (const auto& p : z.queue) s += p.count;
        return s;
    }

    void emit(Zone& z, double vehicles) {
        const auto& pat = z.spec.platoons;
        while (vehicles > 1e-12) {
            if (z.pattern_left <= 0.0) {
                z.pattern_left = pat[z.pattern_pos].count;
            }
            const double take = std::min(vehicles, z.pattern_left);
            const int dest = pat[z.pattern_pos].destination;
            if (!z.queue.empty() && z.queue.back().destination == dest && z.queue.back().entry_seq == step_)
                z.queue.back().count += take;
            else
                z.queue.push_back({dest, take, step_});
            z.pattern_left -= take;
            vehicles -= take;
            if (z.pattern_left <= 1e-12) {
                z.pattern_left = 0.0;
                z.pattern_pos = (z.pattern_pos + 1) % pat.size();
            }
        }
    }

    void top_up(Zone& z) {
        if (z.spec.platoons.empty()) return;
        if (z.spec.jammed) {
            const double need = 2.0 * lf_.fmax(z.spec.lanes) * spec_.dt;
            double have = queued(z);
            while (have < need) {
                if (z.pattern_left <= 0.0) z.pattern_left = z.spec.platoons[z.pattern_pos].count;
                const double chunk = z.pattern_left;
                emit(z, chunk);
                have += chunk;
            }
        } else {
            emit(z, z.spec.arrival_rate * spec_.dt);
        }
    }

    double demand_of(const Zone& z) const {
        switch (z.spec.role) {
            case ZoneRole::Origin: {
                const double cap = lf_.fmax(z.spec.lanes);
                return z.spec.jammed ? cap : std::min(queued(z) / spec_.dt, cap);
            }
            case ZoneRole::Interior:
                return lf_.demand({z.spec.lanes, z.count / z.spec.length});
            case ZoneRole::Destination: return 0.0;
        }
        return 0.0;
    }

    double supply_of(const Zone& z) const {
        switch (z.spec.role) {
            case ZoneRole::Interior: return lf_.supply({z.spec.lanes, z.count / z.spec.length});
            case ZoneRole::Origin: return 0.0;
            case ZoneRole::Destination: {
                double n = 0.0;
                switch (z.spec.sink) {
                    case SinkPolicy::Infinite: return std::numeric_limits<double>::infinity();
                    case SinkPolicy::MirrorZone: n = zone(z.spec.mirror_zone).count; break;
                    case SinkPolicy::MirrorDestination: {
                        const auto& m = zone(z.spec.mirror_zone).by_destination;
                        auto it = m.find(z.spec.mirror_destination);
                        n = it == m.end() ? 0.0 : it->second;
                        break;
                    }
                }
                const double rho = std::min(n / z.spec.length, z.spec.lanes * max_density(spec_.fd));
                return lf_.supply({z.spec.lanes, rho});
            }
        }
        return 0.0;
    }

    double meter(const Link& l, int u, double vehicles) const {
        for (const auto& m : l.spec.metering)
            if (m.zone == u) vehicles = std::min(vehicles, m.rate * spec_.dt);
        return vehicles;
    }

    std::vector<Transfer> plan(const Link& l) const {
        const double dt = spec_.dt;
        std::vector<Transfer> out;
        switch (l.kind) {
            case ConnectorKind::Linear: {
                const int u = l.spec.upstream[0], d = l.spec.downstream[0];
                const double f = meter(l, u, dt * std::min(demand_of(zone(u)), supply_of(zone(d))));
                out.push_back({u, d, f});
                break;
            }
            case ConnectorKind::Merge: {
                const int d = l.spec.downstream[0];
                const double s = supply_of(zone(d));
                for (std::size_t k = 0; k < l.spec.upstream.size(); ++k) {
                    const int u = l.spec.upstream[k];
                    out.push_back({u, d, meter(l, u, dt * std::min(demand_of(zone(u)), l.fractions[k] * s))});
                }
                break;
            }
            case ConnectorKind::Diverge: {
                const int u = l.spec.upstream[0];
                const Zone& zu = zone(u);
                const double reach = meter(l, u, dt * demand_of(zu));
                // composition of the vehicles reachable this step, head first
                std::map<int, double> share;
                double left = reach;
                for (const auto& p : zu.queue) {
                    if (left <= 0.0) break;
                    const double take = std::min(left, p.count);
                    share[route(l, p.destination)] += take;
                    left -= take;
                }
                std::map<int, double> budget;
                for (int d : l.spec.downstream) budget[d] = std::min(share[d], dt * supply_of(zone(d)));
                // strict FIFO: a head that cannot move blocks everything behind it
                std::map<int, double> moved;
                left = reach;
                for (const auto& p : zu.queue) {
                    if (left <= 1e-12) break;
                    const int d = route(l, p.destination);
                    const double want = std::min(left, p.count);
                    const double take = std::min(want, budget[d]);
                    moved[d] += take;
                    budget[d] -= take;
                    left -= take;
                    if (take < want) {
                        if (!l.spec.skip_blocked) break;
                        budget[d] = 0.0;
                        left -= want - take;  // the blocked vehicles still occupy the reachable stretch
                    }
                }
                for (int d : l.spec.downstream) out.push_back({u, d, moved[d]});
                break;
            }
        }
        return out;
    }

    // Takes `total` vehicles off the head, grouped by downstream zone, order preserved.
    std::map<int, std::vector<Macroparticle>> detach(Zone& z, const Link& l, double total) {
        std::map<int, std::vector<Macroparticle>> out;
        double left = total;
        while (left > 1e-12 && !z.queue.empty()) {
            Macroparticle& head = z.queue.front();
            Macroparticle part = head;
            if (head.count <= left + 1e-12) {
                left -= head.count;
                z.queue.pop_front();
            } else {
                part.count = left;
                head.count -= left;
                left = 0.0;
            }
            if (z.spec.role == ZoneRole::Interior) z.by_destination[part.destination] -= part.count;
            out[l.kind == ConnectorKind::Diverge ? route(l, part.destination) : l.spec.downstream[0]].push_back(part);
        }
        if (left > 1e-9) throw NegativeCountError("zone " + std::to_string(z.spec.id) + " ran out of particles");
        return out;
    }

    // Diverge with skipping: each branch takes its own amount from the first particles bound for it.
    std::map<int, std::vector<Macroparticle>> detach_by_branch(Zone& z, const Link& l, std::map<int, double> left) {
        std::map<int, std::vector<Macroparticle>> out;
        std::deque<Macroparticle> kept;
        for (auto& p : z.queue) {
            const int d = route(l, p.destination);
            double& budget = left[d];
            if (budget <= 1e-12) {
                kept.push_back(p);
                continue;
            }
            Macroparticle part = p;
            part.count = std::min(p.count, budget);
            budget -= part.count;
            if (z.spec.role == ZoneRole::Interior) z.by_destination[part.destination] -= part.count;
            out[d].push_back(part);
            if (p.count - part.count > 1e-12) {
                p.count -= part.count;
                kept.push_back(p);
            }
        }
        for (const auto& [d, rest] : left)
            if (rest > 1e-9) throw NegativeCountError("zone " + std::to_string(z.spec.id) + " ran out of particles");
        z.queue = std::move(kept);
        return out;
    }

    // Merges upstream streams by entry sequence; ties drawn at random with the seeded generator.
    std::vector<Macroparticle> interleave(std::vector<std::vector<Macroparticle>>& streams) {
        std::vector<Macroparticle> out;
        std::vector<std::size_t> pos(streams.size(), 0);
        while (true) {
            long best = std::numeric_limits<long>::max();
            std::vector<std::size_t> tied;
            for (std::size_t s = 0; s < streams.size(); ++s) {
                if (pos[s] >= streams[s].size()) continue;
                const long seq = streams[s][pos[s]].entry_seq;
                if (seq < best) {
                    best = seq;
                    tied.assign(1, s);
                } else if (seq == best) {
                    tied.push_back(s);
                }
            }
            if (tied.empty()) break;
            std::size_t pick = tied[0];
            if (tied.size() > 1) pick = tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng_)];
            out.push_back(streams[pick][pos[pick]++]);
        }
        return out;
    }

    void attach(Zone& z, int connector, Macroparticle p) {
        crossed_[{connector, z.spec.id, p.destination}] += p.count;
        if (z.spec.role == ZoneRole::Destination) {
            absorbed_[z.spec.id] += p.count;
            return;
        }
        p.entry_seq = step_;
        z.by_destination[p.destination] += p.count;
        z.queue.push_back(p);
    }

    NetworkSpec spec_;
    LaneFlux lf_;
    std::mt19937_64 rng_;
    std::vector<Zone> zones_;
    std::map<int, std::size_t> index_;
    std::vector<Link> links_;
    std::vector<ConnectorFlow> flows_;
    std::map<std::tuple<int, int, int>, double> crossed_;
    std::map<int, double> absorbed_;
    double input_ = 0.0;
    double output_ = 0.0;
    long step_ = 0;
};

}  // namespace traffic
