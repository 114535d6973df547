#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "traffic/godunov.hpp"
#include "traffic/network.hpp"

namespace traffic {

enum class Command { Riemann, Simulate, Converge, Stability, Network };
enum class ModelKind { Lwr, Resonant, Zhang, Pw };
enum class InitialKind { Constant, Jump, Sine, Segments };
enum class VelocityProfile { Equilibrium, Cosine };

struct Segment {
    double x0 = 0.0, x1 = 0.0, rho = 0.0;
    bool operator==(const Segment&) const = default;
};

struct InitialSpec {
    InitialKind kind = InitialKind::Constant;
    double lanes = 1.0;  ///< resonant, outside of jump data
    // constant
    double rho = 0.5;
    std::optional<double> v;
    // jump
    double x0 = 0.0;
    double rho_l = 0.5, rho_r = 0.5;
    std::optional<double> v_l, v_r;
    double lanes_l = 1.0, lanes_r = 1.0;
    // sine: rho = base + amplitude sin(2 pi x / period)
    double base = 0.5, amplitude = 0.0, period = 1.0;
    VelocityProfile velocity = VelocityProfile::Equilibrium;
    double v_offset = 0.0;     ///< equilibrium profile: v*(rho) + offset
    double v_amplitude = 0.0;  ///< cosine profile: v*(base) + v_amplitude cos(2 pi x / period)
    // segments
    double rho_default = 0.5;
    std::vector<Segment> segments;
    bool operator==(const InitialSpec&) const = default;
};

struct RiemannSpec {
    double rho_l = 0.5, rho_r = 0.5;
    std::optional<double> v_l, v_r;
    double a_l = 1.0, a_r = 1.0;
    bool operator==(const RiemannSpec&) const = default;
};

struct Scenario {
    Command command = Command::Simulate;
    std::uint64_t seed = 0;
    std::string units = "normalized";
    std::string output;  ///< CSV path; empty means standard output
    ModelKind model = ModelKind::Lwr;
    double tau = 1.0;
    double c0 = 0.0;
    PwCurves curves = kDefaultPwCurves;
    FundamentalDiagram fd;
    // grid
    double x_min = 0.0, x_max = 1.0;
    int cells = 100;
    BoundaryKind bc = BoundaryKind::Neumann;
    double ghost_rho_l = 0.0, ghost_rho_r = 0.0, ghost_v_l = 0.0, ghost_v_r = 0.0, ghost_a_l = 1.0, ghost_a_r = 1.0;
    InitialSpec initial;
    // scheme and time
    Scheme scheme = Scheme::FirstOrder;
    DtPolicy dt;
    StepOptions options;
    double t_end = 1.0;
    std::vector<double> outputs;
    // riemann
    RiemannSpec riemann;
    // studies
    std::vector<int> grids;
    double band = 0.05;
    // network
    NetworkSpec network;
    int output_every = 1;

    bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------- names

namespace detail {

template <class E>
struct Names;

#define TRAFFIC_NAMES(E, ...)                                             \
    template <>                                                           \
    struct Names<E> {                                                     \
        static const std::vector<std::pair<E, const char*>>& list() {     \
            static const std::vector<std::pair<E, const char*>> l{__VA_ARGS__}; \
            return l;                                                     \
        }                                                                 \
    };

TRAFFIC_NAMES(Command, {Command::Riemann, "riemann"}, {Command::Simulate, "simulate"},
              {Command::Converge, "converge"}, {Command::Stability, "stability"}, {Command::Network, "network"})
TRAFFIC_NAMES(ModelKind, {ModelKind::Lwr, "lwr"}, {ModelKind::Resonant, "resonant"}, {ModelKind::Zhang, "zhang"},
              {ModelKind::Pw, "pw"})
TRAFFIC_NAMES(DiagramFamily, {DiagramFamily::Greenshields, "greenshields"}, {DiagramFamily::Polynomial, "polynomial"},
              {DiagramFamily::Greenberg, "greenberg"}, {DiagramFamily::Underwood, "underwood"},
              {DiagramFamily::Newell, "newell"}, {DiagramFamily::KernerSigmoid, "kerner"})
TRAFFIC_NAMES(PwCurves, {PwCurves::Paper, "velocity"}, {PwCurves::Isothermal, "isothermal"})
TRAFFIC_NAMES(BoundaryKind, {BoundaryKind::Neumann, "neumann"}, {BoundaryKind::Periodic, "periodic"},
              {BoundaryKind::GhostDirichlet, "dirichlet"})
TRAFFIC_NAMES(InitialKind, {InitialKind::Constant, "constant"}, {InitialKind::Jump, "jump"},
              {InitialKind::Sine, "sine"}, {InitialKind::Segments, "segments"})
TRAFFIC_NAMES(VelocityProfile, {VelocityProfile::Equilibrium, "equilibrium"}, {VelocityProfile::Cosine, "cosine"})
TRAFFIC_NAMES(Scheme, {Scheme::FirstOrder, "first_order"}, {Scheme::SecondOrder, "second_order"},
              {Scheme::Pember, "pember"}, {Scheme::Fractional, "fractional"}, {Scheme::LeVeque, "leveque"})
TRAFFIC_NAMES(DtPolicy::Kind, {DtPolicy::Kind::Cfl, "cfl"}, {DtPolicy::Kind::Fixed, "fixed"},
              {DtPolicy::Kind::Ratio, "ratio"})
TRAFFIC_NAMES(SourceTiming, {SourceTiming::Implicit, "implicit"}, {SourceTiming::Midpoint, "midpoint"})
TRAFFIC_NAMES(EdgeSolver, {EdgeSolver::Riemann, "riemann"}, {EdgeSolver::Cauchy, "cauchy"})
TRAFFIC_NAMES(LeVequeForm, {LeVequeForm::FluxDifference, "flux_difference"},
              {LeVequeForm::Fluctuation, "fluctuation"})
TRAFFIC_NAMES(ZoneRole, {ZoneRole::Interior, "interior"}, {ZoneRole::Origin, "origin"},
              {ZoneRole::Destination, "destination"})
TRAFFIC_NAMES(SinkPolicy, {SinkPolicy::Infinite, "infinite"}, {SinkPolicy::MirrorZone, "mirror_zone"},
              {SinkPolicy::MirrorDestination, "mirror_destination"})

#undef TRAFFIC_NAMES

template <class E>
std::string name_of(E e) {
    for (const auto& [v, n] : Names<E>::list())
        if (v == e) return n;
    return "?";
}

template <class E>
E parse_name(const std::string& field, const std::string& s) {
    std::string options;
    for (const auto& [v, n] : Names<E>::list()) {
        if (s == n) return v;
        options += options.empty() ? n : std::string("|") + n;
    }
    throw ValidationError(field + ": '" + s + "' is not one of " + options);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& field, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(field + ": '" + s + "' is not a number");
}

inline long to_long(const std::string& field, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (trim(s.substr(pos)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(field + ": '" + s + "' is not an integer");
}

// Reads one INI section and rejects keys that were not consumed.
class Section {
public:
    Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }
    std::string field(const std::string& key) const { return "[" + name_ + "] " + key; }

    void num(const std::string& key, double& out) {
        if (auto v = raw(key)) out = to_double(field(key), *v);
    }
    void num(const std::string& key, int& out) {
        if (auto v = raw(key)) out = static_cast<int>(to_long(field(key), *v));
    }
    void opt_num(const std::string& key, std::optional<double>& out) {
        if (auto v = raw(key)) {
            if (*v == "equilibrium") out.reset();
            else out = to_double(field(key), *v);
        }
    }
    template <class E>
    void name(const std::string& key, E& out) {
        if (auto v = raw(key)) out = parse_name<E>(field(key), *v);
    }
    void flag(const std::string& key, bool& out) {
        if (auto v = raw(key)) {
            if (*v == "true") out = true;
            else if (*v == "false") out = false;
            else throw ValidationError(field(key) + ": expected true or false");
        }
    }
    void finish() const {
        if (!tree_) return;
        for (const auto& kv : *tree_)
            if (!used_.count(kv.first)) throw ValidationError(field(kv.first) + ": unknown key");
    }

private:
    std::string name_;
    const boost::property_tree::ptree* tree_;
    std::set<std::string> used_;
};

}  // namespace detail

// ---------------------------------------------------------------- parsing

inline Scenario parse_scenario(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    {
        std::istringstream in(text);
        try {
            pt::read_ini(in, root);
        } catch (const pt::ini_parser_error& e) {
            throw ParseError("line " + std::to_string(e.line()) + ": " + e.message());
        }
    }
    for (const auto& kv : root)
        if (kv.second.empty() && !kv.second.data().empty())
            throw ValidationError("key '" + kv.first + "' appears outside any section");
    auto child = [&](const std::string& name) -> const pt::ptree* {
        auto it = root.find(name);
        return it == root.not_found() ? nullptr : &it->second;
    };
    std::set<std::string> known{"run", "model", "diagram", "grid", "initial", "scheme", "time", "riemann", "study", "network"};

    Scenario s;
    {
        detail::Section r("run", child("run"));
        if (!r.present()) throw ValidationError("[run] section is required");
        r.name("command", s.command);
        if (auto v = r.raw("seed")) s.seed = static_cast<std::uint64_t>(detail::to_long(r.field("seed"), *v));
        if (auto v = r.raw("units")) s.units = *v;
        if (auto v = r.raw("output")) s.output = *v;
        r.finish();
    }
    {
        detail::Section d("diagram", child("diagram"));
        d.name("family", s.fd.family);
        d.num("v_f", s.fd.free_speed);
        d.num("rho_j", s.fd.jam_density);
        d.num("c_j", s.fd.jam_wave_speed);
        d.num("n", s.fd.exponent);
        d.num("v0", s.fd.greenberg_speed);
        d.num("sigmoid_speed", s.fd.sigmoid_speed);
        d.num("sigmoid_center", s.fd.sigmoid_center);
        d.num("sigmoid_width", s.fd.sigmoid_width);
        d.num("sigmoid_offset", s.fd.sigmoid_offset);
        d.num("phi_anchor", s.fd.phi_anchor);
        d.finish();
    }
    if (s.command == Command::Network) {
        detail::Section n("network", child("network"));
        n.num("dt", s.network.dt);
        n.num("steps", s.network.steps);
        n.num("output_every", s.output_every);
        n.finish();
        s.network.fd = s.fd;
        for (const auto& kv : root) {
            const auto parts = detail::split(kv.first, ' ');
            if (parts.size() == 2 && parts[0] == "zone") {
                ZoneSpec z;
                z.id = static_cast<int>(detail::to_long("[" + kv.first + "]", parts[1]));
                detail::Section zs(kv.first, &kv.second);
                zs.name("role", z.role);
                zs.num("length", z.length);
                zs.num("lanes", z.lanes);
                if (auto v = zs.raw("platoons")) {
                    for (const auto& item : detail::split(*v, ',')) {
                        const auto p = detail::split(item, ':');
                        if (p.size() != 2) throw ValidationError(zs.field("platoons") + ": expected destination:count");
                        z.platoons.push_back({static_cast<int>(detail::to_long(zs.field("platoons"), p[0])),
                                              detail::to_double(zs.field("platoons"), p[1])});
                    }
                }
                zs.flag("jammed", z.jammed);
                zs.num("arrival_rate", z.arrival_rate);
                zs.name("sink", z.sink);
                zs.num("mirror_zone", z.mirror_zone);
                zs.num("mirror_destination", z.mirror_destination);
                zs.finish();
                s.network.zones.push_back(z);
            } else if (parts.size() == 2 && parts[0] == "connector") {
                ConnectorSpec c;
                c.id = static_cast<int>(detail::to_long("[" + kv.first + "]", parts[1]));
                detail::Section cs(kv.first, &kv.second);
                auto ids = [&](const std::string& key, std::vector<int>& out) {
                    if (auto v = cs.raw(key))
                        for (const auto& item : detail::split(*v, ','))
                            out.push_back(static_cast<int>(detail::to_long(cs.field(key), item)));
                };
                ids("upstream", c.upstream);
                ids("downstream", c.downstream);
                if (auto v = cs.raw("fractions"))
                    for (const auto& item : detail::split(*v, ','))
                        c.merge_fractions.push_back(detail::to_double(cs.field("fractions"), item));
                if (auto v = cs.raw("metering")) {
                    for (const auto& item : detail::split(*v, ',')) {
                        const auto p = detail::split(item, ':');
                        if (p.size() != 2) throw ValidationError(cs.field("metering") + ": expected zone:rate");
                        c.metering.push_back({static_cast<int>(detail::to_long(cs.field("metering"), p[0])),
                                              detail::to_double(cs.field("metering"), p[1])});
                    }
                }
                cs.flag("skip_blocked", c.skip_blocked);
                cs.finish();
                s.network.connectors.push_back(c);
            } else if (!known.count(kv.first)) {
                throw ValidationError("unknown section [" + kv.first + "]");
            }
        }
        if (s.network.zones.empty()) throw ValidationError("[network] needs at least one [zone N] section");
        if (s.output_every < 1) throw ValidationError("[network] output_every must be at least 1");
        return s;
    }
    for (const auto& kv : root)
        if (!known.count(kv.first)) throw ValidationError("unknown section [" + kv.first + "]");
    {
        detail::Section m("model", child("model"));
        m.name("kind", s.model);
        m.num("tau", s.tau);
        m.num("c0", s.c0);
        m.name("pw_curves", s.curves);
        m.finish();
        if ((s.model == ModelKind::Zhang || s.model == ModelKind::Pw) && !(s.tau > 0.0))
            throw ValidationError("[model] tau must be positive");
        if (s.model == ModelKind::Pw && !(s.c0 > 0.0)) throw ValidationError("[model] c0 must be positive");
    }
    if (s.command == Command::Riemann) {
        detail::Section r("riemann", child("riemann"));
        r.num("rho_l", s.riemann.rho_l);
        r.num("rho_r", s.riemann.rho_r);
        r.opt_num("v_l", s.riemann.v_l);
        r.opt_num("v_r", s.riemann.v_r);
        r.num("lanes_l", s.riemann.a_l);
        r.num("lanes_r", s.riemann.a_r);
        r.finish();
        return s;
    }
    {
        detail::Section g("grid", child("grid"));
        g.num("x_min", s.x_min);
        g.num("x_max", s.x_max);
        g.num("cells", s.cells);
        g.name("bc", s.bc);
        g.num("left_rho", s.ghost_rho_l);
        g.num("right_rho", s.ghost_rho_r);
        g.num("left_v", s.ghost_v_l);
        g.num("right_v", s.ghost_v_r);
        g.num("left_lanes", s.ghost_a_l);
        g.num("right_lanes", s.ghost_a_r);
        g.finish();
        if (s.cells < 1) throw ValidationError("[grid] cells must be at least 1");
        if (!(s.x_max > s.x_min)) throw ValidationError("[grid] x_max must exceed x_min");
    }
    {
        detail::Section i("initial", child("initial"));
        auto& in = s.initial;
        i.name("kind", in.kind);
        i.num("lanes", in.lanes);
        i.num("rho", in.rho);
        i.opt_num("v", in.v);
        i.num("x0", in.x0);
        i.num("rho_l", in.rho_l);
        i.num("rho_r", in.rho_r);
        i.opt_num("v_l", in.v_l);
        i.opt_num("v_r", in.v_r);
        i.num("lanes_l", in.lanes_l);
        i.num("lanes_r", in.lanes_r);
        i.num("base", in.base);
        i.num("amplitude", in.amplitude);
        i.num("period", in.period);
        i.name("velocity", in.velocity);
        i.num("v_offset", in.v_offset);
        i.num("v_amplitude", in.v_amplitude);
        i.num("rho_default", in.rho_default);
        if (auto v = i.raw("segments")) {
            for (const auto& item : detail::split(*v, ',')) {
                const auto p = detail::split(item, ':');
                if (p.size() != 3) throw ValidationError(i.field("segments") + ": expected x0:x1:rho");
                in.segments.push_back({detail::to_double(i.field("segments"), p[0]),
                                       detail::to_double(i.field("segments"), p[1]),
                                       detail::to_double(i.field("segments"), p[2])});
            }
        }
        i.finish();
    }
    {
        detail::Section sc("scheme", child("scheme"));
        sc.name("name", s.scheme);
        sc.name("dt_policy", s.dt.kind);
        sc.num("dt_value", s.dt.value);
        sc.name("source", s.options.source);
        sc.name("edge", s.options.edge);
        sc.name("leveque_form", s.options.leveque);
        sc.finish();
        if (!(s.dt.value > 0.0)) throw ValidationError("[scheme] dt_value must be positive");
    }
    {
        detail::Section t("time", child("time"));
        t.num("t_end", s.t_end);
        if (auto v = t.raw("outputs"))
            for (const auto& item : detail::split(*v, ',')) s.outputs.push_back(detail::to_double(t.field("outputs"), item));
        t.finish();
        if (!(s.t_end > 0.0)) throw ValidationError("[time] t_end must be positive");
    }
    {
        detail::Section st("study", child("study"));
        if (auto v = st.raw("grids"))
            for (const auto& item : detail::split(*v, ','))
                s.grids.push_back(static_cast<int>(detail::to_long(st.field("grids"), item)));
        st.num("band", s.band);
        st.finish();
        if ((s.command == Command::Converge || s.command == Command::Stability) && s.grids.size() < 2)
            throw ValidationError("[study] grids needs at least two sizes");
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

// ---------------------------------------------------------------- emitting

namespace detail {

class IniWriter {
public:
    void section(const std::string& name) {
        if (!out_.str().empty()) out_ << "\n";
        out_ << "[" << name << "]\n";
    }
    void put(const std::string& k, const std::string& v) { out_ << k << " = " << v << "\n"; }
    void put(const std::string& k, double v) { put(k, format_number(v)); }
    void put(const std::string& k, int v) { put(k, std::to_string(v)); }
    void put(const std::string& k, const std::optional<double>& v) {
        put(k, v ? format_number(*v) : std::string("equilibrium"));
    }
    template <class E>
    void put_name(const std::string& k, E e) {
        put(k, name_of(e));
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f) {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : ", ") + f(x);
    return out;
}

}  // namespace detail

/// Canonical text of the resolved scenario; parse_scenario(emit_scenario(s)) == s.
inline std::string emit_scenario(const Scenario& s) {
    detail::IniWriter w;
    w.section("run");
    w.put_name("command", s.command);
    w.put("seed", std::to_string(s.seed));
    w.put("units", s.units);
    if (!s.output.empty()) w.put("output", s.output);
    w.section("diagram");
    w.put_name("family", s.fd.family);
    w.put("v_f", s.fd.free_speed);
    w.put("rho_j", s.fd.jam_density);
    w.put("c_j", s.fd.jam_wave_speed);
    w.put("n", s.fd.exponent);
    w.put("v0", s.fd.greenberg_speed);
    w.put("sigmoid_speed", s.fd.sigmoid_speed);
    w.put("sigmoid_center", s.fd.sigmoid_center);
    w.put("sigmoid_width", s.fd.sigmoid_width);
    w.put("sigmoid_offset", s.fd.sigmoid_offset);
    w.put("phi_anchor", s.fd.phi_anchor);
    if (s.command == Command::Network) {
        w.section("network");
        w.put("dt", s.network.dt);
        w.put("steps", s.network.steps);
        w.put("output_every", s.output_every);
        for (const auto& z : s.network.zones) {
            w.section("zone " + std::to_string(z.id));
            w.put_name("role", z.role);
            w.put("length", z.length);
            w.put("lanes", z.lanes);
            if (!z.platoons.empty())
                w.put("platoons", detail::join(z.platoons, [](const Platoon& p) {
                          return std::to_string(p.destination) + ":" + format_number(p.count);
                      }));
            w.put("jammed", std::string(z.jammed ? "true" : "false"));
            w.put("arrival_rate", z.arrival_rate);
            w.put_name("sink", z.sink);
            w.put("mirror_zone", z.mirror_zone);
            w.put("mirror_destination", z.mirror_destination);
        }
        for (const auto& c : s.network.connectors) {
            w.section("connector " + std::to_string(c.id));
            auto ints = [](int i) { return std::to_string(i); };
            w.put("upstream", detail::join(c.upstream, ints));
            w.put("downstream", detail::join(c.downstream, ints));
            if (!c.merge_fractions.empty())
                w.put("fractions", detail::join(c.merge_fractions, [](double f) { return format_number(f); }));
            if (!c.metering.empty())
                w.put("metering", detail::join(c.metering, [](const Metering& m) {
                          return std::to_string(m.zone) + ":" + format_number(m.rate);
                      }));
            w.put("skip_blocked", std::string(c.skip_blocked ? "true" : "false"));
        }
        return w.str();
    }
    w.section("model");
    w.put_name("kind", s.model);
    w.put("tau", s.tau);
    w.put("c0", s.c0);
    w.put_name("pw_curves", s.curves);
    if (s.command == Command::Riemann) {
        w.section("riemann");
        w.put("rho_l", s.riemann.rho_l);
        w.put("rho_r", s.riemann.rho_r);
        w.put("v_l", s.riemann.v_l);
        w.put("v_r", s.riemann.v_r);
        w.put("lanes_l", s.riemann.a_l);
        w.put("lanes_r", s.riemann.a_r);
        return w.str();
    }
    w.section("grid");
    w.put("x_min", s.x_min);
    w.put("x_max", s.x_max);
    w.put("cells", s.cells);
    w.put_name("bc", s.bc);
    w.put("left_rho", s.ghost_rho_l);
    w.put("right_rho", s.ghost_rho_r);
    w.put("left_v", s.ghost_v_l);
    w.put("right_v", s.ghost_v_r);
    w.put("left_lanes", s.ghost_a_l);
    w.put("right_lanes", s.ghost_a_r);
    const auto& in = s.initial;
    w.section("initial");
    w.put_name("kind", in.kind);
    w.put("lanes", in.lanes);
    w.put("rho", in.rho);
    w.put("v", in.v);
    w.put("x0", in.x0);
    w.put("rho_l", in.rho_l);
    w.put("rho_r", in.rho_r);
    w.put("v_l", in.v_l);
    w.put("v_r", in.v_r);
    w.put("lanes_l", in.lanes_l);
    w.put("lanes_r", in.lanes_r);
    w.put("base", in.base);
    w.put("amplitude", in.amplitude);
    w.put("period", in.period);
    w.put_name("velocity", in.velocity);
    w.put("v_offset", in.v_offset);
    w.put("v_amplitude", in.v_amplitude);
    w.put("rho_default", in.rho_default);
    if (!in.segments.empty())
        w.put("segments", detail::join(in.segments, [](const Segment& g) {
                  return format_number(g.x0) + ":" + format_number(g.x1) + ":" + format_number(g.rho);
              }));
    w.section("scheme");
    w.put_name("name", s.scheme);
    w.put_name("dt_policy", s.dt.kind);
    w.put("dt_value", s.dt.value);
    w.put_name("source", s.options.source);
    w.put_name("edge", s.options.edge);
    w.put_name("leveque_form", s.options.leveque);
    w.section("time");
    w.put("t_end", s.t_end);
    if (!s.outputs.empty()) w.put("outputs", detail::join(s.outputs, [](double t) { return format_number(t); }));
    if (s.command == Command::Converge || s.command == Command::Stability) {
        w.section("study");
        w.put("grids", detail::join(s.grids, [](int n) { return std::to_string(n); }));
        w.put("band", s.band);
    }
    return w.str();
}

}  // namespace traffic
