#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "traffic/cli.hpp"

namespace {

struct Flags {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<int> grid;
    std::string scheme;
};

traffic::Scenario resolve(traffic::Command cmd, const Flags& f) {
    using namespace traffic;
    Scenario s = load_scenario(f.scenario);
    if (s.command != cmd)
        throw ValidationError("[run] command: scenario is '" + detail::name_of(s.command) + "', subcommand is '" +
                              detail::name_of(cmd) + "'");
    if (f.seed) s.seed = *f.seed;
    if (!f.out.empty()) s.output = f.out;
    if (!f.scheme.empty()) s.scheme = detail::parse_name<Scheme>("--scheme", f.scheme);
    if (!f.grid.empty()) {
        switch (cmd) {
            case Command::Simulate:
                if (f.grid.size() != 1) throw ValidationError("--grid: simulate takes one cell count");
                s.cells = f.grid[0];
                break;
            case Command::Converge:
            case Command::Stability: s.grids = f.grid; break;
            default: throw ValidationError("--grid: not used by " + detail::name_of(cmd));
        }
    }
    // overrides go through the same validation as the file
    return parse_scenario(emit_scenario(s));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Macroscopic traffic flow toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", traffic::kToolVersion);
    Flags flags;
    std::vector<std::pair<CLI::App*, traffic::Command>> subs;
    for (auto cmd : {traffic::Command::Riemann, traffic::Command::Simulate, traffic::Command::Converge,
                     traffic::Command::Stability, traffic::Command::Network}) {
        auto* sub = app.add_subcommand(traffic::detail::name_of(cmd), "run a " + traffic::detail::name_of(cmd) +
                                                                          " scenario");
        sub->add_option("--scenario", flags.scenario, "scenario file")->required();
        sub->add_option("--out", flags.out, "CSV output path (default: [run] output, else stdout)");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--grid", flags.grid, "cell count, or grid sizes for studies")->delimiter(',');
        sub->add_option("--scheme", flags.scheme, "scheme name");
        subs.emplace_back(sub, cmd);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: UsageError: " << e.what() << "\n";
        return 2;
    }
    try {
        traffic::Command cmd{};
        for (const auto& [sub, c] : subs)
            if (sub->parsed()) cmd = c;
        const traffic::Scenario s = resolve(cmd, flags);
        const std::string csv = traffic::emit_csv(s, traffic::run_scenario(s));
        if (s.output.empty() || s.output == "-") std::cout << csv;
        else traffic::write_file(s.output, csv);
    } catch (const traffic::Error& e) {
        std::cerr << "error: " << e.error_class() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: InternalError: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
