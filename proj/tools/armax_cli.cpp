#include "armax/app.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> replicates;
    bool print_config = false;
};

int execute(armax::cli::Command command, const Flags& flags) {
    using namespace armax::cli;
    RunConfig rc;
    try {
        json j = json::object();
        if (!flags.config.empty()) {
            std::ifstream in(flags.config);
            if (!in) throw armax::ConfigError("cannot read config '" + flags.config + "'");
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw armax::ConfigError(std::string("invalid JSON: ") + e.what());
            }
        }
        rc = parse_run_config(j);
        rc.command = command;
        if (flags.seed) rc.seed = *flags.seed;
        if (!flags.out.empty()) rc.output_path = flags.out;
        if (flags.replicates) rc.replicates = *flags.replicates;
        if (flags.print_config) {
            validate(rc);
            std::cout << to_json(rc).dump(2) << '\n';
            return kOk;
        }
    } catch (const armax::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return run(rc, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
    using armax::cli::Command;
    CLI::App app{"ARMAX simulation, extremal-dependence and estimation toolkit"};
    app.require_subcommand(1);

    Flags flags;
    const std::pair<const char*, Command> commands[] = {
        {"simulate", Command::simulate},         {"estimate", Command::estimate},
        {"extremal-index", Command::extremal_index}, {"tail-dep", Command::tail_dep},
        {"copula", Command::copula},             {"montecarlo", Command::montecarlo},
    };
    std::optional<Command> chosen;
    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config, "JSON run configuration");
        sub->add_option("--seed", flags.seed, "master seed (u64)");
        sub->add_option("--out", flags.out, "output CSV path");
        sub->add_option("--replicates", flags.replicates, "Monte Carlo replicates");
        sub->add_flag("--print-config", flags.print_config, "print the resolved configuration and exit");
        sub->callback([&chosen, c = cmd] { chosen = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : armax::cli::kConfigError;
    }
    return execute(*chosen, flags);
}
