#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levyhedge/runner.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<int> paths;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

levyhedge::RunConfig load(const Overrides& o) {
    levyhedge::RunConfig config = levyhedge::load_config_file(o.config_path);
    if (o.paths) config.paths = *o.paths;
    if (o.steps) config.grid.steps = *o.steps;
    if (o.seed) config.seed = *o.seed;
    if (o.out) config.out_dir = *o.out;
    if (o.threads) config.threads = *o.threads;
    config.grid.validate();
    if (config.paths < 1)
        throw levyhedge::Error(levyhedge::ErrorKind::config, "paths must be at least 1",
                               "paths");
    if (config.threads < 1)
        throw levyhedge::Error(levyhedge::ErrorKind::config, "threads must be at least 1",
                               "threads");
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levy-driven FBSDE pricing and hedging"};
    app.require_subcommand(1);

    Overrides overrides;
    app.add_option("--config", overrides.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--paths", overrides.paths, "override path count");
    app.add_option("--steps", overrides.steps, "override time steps");
    app.add_option("--seed", overrides.seed, "override RNG seed");
    app.add_option("--out", overrides.out, "override output directory");
    app.add_option("--threads", overrides.threads, "override worker thread count");
    app.fallthrough();

    for (const char* name : {"basis", "simulate", "solve", "hedge", "run"})
        app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const levyhedge::RunConfig config = load(overrides);
        const levyhedge::json result = levyhedge::run_command(command, config);
        std::cout << result.dump(2) << "\n";
        return 0;
    } catch (const levyhedge::Error& e) {
        std::cerr << levyhedge::error_record(e.kind(), e.location(), e.what()).dump() << "\n";
        return levyhedge::exit_code(e.kind());
    } catch (const std::exception& e) {
        levyhedge::json record;
        record["error"] = {{"kind", "internal"}, {"location", ""}, {"message", e.what()}};
        std::cerr << record.dump() << "\n";
        return 3;
    }
}
