#pragma once

#include "json.hpp"
#include <optional>
#include <string>
#include <vector>

#include "levyhedge/fbsde_solver.hpp"
#include "levyhedge/hedging.hpp"
#include "levyhedge/market_model.hpp"

namespace levyhedge {

using json = nlohmann::ordered_json;

struct DriverConfig {
    std::string preset;  // brownian | two_atom | mixed; empty = explicit spec
    LevySpec spec;

    LevySpec resolve() const;
};

struct RunConfig {
    int version = 1;

    std::string model_name = "black_scholes";  // | jump_diffusion | large_investor
    MartingaleAllocation allocation;
    ConstantParams params;
    std::vector<double> feedback;  // large_investor
    double wealth_scale = 1.0;
    std::vector<double> initial_prices;
    std::vector<DriverConfig> drivers;

    TimeGrid grid{1.0, 100};
    int paths = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    SolverConfig solver;

    std::string out_dir = "out";
    std::vector<std::string> reports;  // empty = all
};

/// Schema errors carry the path of the offending field.
RunConfig parse_config(const json& j);
RunConfig load_config_file(const std::string& path);

MarketModel build_model(const RunConfig& config);

struct RunArtifacts {
    ScenarioSet scenario;
    FBSDESolution solution;
    HedgeResult hedge;
    bool hedged = false;
    double price = 0.0;
    double price_std_error = 0.0;
    std::vector<double> initial_alpha;  // per asset, mean over paths at step 0
    PositivityReport positivity;
};

/// basis → simulate → solve (→ hedge).
RunArtifacts run_pipeline(const RunConfig& config, bool with_hedge = true);

json basis_report(const RunConfig& config);
json scenario_report(const RunConfig& config, const ScenarioSet& scenario);
json summary_json(const RunConfig& config, const RunArtifacts& artifacts);

/// Writes summary.json plus the CSV detail files into config.out_dir.
/// Returns the summary document.
json write_reports(const RunConfig& config, const RunArtifacts& artifacts);

/// basis | simulate | solve | hedge | run. Throws Error; the CLI maps kinds
/// to exit codes.
json run_command(const std::string& command, const RunConfig& config);

json error_record(ErrorKind kind, const std::string& location, const std::string& message);
int exit_code(ErrorKind kind);

}  // namespace levyhedge
