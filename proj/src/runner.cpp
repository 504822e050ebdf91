#include "levyhedge/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "levyhedge/stats.hpp"

namespace levyhedge {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object())
        throw Error(ErrorKind::config, "expected an object", path);
    auto it = j.find(key);
    if (it == j.end())
        throw Error(ErrorKind::config, "missing required field",
                    path.empty() ? key : path + "." + key);
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw Error(ErrorKind::config, "expected a number", path);
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer())
        throw Error(ErrorKind::config, "expected an integer", path);
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string())
        throw Error(ErrorKind::config, "expected a string", path);
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array())
        throw Error(ErrorKind::config, "expected an array", path);
    return j;
}

std::vector<double> number_list(const json& j, const std::string& path) {
    as_array(j, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

PayoffSpec parse_payoff(const json& j, const std::string& path) {
    PayoffSpec spec;
    const std::string kind = as_string(require(j, "kind", path), path + ".kind");
    if (kind == "call") spec.kind = PayoffSpec::Kind::call;
    else if (kind == "put") spec.kind = PayoffSpec::Kind::put;
    else if (kind == "forward") spec.kind = PayoffSpec::Kind::forward;
    else if (kind == "constant") spec.kind = PayoffSpec::Kind::constant;
    else
        throw Error(ErrorKind::config, "payoff kind must be call|put|forward|constant",
                    path + ".kind");
    if (j.contains("strike")) spec.strike = as_number(j["strike"], path + ".strike");
    if (j.contains("value")) spec.value = as_number(j["value"], path + ".value");
    if (j.contains("asset")) {
        const int asset = as_int(j["asset"], path + ".asset");
        if (asset < 1)
            throw Error(ErrorKind::config, "payoff asset is 1-based", path + ".asset");
        spec.asset = asset - 1;
    }
    return spec;
}

DriverConfig parse_driver(const json& j, const std::string& path) {
    DriverConfig driver;
    if (!j.is_object())
        throw Error(ErrorKind::config, "expected an object", path);
    if (j.contains("preset")) {
        driver.preset = as_string(j["preset"], path + ".preset");
        return driver;
    }
    driver.spec.sigma = j.contains("sigma") ? as_number(j["sigma"], path + ".sigma") : 0.0;
    if (j.contains("atoms")) {
        const json& atoms = as_array(j["atoms"], path + ".atoms");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string apath = path + ".atoms[" + std::to_string(i) + "]";
            JumpAtom atom;
            atom.size = as_number(require(atoms[i], "size", apath), apath + ".size");
            atom.intensity =
                as_number(require(atoms[i], "intensity", apath), apath + ".intensity");
            driver.spec.jumps.atoms.push_back(atom);
        }
    }
    return driver;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::config, "cannot open output file for writing", path.string());
    out << content;
}

}  // namespace

LevySpec DriverConfig::resolve() const {
    if (preset.empty()) return spec;
    if (preset == "brownian") return preset_brownian();
    if (preset == "two_atom") return preset_two_atom();
    if (preset == "mixed") return preset_mixed();
    throw Error(ErrorKind::config, "unknown driver preset '" + preset + "'",
                "model.drivers.preset");
}

RunConfig parse_config(const json& j) {
    RunConfig config;
    if (!j.is_object())
        throw Error(ErrorKind::config, "config root must be an object", "");
    if (j.contains("version")) {
        config.version = as_int(j["version"], "version");
        if (config.version != 1)
            throw Error(ErrorKind::config, "unsupported config version", "version");
    }

    const json& model = require(j, "model", "");
    config.model_name = as_string(require(model, "name", "model"), "model.name");

    const json& dim = require(model, "dimension", "model");
    config.allocation.d = as_int(require(dim, "d", "model.dimension"), "model.dimension.d");
    config.allocation.l = as_int(require(dim, "l", "model.dimension"), "model.dimension.l");
    const json& m = as_array(require(dim, "m", "model.dimension"), "model.dimension.m");
    for (std::size_t i = 0; i < m.size(); ++i)
        config.allocation.m.push_back(
            as_int(m[i], "model.dimension.m[" + std::to_string(i) + "]"));

    if (model.contains("rate")) config.params.rate = as_number(model["rate"], "model.rate");
    config.params.drift = number_list(require(model, "drift", "model"), "model.drift");
    const json& vol = as_array(require(model, "vol", "model"), "model.vol");
    for (std::size_t i = 0; i < vol.size(); ++i)
        config.params.vol.push_back(number_list(vol[i], "model.vol[" + std::to_string(i) + "]"));
    config.params.payoff = parse_payoff(require(model, "payoff", "model"), "model.payoff");
    config.initial_prices =
        number_list(require(model, "initial_prices", "model"), "model.initial_prices");

    const json& drivers = as_array(require(model, "drivers", "model"), "model.drivers");
    for (std::size_t i = 0; i < drivers.size(); ++i)
        config.drivers.push_back(
            parse_driver(drivers[i], "model.drivers[" + std::to_string(i) + "]"));

    if (model.contains("feedback"))
        config.feedback = number_list(model["feedback"], "model.feedback");
    if (model.contains("wealth_scale"))
        config.wealth_scale = as_number(model["wealth_scale"], "model.wealth_scale");

    const json& grid = require(j, "grid", "");
    config.grid.horizon = as_number(require(grid, "horizon", "grid"), "grid.horizon");
    config.grid.steps = as_int(require(grid, "steps", "grid"), "grid.steps");
    config.grid.validate();

    if (j.contains("paths")) config.paths = as_int(j["paths"], "paths");
    if (config.paths < 1)
        throw Error(ErrorKind::config, "paths must be at least 1", "paths");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer())
            throw Error(ErrorKind::config, "expected an integer", "seed");
        config.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) config.threads = as_int(j["threads"], "threads");
    if (config.threads < 1)
        throw Error(ErrorKind::config, "threads must be at least 1", "threads");

    if (j.contains("solver")) {
        const json& solver = j["solver"];
        if (!solver.is_object())
            throw Error(ErrorKind::config, "expected an object", "solver");
        if (solver.contains("max_picard_iterations"))
            config.solver.max_picard_iterations =
                as_int(solver["max_picard_iterations"], "solver.max_picard_iterations");
        if (solver.contains("tolerance"))
            config.solver.picard_tolerance = as_number(solver["tolerance"], "solver.tolerance");
        if (solver.contains("regression")) {
            const json& reg = solver["regression"];
            if (!reg.is_object())
                throw Error(ErrorKind::config, "expected an object", "solver.regression");
            if (reg.contains("degree"))
                config.solver.regression.degree =
                    as_int(reg["degree"], "solver.regression.degree");
            if (reg.contains("cutoff"))
                config.solver.regression.cutoff =
                    as_number(reg["cutoff"], "solver.regression.cutoff");
        }
    }
    config.solver.validate();

    if (j.contains("outputs")) {
        const json& outputs = j["outputs"];
        if (!outputs.is_object())
            throw Error(ErrorKind::config, "expected an object", "outputs");
        if (outputs.contains("directory"))
            config.out_dir = as_string(outputs["directory"], "outputs.directory");
        if (outputs.contains("reports")) {
            const json& reports = as_array(outputs["reports"], "outputs.reports");
            for (std::size_t i = 0; i < reports.size(); ++i)
                config.reports.push_back(
                    as_string(reports[i], "outputs.reports[" + std::to_string(i) + "]"));
        }
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::config, "cannot read config file", path);
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::config, e.what(), path);
    }
    return parse_config(j);
}

MarketModel build_model(const RunConfig& config) {
    std::vector<LevySpec> drivers;
    for (const DriverConfig& driver : config.drivers) drivers.push_back(driver.resolve());

    if (config.model_name == "black_scholes")
        return make_black_scholes(config.allocation, config.params, config.initial_prices,
                                  std::move(drivers));
    if (config.model_name == "jump_diffusion")
        return make_jump_diffusion(config.allocation, config.params, config.initial_prices,
                                   std::move(drivers));
    if (config.model_name == "large_investor") {
        std::vector<double> feedback = config.feedback;
        if (feedback.empty())
            feedback.assign(static_cast<std::size_t>(config.allocation.d), 0.0);
        return make_large_investor(config.allocation, config.params, std::move(feedback),
                                   config.wealth_scale, config.initial_prices,
                                   std::move(drivers));
    }
    throw Error(ErrorKind::config, "unknown model name '" + config.model_name + "'",
                "model.name");
}

RunArtifacts run_pipeline(const RunConfig& config, bool with_hedge) {
    const MarketModel model = build_model(config);

    RunArtifacts art;
    art.scenario =
        simulate_drivers(model.drivers, config.grid, config.paths, config.seed, config.threads);

    SolverConfig solver = config.solver;
    solver.threads = config.threads;
    art.solution = picard_solve(model, art.scenario, solver);

    const int n_paths = art.solution.n_paths;
    const int n_steps = art.solution.grid.steps;
    std::vector<double> column(static_cast<std::size_t>(n_paths));
    for (int path = 0; path < n_paths; ++path)
        column[static_cast<std::size_t>(path)] = art.solution.wealth(path, 0);
    art.price = mean(column);

    // Standard error of the price estimator: discounted terminal payoff
    // spread. The zero portfolio gives the plain money-market discount.
    const std::vector<double> zero_alpha(
        static_cast<std::size_t>(n_paths) * n_steps * art.solution.n_assets, 0.0);
    const std::vector<double> p0 =
        money_market_path(model, art.solution, zero_alpha, config.threads);
    for (int path = 0; path < n_paths; ++path)
        column[static_cast<std::size_t>(path)] =
            art.solution.wealth(path, n_steps) /
            p0[static_cast<std::size_t>(path) * (n_steps + 1) + n_steps];
    art.price_std_error = std_error(column);

    art.positivity = positivity_check(art.solution);

    if (with_hedge) {
        art.hedge = hedge_portfolio(model, art.scenario, art.solution, config.threads);
        art.hedged = true;
        for (int i = 0; i < art.solution.n_assets; ++i) {
            for (int path = 0; path < n_paths; ++path)
                column[static_cast<std::size_t>(path)] = art.hedge.alpha_at(path, 0, i);
            art.initial_alpha.push_back(mean(column));
        }
    }
    return art;
}

json basis_report(const RunConfig& config) {
    json report;
    report["drivers"] = json::array();
    for (std::size_t j = 0; j < config.drivers.size(); ++j) {
        const LevySpec spec = config.drivers[j].resolve();
        spec.validate();
        const TeugelsBasis basis = build_basis(spec);

        json entry;
        entry["driver"] = j + 1;
        entry["sigma"] = spec.sigma;
        entry["atoms"] = json::array();
        for (const JumpAtom& atom : spec.jumps.atoms)
            entry["atoms"].push_back({{"size", atom.size}, {"intensity", atom.intensity}});
        entry["order"] = basis.order();
        entry["q"] = json::array();
        entry["p"] = json::array();
        entry["brownian_coefficients"] = json::array();
        for (int n = 1; n <= basis.order(); ++n) {
            const MartingalePair& pair = basis.pairs[static_cast<std::size_t>(n) - 1];
            entry["q"].push_back(pair.q.coeffs);
            entry["p"].push_back(pair.p.coeffs);
            entry["brownian_coefficients"].push_back(brownian_coefficient(basis, n));
        }
        report["drivers"].push_back(std::move(entry));
    }
    return report;
}

json scenario_report(const RunConfig& config, const ScenarioSet& scenario) {
    json report;
    report["paths"] = scenario.n_paths;
    report["steps"] = scenario.grid.steps;
    report["horizon"] = scenario.grid.horizon;
    report["components"] = json::array();

    std::vector<double> terminal(static_cast<std::size_t>(scenario.n_paths));
    for (int j = 0; j < scenario.n_drivers; ++j) {
        const int order = scenario.layout.orders[static_cast<std::size_t>(j)];
        for (int k = 1; k <= order; ++k) {
            const int flat = scenario.layout.flat(j, k);
            for (int path = 0; path < scenario.n_paths; ++path) {
                double s = 0.0;
                for (int step = 0; step < scenario.grid.steps; ++step)
                    s += scenario.dh_at(path, step, flat);
                terminal[static_cast<std::size_t>(path)] = s;
            }
            const BracketEstimate bracket = empirical_bracket(scenario, j + 1, k, j + 1, k);
            json entry;
            entry["j"] = j + 1;
            entry["k"] = k;
            entry["mean_terminal"] = mean(terminal);
            entry["mean_terminal_std_error"] = std_error(terminal);
            entry["bracket"] = bracket.value;
            entry["bracket_std_error"] = bracket.std_error;
            report["components"].push_back(std::move(entry));
        }
    }
    (void)config;
    return report;
}

json summary_json(const RunConfig& config, const RunArtifacts& artifacts) {
    json s;
    s["version"] = 1;
    s["model"] = config.model_name;
    s["grid"] = {{"horizon", config.grid.horizon}, {"steps", config.grid.steps}};
    s["paths"] = config.paths;
    s["seed"] = config.seed;
    s["price"] = artifacts.price;
    s["price_std_error"] = artifacts.price_std_error;

    json solver;
    solver["iterations"] = artifacts.solution.iterations;
    solver["residual"] = artifacts.solution.residual;
    solver["residual_history"] = artifacts.solution.residual_history;
    solver["regression_condition"] = artifacts.solution.regression_condition;
    s["solver"] = std::move(solver);

    json positivity;
    positivity["negative_fraction"] = artifacts.positivity.negative_fraction;
    positivity["nonpositive_fraction"] = artifacts.positivity.nonpositive_fraction;
    positivity["worst"] = artifacts.positivity.worst;
    s["positivity"] = std::move(positivity);

    if (artifacts.hedged) {
        s["initial_alpha"] = artifacts.initial_alpha;
        s["var_c0"] = artifacts.hedge.c0_variance;
        s["c0_mean"] = artifacts.hedge.c0_mean;
        s["objective"] = {{"hedged", artifacts.hedge.objective.hedged},
                          {"tail", artifacts.hedge.objective.tail},
                          {"total", artifacts.hedge.objective.total()}};
        s["capital_cross_check_gap"] = artifacts.hedge.cross_check_gap;
    }
    return s;
}

json write_reports(const RunConfig& config, const RunArtifacts& artifacts) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);

    const auto want = [&](const std::string& name) {
        if (config.reports.empty()) return name != "increments";
        for (const std::string& r : config.reports)
            if (r == name) return true;
        return false;
    };

    const json summary = summary_json(config, artifacts);
    if (want("summary")) write_file(dir / "summary.json", summary.dump(2) + "\n");

    if (want("basis")) {
        const json basis = basis_report(config);
        write_file(dir / "basis.json", basis.dump(2) + "\n");
    }

    if (artifacts.hedged) {
        const HedgeResult& hedge = artifacts.hedge;
        const int n_steps = hedge.grid.steps;
        const int n_paths = hedge.n_paths;

        if (want("variance_profile")) {
            std::string csv = "step,time,objective,empirical_var_c\n";
            for (int n = 0; n <= n_steps; ++n)
                csv += std::to_string(n) + "," + fmt(hedge.grid.time(n)) + "," +
                       fmt(hedge.variance_profile[static_cast<std::size_t>(n)]) + "," +
                       fmt(hedge.empirical_var_c[static_cast<std::size_t>(n)]) + "\n";
            write_file(dir / "variance_profile.csv", csv);
        }

        if (want("alpha_stats")) {
            std::string csv = "step,time,asset,mean,sd\n";
            std::vector<double> column(static_cast<std::size_t>(n_paths));
            for (int n = 0; n < n_steps; ++n)
                for (int i = 0; i < hedge.n_assets; ++i) {
                    for (int path = 0; path < n_paths; ++path)
                        column[static_cast<std::size_t>(path)] = hedge.alpha_at(path, n, i);
                    csv += std::to_string(n) + "," + fmt(hedge.grid.time(n)) + "," +
                           std::to_string(i + 1) + "," + fmt(mean(column)) + "," +
                           fmt(std::sqrt(sample_variance(column))) + "\n";
                }
            write_file(dir / "alpha_stats.csv", csv);
        }

        if (want("capital_terminal")) {
            std::string csv = "path,c0,c0_formula\n";
            for (int path = 0; path < n_paths; ++path)
                csv += std::to_string(path) + "," + fmt(hedge.c_at(path, 0)) + "," +
                       fmt(hedge.c_formula[static_cast<std::size_t>(path) * (n_steps + 1)]) +
                       "\n";
            write_file(dir / "capital_terminal.csv", csv);
        }
    }

    if (want("increments")) {
        std::ofstream out(dir / "increments.csv", std::ios::binary);
        if (!out)
            throw Error(ErrorKind::config, "cannot open output file for writing",
                        (dir / "increments.csv").string());
        write_increments_csv(artifacts.scenario, out);
    }
    return summary;
}

json run_command(const std::string& command, const RunConfig& config) {
    namespace fs = std::filesystem;
    if (command == "basis") {
        const json report = basis_report(config);
        fs::create_directories(config.out_dir);
        write_file(fs::path(config.out_dir) / "basis.json", report.dump(2) + "\n");
        return report;
    }
    if (command == "simulate") {
        std::vector<LevySpec> specs;
        for (const DriverConfig& driver : config.drivers) specs.push_back(driver.resolve());
        const ScenarioSet scenario =
            simulate_drivers(specs, config.grid, config.paths, config.seed, config.threads);
        const json report = scenario_report(config, scenario);
        fs::create_directories(config.out_dir);
        write_file(fs::path(config.out_dir) / "scenario.json", report.dump(2) + "\n");
        std::ofstream out(fs::path(config.out_dir) / "increments.csv", std::ios::binary);
        if (!out)
            throw Error(ErrorKind::config, "cannot open output file for writing",
                        config.out_dir + "/increments.csv");
        write_increments_csv(scenario, out);
        return report;
    }
    if (command == "solve") {
        const RunArtifacts art = run_pipeline(config, false);
        return write_reports(config, art);
    }
    if (command == "hedge" || command == "run") {
        const RunArtifacts art = run_pipeline(config, true);
        return write_reports(config, art);
    }
    throw Error(ErrorKind::config, "unknown subcommand '" + command + "'", "command");
}

json error_record(ErrorKind kind, const std::string& location, const std::string& message) {
    json record;
    record["error"] = {{"kind", to_string(kind)}, {"location", location}, {"message", message}};
    return record;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config:
        case ErrorKind::degenerate_driver:
        case ErrorKind::index_out_of_range:
            return 2;
        case ErrorKind::non_finite:
        case ErrorKind::rank_deficient_regression:
        case ErrorKind::no_convergence:
        case ErrorKind::singular_sigma:
            return 3;
    }
    return 3;
}

}  // namespace levyhedge
