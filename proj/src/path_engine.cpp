#include "levyhedge/path_engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <utility>

#include "levyhedge/errors.hpp"
#include "levyhedge/rng.hpp"
#include "levyhedge/stats.hpp"

namespace levyhedge {

namespace {

/// Per-driver tables for turning raw increments into dH.
struct DriverTables {
    int order = 0;
    std::vector<double> brownian_coeff;        // per k: sigma * q_{k-1}(0)
    std::vector<std::vector<double>> p_at;     // [atom][k]: p_k(x_atom)
    std::vector<double> compensator;           // per k: sum_atoms lambda * p_k(x_atom)
    std::vector<double> atom_intensity;
};

DriverTables make_tables(const LevySpec& spec, const TeugelsBasis& basis) {
    DriverTables t;
    t.order = basis.order();
    t.brownian_coeff.resize(t.order);
    for (int k = 1; k <= t.order; ++k)
        t.brownian_coeff[k - 1] = brownian_coefficient(basis, k);
    t.compensator.assign(t.order, 0.0);
    for (const JumpAtom& atom : spec.jumps.atoms) {
        std::vector<double> row(t.order);
        for (int k = 1; k <= t.order; ++k) {
            row[k - 1] = basis.pairs[static_cast<std::size_t>(k) - 1].p(atom.size);
            t.compensator[k - 1] += atom.intensity * row[k - 1];
        }
        t.p_at.push_back(std::move(row));
        t.atom_intensity.push_back(atom.intensity);
    }
    return t;
}

void fill_dh(ScenarioSet& s, const std::vector<DriverTables>& tables) {
    const int n_steps = s.grid.steps;
    const double dt = s.grid.dt();
    const int total = s.layout.total;

    // Brownian part plus compensator drift, dense.
    for (int path = 0; path < s.n_paths; ++path) {
        for (int step = 0; step < n_steps; ++step) {
            double* out =
                s.dh.data() + (static_cast<std::size_t>(path) * n_steps + step) * total;
            for (int j = 0; j < s.n_drivers; ++j) {
                const DriverTables& t = tables[static_cast<std::size_t>(j)];
                const double db = s.db_at(path, step, j);
                const int off = s.layout.offsets[static_cast<std::size_t>(j)];
                for (int k = 0; k < t.order; ++k)
                    out[off + k] = t.brownian_coeff[static_cast<std::size_t>(k)] * db -
                                   dt * t.compensator[static_cast<std::size_t>(k)];
            }
        }
    }
    // Jump part, sparse.
    for (int j = 0; j < s.n_drivers; ++j) {
        const DriverTables& t = tables[static_cast<std::size_t>(j)];
        const int off = s.layout.offsets[static_cast<std::size_t>(j)];
        for (const JumpEvent& e : s.jump_events[static_cast<std::size_t>(j)]) {
            double* out =
                s.dh.data() + (static_cast<std::size_t>(e.path) * n_steps + e.step) * total;
            const std::vector<double>& row = t.p_at[static_cast<std::size_t>(e.atom)];
            for (int k = 0; k < t.order; ++k)
                out[off + k] += static_cast<double>(e.count) * row[static_cast<std::size_t>(k)];
        }
    }
}

}  // namespace

ScenarioSet simulate_drivers(const std::vector<LevySpec>& specs, const TimeGrid& grid,
                             int n_paths, std::uint64_t seed, int threads) {
    grid.validate();
    if (n_paths < 1)
        throw Error(ErrorKind::config, "need at least one path", "paths");
    if (specs.empty())
        throw Error(ErrorKind::config, "need at least one driver", "drivers");
    if (threads < 1) threads = 1;

    std::vector<TeugelsBasis> bases;
    std::vector<DriverTables> tables;
    for (const LevySpec& spec : specs) {
        spec.validate();
        bases.push_back(build_basis(spec));
        tables.push_back(make_tables(spec, bases.back()));
    }

    ScenarioSet s;
    s.grid = grid;
    s.n_paths = n_paths;
    s.seed = seed;
    s.n_drivers = static_cast<int>(specs.size());
    s.layout = ComponentLayout::from(bases);

    const int n_steps = grid.steps;
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    s.brownian.resize(static_cast<std::size_t>(n_paths) * n_steps * s.n_drivers);
    s.dh.resize(static_cast<std::size_t>(n_paths) * n_steps * s.layout.total);
    s.jump_events.resize(static_cast<std::size_t>(s.n_drivers));

    // Contiguous path ranges per worker; each (path, driver) substream is
    // addressed by counters, so the split does not affect the draws.
    const int n_workers = std::min(threads, n_paths);
    std::vector<std::vector<std::vector<JumpEvent>>> worker_events(
        static_cast<std::size_t>(n_workers));

    auto work = [&](int worker, int lo, int hi) {
        auto& events = worker_events[static_cast<std::size_t>(worker)];
        events.resize(static_cast<std::size_t>(s.n_drivers));
        for (int path = lo; path < hi; ++path) {
            for (int j = 0; j < s.n_drivers; ++j) {
                const LevySpec& spec = specs[static_cast<std::size_t>(j)];
                rng::Substream stream(seed, static_cast<std::uint64_t>(path),
                                      static_cast<std::uint32_t>(j));
                for (int step = 0; step < n_steps; ++step) {
                    s.brownian[(static_cast<std::size_t>(path) * n_steps + step) * s.n_drivers +
                               j] = sqrt_dt * stream.next_normal();
                    for (std::size_t atom = 0; atom < spec.jumps.atoms.size(); ++atom) {
                        const long count =
                            stream.next_poisson(spec.jumps.atoms[atom].intensity * dt);
                        if (count > 0)
                            events[static_cast<std::size_t>(j)].push_back(
                                {path, step, static_cast<int>(atom), count});
                    }
                }
            }
        }
    };

    if (n_workers == 1) {
        work(0, 0, n_paths);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_paths + n_workers - 1) / n_workers;
        for (int worker = 0; worker < n_workers; ++worker) {
            const int lo = worker * chunk;
            const int hi = std::min(n_paths, lo + chunk);
            pool.emplace_back(work, worker, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }

    // Workers own ascending path ranges, so concatenation keeps the
    // (path, step, atom) order.
    for (int j = 0; j < s.n_drivers; ++j)
        for (int worker = 0; worker < n_workers; ++worker)
            for (const JumpEvent& e : worker_events[static_cast<std::size_t>(worker)]
                                                   [static_cast<std::size_t>(j)])
                s.jump_events[static_cast<std::size_t>(j)].push_back(e);

    fill_dh(s, tables);
    return s;
}

ScenarioSet scenario_from_increments(const std::vector<LevySpec>& specs, const TimeGrid& grid,
                                     int n_paths, std::vector<double> brownian,
                                     std::vector<std::vector<JumpEvent>> jumps) {
    grid.validate();
    if (n_paths < 1)
        throw Error(ErrorKind::config, "need at least one path", "paths");

    std::vector<TeugelsBasis> bases;
    std::vector<DriverTables> tables;
    for (const LevySpec& spec : specs) {
        spec.validate();
        bases.push_back(build_basis(spec));
        tables.push_back(make_tables(spec, bases.back()));
    }

    ScenarioSet s;
    s.grid = grid;
    s.n_paths = n_paths;
    s.n_drivers = static_cast<int>(specs.size());
    s.layout = ComponentLayout::from(bases);

    const std::size_t expect =
        static_cast<std::size_t>(n_paths) * grid.steps * s.n_drivers;
    if (brownian.size() != expect)
        throw Error(ErrorKind::config, "brownian increments have wrong shape", "brownian");
    if (jumps.size() != static_cast<std::size_t>(s.n_drivers))
        throw Error(ErrorKind::config, "jump schedule needs one list per driver", "jumps");
    for (std::size_t j = 0; j < jumps.size(); ++j)
        for (const JumpEvent& e : jumps[j])
            if (e.path < 0 || e.path >= n_paths || e.step < 0 || e.step >= grid.steps ||
                e.atom < 0 ||
                e.atom >= static_cast<int>(specs[j].jumps.atoms.size()))
                throw Error(ErrorKind::config, "jump event outside scenario bounds", "jumps");

    s.brownian = std::move(brownian);
    s.jump_events = std::move(jumps);
    s.dh.assign(static_cast<std::size_t>(n_paths) * grid.steps * s.layout.total, 0.0);
    fill_dh(s, tables);
    return s;
}

BracketEstimate empirical_bracket(const ScenarioSet& scenario, int j, int k, int j2, int k2) {
    const int c1 = scenario.layout.flat(j - 1, k);
    const int c2 = scenario.layout.flat(j2 - 1, k2);
    const int n_steps = scenario.grid.steps;
    const double inv_t = 1.0 / scenario.grid.horizon;

    std::vector<double> per_path(static_cast<std::size_t>(scenario.n_paths));
    for (int path = 0; path < scenario.n_paths; ++path) {
        double s = 0.0;
        for (int step = 0; step < n_steps; ++step)
            s += scenario.dh_at(path, step, c1) * scenario.dh_at(path, step, c2);
        per_path[static_cast<std::size_t>(path)] = s * inv_t;
    }
    return {mean(per_path), std_error(per_path)};
}

void write_increments_csv(const ScenarioSet& scenario, std::ostream& out) {
    out << "path,step,j,k,value\n";
    char buf[64];
    for (int path = 0; path < scenario.n_paths; ++path) {
        for (int step = 0; step < scenario.grid.steps; ++step) {
            for (int j = 0; j < scenario.n_drivers; ++j) {
                const int order = scenario.layout.orders[static_cast<std::size_t>(j)];
                for (int k = 1; k <= order; ++k) {
                    const double v =
                        scenario.dh_at(path, step, scenario.layout.flat(j, k));
                    std::snprintf(buf, sizeof buf, "%.17g", v);
                    out << path << ',' << step << ',' << (j + 1) << ',' << k << ',' << buf
                        << '\n';
                }
            }
        }
    }
}

}  // namespace levyhedge
