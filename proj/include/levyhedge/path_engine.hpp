#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "levyhedge/levy_basis.hpp"
#include "levyhedge/time_grid.hpp"

namespace levyhedge {

struct JumpEvent {
    int path = 0;
    int step = 0;
    int atom = 0;
    long count = 0;
};

/// Simulated driver increments on a time grid. Immutable once built.
struct ScenarioSet {
    TimeGrid grid;
    int n_paths = 0;
    std::uint64_t seed = 0;
    int n_drivers = 0;
    ComponentLayout layout;

    /// Brownian increments, [path][step][driver].
    std::vector<double> brownian;
    /// Per driver, jump events with nonzero count, ordered by (path, step, atom).
    std::vector<std::vector<JumpEvent>> jump_events;
    /// Orthonormalized martingale increments, [path][step][component].
    std::vector<double> dh;

    double db_at(int path, int step, int driver) const {
        return brownian[(static_cast<std::size_t>(path) * grid.steps + step) * n_drivers + driver];
    }
    double dh_at(int path, int step, int component) const {
        return dh[(static_cast<std::size_t>(path) * grid.steps + step) * layout.total + component];
    }
};

/// Simulate all drivers: per-step Brownian increments N(0, dt) and
/// Poisson jump counts per atom, combined into dH through the basis.
/// Reproducible from the seed for any thread count.
ScenarioSet simulate_drivers(const std::vector<LevySpec>& specs, const TimeGrid& grid,
                             int n_paths, std::uint64_t seed, int threads = 1);

/// Deterministic variant: Brownian increments and jump counts are given,
/// only the dH assembly runs. Used to pin down the compensation formula.
ScenarioSet scenario_from_increments(const std::vector<LevySpec>& specs, const TimeGrid& grid,
                                     int n_paths, std::vector<double> brownian,
                                     std::vector<std::vector<JumpEvent>> jumps);

struct BracketEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Normalized realized covariation of components (j,k) and (j2,k2):
/// mean over paths of (1/T) sum_n dH dH', with its Monte Carlo standard
/// error. Equals delta_{jj'} delta_{kk'} in expectation. Indices 1-based.
BracketEstimate empirical_bracket(const ScenarioSet& scenario, int j, int k, int j2, int k2);

/// Debug dump: header plus one line "path,step,j,k,value" per increment.
void write_increments_csv(const ScenarioSet& scenario, std::ostream& out);

}  // namespace levyhedge
