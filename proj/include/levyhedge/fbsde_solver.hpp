#pragma once

#include <span>
#include <vector>

#include "levyhedge/market_model.hpp"
#include "levyhedge/path_engine.hpp"
#include "levyhedge/regression.hpp"

namespace levyhedge {

struct RegressionSpec {
    int degree = 5;        // polynomial features of P(t_n), total degree <= q
    double cutoff = 1e-12; // relative singular-value cutoff

    void validate() const;
};

struct SolverConfig {
    int max_picard_iterations = 20;
    double picard_tolerance = 1e-8;  // sup over paths/steps of |dW|
    RegressionSpec regression;
    int threads = 1;

    void validate() const;
};

/// Discrete solution triple on the scenario's grid. Z carries every basis
/// order k <= K(j) — the unhedged tail orders are needed by the variance
/// objective and are exact because each atomic basis terminates.
struct FBSDESolution {
    TimeGrid grid;
    int n_paths = 0;
    int n_assets = 0;
    int n_components = 0;

    std::vector<double> p;  // [path][step 0..N][asset]
    std::vector<double> w;  // [path][step 0..N]
    std::vector<double> z;  // [path][step 0..N-1][component]

    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;        // sup |dW| per Picard iterate
    std::vector<double> regression_condition;    // per step, last sweep

    double price(int path, int step, int asset) const {
        return p[(static_cast<std::size_t>(path) * (grid.steps + 1) + step) * n_assets + asset];
    }
    std::span<const double> prices_at(int path, int step) const {
        return {p.data() + (static_cast<std::size_t>(path) * (grid.steps + 1) + step) * n_assets,
                static_cast<std::size_t>(n_assets)};
    }
    double wealth(int path, int step) const {
        return w[static_cast<std::size_t>(path) * (grid.steps + 1) + step];
    }
    std::span<const double> z_at(int path, int step) const {
        return {z.data() + (static_cast<std::size_t>(path) * grid.steps + step) * n_components,
                static_cast<std::size_t>(n_components)};
    }
};

/// Explicit Euler forward pass:
/// P_i(t_{n+1}) = P_i(t_n)·(1 + f_i·dt + Σ_{j,k<=m(j)} σ_i^{(jk)}·ΔH^{(jk)}_n).
/// w_prev/z_prev hold the previous Picard iterate (null means zero) and feed
/// any coefficient that looks at W or Z.
std::vector<double> forward_prices(const MarketModel& model, const ScenarioSet& scenario,
                                   const std::vector<double>* w_prev = nullptr,
                                   const std::vector<double>* z_prev = nullptr,
                                   int threads = 1);

struct BackwardSweepResult {
    std::vector<double> w;                     // [path][step 0..N]
    std::vector<double> z;                     // [path][step 0..N-1][component]
    std::vector<double> regression_condition;  // per step
};

/// Backward LSMC sweep: W_N = h(P_N); for n = N-1..0, with
/// W^_n = E^[W_{n+1} | features(P_n)]:
///   Z_{jk}(t_n) = (1/dt)·E^[(W_{n+1} − W^_n)·ΔH^{(jk)}_n | features(P_n)],
///   all k <= K(j) (centering W leaves the estimate unbiased and drops its
///   variance by orders of magnitude), and W_n = W^_n − g(t_n, P_n, W^_n, Z_n)·dt.
/// Features: total-degree monomials of P(t_n) plus the payoff h(P(t_n)).
BackwardSweepResult backward_sweep(const MarketModel& model, const ScenarioSet& scenario,
                                   const std::vector<double>& p, const SolverConfig& config);

/// Alternate forward_prices / backward_sweep on one fixed scenario until the
/// sup-norm change in W drops below tolerance.
FBSDESolution picard_solve(const MarketModel& model, const ScenarioSet& scenario,
                           const SolverConfig& config);

}  // namespace levyhedge
