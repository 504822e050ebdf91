#pragma once

#include <Eigen/Dense>
#include <vector>

#include "levyhedge/fbsde_solver.hpp"
#include "levyhedge/market_model.hpp"
#include "levyhedge/path_engine.hpp"

namespace levyhedge {

struct VarianceObjective {
    double hedged = 0.0;  // Σ over hedged rows of |Σ_i α_i P_i σ_i^(jk) − Z_jk|²
    double tail = 0.0;    // Σ over tail rows of |Z_jk|²
    double total() const { return hedged + tail; }
};

struct BsQuote {
    double price = 0.0;
    double delta = 0.0;
};

struct PositivityReport {
    std::vector<double> negative_fraction;     // share of (path, step) with P_i < 0
    std::vector<double> nonpositive_fraction;  // share with P_i <= 0
    std::vector<double> worst;                 // most negative excursion per asset
};

struct HedgeResult {
    TimeGrid grid;
    int n_paths = 0;
    int n_assets = 0;

    std::vector<double> alpha;      // [path][step 0..N-1][asset], share counts
    std::vector<double> alpha0;     // [path][step 0..N-1], money-market weight
    std::vector<double> p0;         // [path][step 0..N]
    std::vector<double> c;          // [path][step 0..N], budget-residual route, C(T)=0
    std::vector<double> c_formula;  // [path][step 0..N], martingale-sum route

    std::vector<double> variance_profile;  // per step: objective estimate over [t_n, T]
    std::vector<double> empirical_var_c;   // per step: Var over paths of c(t_n)
    std::vector<double> sigma_condition;   // [path][step]

    VarianceObjective objective;  // at t = 0
    double c0_mean = 0.0;         // budget route
    double c0_variance = 0.0;
    double cross_check_gap = 0.0;  // max |c − c_formula|

    double alpha_at(int path, int step, int asset) const {
        return alpha[(static_cast<std::size_t>(path) * grid.steps + step) * n_assets + asset];
    }
    double p0_at(int path, int step) const {
        return p0[static_cast<std::size_t>(path) * (grid.steps + 1) + step];
    }
    double c_at(int path, int step) const {
        return c[static_cast<std::size_t>(path) * (grid.steps + 1) + step];
    }
};

/// Solve Σ·α = z_d for one (path, step); throws SingularSigma when the
/// condition number exceeds 1e12.
Eigen::VectorXd solve_portfolio(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& z_d,
                                int path = -1, int step = -1);

/// α(t_n) from the hedged Z components: the d×d system assembled from the
/// relative volatilities scaled by prices (column i times P_i), so α counts
/// shares and Σ_i α_i P_i σ_i^(jk) reproduces Z_jk.
/// Returns [path][step 0..N-1][asset]; condition numbers optionally recorded.
std::vector<double> optimal_portfolio(const MarketModel& model, const FBSDESolution& solution,
                                      std::vector<double>* condition_out = nullptr,
                                      int threads = 1);

/// P0(t_{n+1}) = P0(t_n)·exp(r(t_n, W_n, α_n)·dt), P0(0) = 1.
std::vector<double> money_market_path(const MarketModel& model, const FBSDESolution& solution,
                                      const std::vector<double>& alpha, int threads = 1);

/// α0 = (W − Σ_i α_i P_i) / P0, exact by construction.
std::vector<double> money_weights(const FBSDESolution& solution, const std::vector<double>& alpha,
                                  const std::vector<double>& p0);

/// Stochastic-integral realization:
/// C(t_n) = Σ_{m≥n} [ Σ_{hedged}(Σ_i α_i P_i σ_i^(jk) − Z_jk)·ΔH_m − Σ_{tail} Z_jk·ΔH_m ].
std::vector<double> capital_process(const MarketModel& model, const ScenarioSet& scenario,
                                    const FBSDESolution& solution,
                                    const std::vector<double>& alpha);

/// Budget-identity realization: ΔC_n = ΔW_n − Σ_i α_i ΔP_i − α0 ΔP0, C(T) = 0,
/// accumulated backward. Holds path-by-path in the discretization.
std::vector<double> capital_process_budget(const FBSDESolution& solution,
                                           const std::vector<double>& alpha,
                                           const std::vector<double>& alpha0,
                                           const std::vector<double>& p0);

/// Monte Carlo estimate of E ∫_{t}^{T} [Σ_hedged |Σ_i α_i P_i σ_i^(jk) − Z_jk|²
/// + Σ_tail |Z_jk|²] ds from step t_index on.
VarianceObjective variance_objective(const MarketModel& model, const FBSDESolution& solution,
                                     const std::vector<double>& alpha, int t_index = 0);

/// Full hedge report: α, α0, P0, both capital routes, variance profile.
HedgeResult hedge_portfolio(const MarketModel& model, const ScenarioSet& scenario,
                            const FBSDESolution& solution, int threads = 1);

/// Closed-form call price and delta.
BsQuote bs_oracle(double s0, double strike, double rate, double vol, double horizon);

PositivityReport positivity_check(const FBSDESolution& solution);

}  // namespace levyhedge
