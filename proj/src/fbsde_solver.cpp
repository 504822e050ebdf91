#include "levyhedge/fbsde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "levyhedge/errors.hpp"
#include "levyhedge/stats.hpp"
#include "parallel_util.hpp"

namespace levyhedge {

using detail::parallel_paths;

namespace {

void check_same_drivers(const MarketModel& model, const ScenarioSet& scenario) {
    if (scenario.layout.orders != model.layout.orders)
        throw Error(ErrorKind::config,
                    "scenario was simulated for a different driver set than the model",
                    "scenario");
}

/// Minimum-norm portfolio for the g evaluation inside the sweep. The strict
/// invertibility guard lives in optimal_portfolio; here a singular system
/// (e.g. sigma == 0 in degenerate test markets) degrades to the zero
/// component instead of failing.
void pseudo_portfolio(const MarketModel& model, double t, std::span<const double> prices,
                      double w, std::span<const double> z, std::span<double> alpha_out) {
    const int d = model.allocation.d;
    if (d == 1) {
        const double m =
            model.coefficients.vol[0][0](t, prices, w) * prices[0];
        const double zd = z[static_cast<std::size_t>(model.ordering.flat[0])];
        alpha_out[0] = m != 0.0 ? zd / m : 0.0;
        return;
    }
    Eigen::MatrixXd mat(d, d);
    Eigen::VectorXd rhs(d);
    for (int row = 0; row < d; ++row) {
        for (int i = 0; i < d; ++i)
            mat(row, i) = model.coefficients.vol[static_cast<std::size_t>(i)]
                                                [static_cast<std::size_t>(row)](t, prices, w) *
                          prices[static_cast<std::size_t>(i)];
        rhs(row) = z[static_cast<std::size_t>(model.ordering.flat[static_cast<std::size_t>(row)])];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(mat);
    const Eigen::VectorXd a = cod.solve(rhs);
    for (int i = 0; i < d; ++i) alpha_out[static_cast<std::size_t>(i)] = a(i);
}

}  // namespace

void RegressionSpec::validate() const {
    if (degree < 0)
        throw Error(ErrorKind::config, "regression degree must be nonnegative",
                    "solver.regression.degree");
    if (!(cutoff > 0.0))
        throw Error(ErrorKind::config, "singular-value cutoff must be positive",
                    "solver.regression.cutoff");
}

void SolverConfig::validate() const {
    if (max_picard_iterations < 1)
        throw Error(ErrorKind::config, "need at least one picard iteration",
                    "solver.max_picard_iterations");
    if (!(picard_tolerance > 0.0))
        throw Error(ErrorKind::config, "picard tolerance must be positive",
                    "solver.tolerance");
    regression.validate();
}

std::vector<double> forward_prices(const MarketModel& model, const ScenarioSet& scenario,
                                   const std::vector<double>* w_prev,
                                   const std::vector<double>* z_prev, int threads) {
    check_same_drivers(model, scenario);
    const int n_steps = scenario.grid.steps;
    const int n_paths = scenario.n_paths;
    const int d = model.allocation.d;
    const int total = scenario.layout.total;
    const double dt = scenario.grid.dt();

    std::vector<double> p(static_cast<std::size_t>(n_paths) * (n_steps + 1) * d);
    const std::vector<double> zero_z(static_cast<std::size_t>(total), 0.0);

    parallel_paths(n_paths, threads, [&](int lo, int hi) {
        for (int path = lo; path < hi; ++path) {
            double* row0 = p.data() + static_cast<std::size_t>(path) * (n_steps + 1) * d;
            for (int i = 0; i < d; ++i) row0[i] = model.initial_prices[static_cast<std::size_t>(i)];
            for (int n = 0; n < n_steps; ++n) {
                const double t = scenario.grid.time(n);
                const double* cur =
                    p.data() + (static_cast<std::size_t>(path) * (n_steps + 1) + n) * d;
                double* next =
                    p.data() + (static_cast<std::size_t>(path) * (n_steps + 1) + n + 1) * d;
                const std::span<const double> pi{cur, static_cast<std::size_t>(d)};
                const double w =
                    w_prev ? (*w_prev)[static_cast<std::size_t>(path) * (n_steps + 1) + n] : 0.0;
                const std::span<const double> z =
                    z_prev ? std::span<const double>{
                                 z_prev->data() +
                                     (static_cast<std::size_t>(path) * n_steps + n) * total,
                                 static_cast<std::size_t>(total)}
                           : std::span<const double>{zero_z};

                for (int i = 0; i < d; ++i) {
                    double incr =
                        model.coefficients.drift[static_cast<std::size_t>(i)](t, pi, w, z) * dt;
                    for (int row = 0; row < d; ++row) {
                        const double s = model.coefficients.vol[static_cast<std::size_t>(i)]
                                                               [static_cast<std::size_t>(row)](
                            t, pi, w);
                        incr += s * scenario.dh_at(
                                        path, n,
                                        model.ordering.flat[static_cast<std::size_t>(row)]);
                    }
                    const double value = cur[i] * (1.0 + incr);
                    if (!std::isfinite(value))
                        throw Error(ErrorKind::non_finite,
                                    "forward price blew up",
                                    "path=" + std::to_string(path) +
                                        ",step=" + std::to_string(n + 1) +
                                        ",asset=" + std::to_string(i + 1));
                    next[i] = value;
                }
            }
        }
    });
    return p;
}

BackwardSweepResult backward_sweep(const MarketModel& model, const ScenarioSet& scenario,
                                   const std::vector<double>& p, const SolverConfig& config) {
    check_same_drivers(model, scenario);
    config.validate();
    const int n_steps = scenario.grid.steps;
    const int n_paths = scenario.n_paths;
    const int d = model.allocation.d;
    const int total = scenario.layout.total;
    const double dt = scenario.grid.dt();
    const int threads = std::max(1, config.threads);

    if (p.size() != static_cast<std::size_t>(n_paths) * (n_steps + 1) * d)
        throw Error(ErrorKind::config, "price array does not match the scenario shape", "p");

    const MonomialBasis features = MonomialBasis::total_degree(d, config.regression.degree);
    const int n_features = features.size() + 1;  // monomials plus the payoff itself
    if (n_paths < n_features)
        throw Error(ErrorKind::rank_deficient_regression,
                    "too few paths (" + std::to_string(n_paths) + ") for feature degree " +
                        std::to_string(config.regression.degree) + " (needs at least " +
                        std::to_string(n_features) + ")");

    BackwardSweepResult out;
    out.w.resize(static_cast<std::size_t>(n_paths) * (n_steps + 1));
    out.z.resize(static_cast<std::size_t>(n_paths) * n_steps * total);
    out.regression_condition.assign(static_cast<std::size_t>(n_steps), 0.0);

    auto price_row = [&](int path, int step) {
        return std::span<const double>{
            p.data() + (static_cast<std::size_t>(path) * (n_steps + 1) + step) * d,
            static_cast<std::size_t>(d)};
    };

    parallel_paths(n_paths, threads, [&](int lo, int hi) {
        for (int path = lo; path < hi; ++path) {
            const double h = payoff_h(model, price_row(path, n_steps));
            if (!std::isfinite(h))
                throw Error(ErrorKind::non_finite, "payoff is not finite",
                            "path=" + std::to_string(path));
            out.w[static_cast<std::size_t>(path) * (n_steps + 1) + n_steps] = h;
        }
    });

    Eigen::MatrixXd states(n_paths, d);
    Eigen::MatrixXd payoff_column(n_paths, 1);
    Eigen::VectorXd y(n_paths);
    Eigen::VectorXd w_next(n_paths);

    for (int n = n_steps - 1; n >= 0; --n) {
        const double t = scenario.grid.time(n);

        parallel_paths(n_paths, threads, [&](int lo, int hi) {
            for (int path = lo; path < hi; ++path) {
                const auto row = price_row(path, n);
                for (int i = 0; i < d; ++i) states(path, i) = row[static_cast<std::size_t>(i)];
                payoff_column(path, 0) = payoff_h(model, row);
                w_next(path) =
                    out.w[static_cast<std::size_t>(path) * (n_steps + 1) + n + 1];
            }
        });

        // Monomials alone track neither the payoff kink nor the linear
        // deep-in-the-money branch; the payoff column supplies both, which is
        // what keeps the fitted Z sane on the sparsely populated price tails.
        // Winsorizing the monomial inputs (not the payoff) flattens the fit
        // past the outer quantiles, where a handful of extreme paths would
        // otherwise steer the polynomial.
        Eigen::MatrixXd design(n_paths, n_features);
        design.leftCols(features.size()) =
            design_matrix(winsorize_columns(states, 0.005), features);
        design.col(features.size()) = standardize_columns(payoff_column).col(0);
        const LeastSquaresProjector projector(design, config.regression.cutoff);
        out.regression_condition[static_cast<std::size_t>(n)] = projector.condition();

        const Eigen::VectorXd w_hat = projector.project(w_next);

        // Project the residual, not W itself: the fitted part has conditional
        // mean zero against dH, so this changes nothing in expectation but
        // removes the O(|W|/sqrt(dt)) noise floor that otherwise accumulates
        // into the hedge over many steps.
        for (int c = 0; c < total; ++c) {
            parallel_paths(n_paths, threads, [&](int lo, int hi) {
                for (int path = lo; path < hi; ++path)
                    y(path) = (w_next(path) - w_hat(path)) * scenario.dh_at(path, n, c);
            });
            const Eigen::VectorXd zc = projector.project(y) / dt;
            parallel_paths(n_paths, threads, [&](int lo, int hi) {
                for (int path = lo; path < hi; ++path)
                    out.z[(static_cast<std::size_t>(path) * n_steps + n) * total + c] = zc(path);
            });
        }

        parallel_paths(n_paths, threads, [&](int lo, int hi) {
            std::vector<double> alpha(static_cast<std::size_t>(d));
            for (int path = lo; path < hi; ++path) {
                const auto pi = price_row(path, n);
                const double fitted = w_hat(path);
                const std::span<const double> z{
                    out.z.data() + (static_cast<std::size_t>(path) * n_steps + n) * total,
                    static_cast<std::size_t>(total)};
                pseudo_portfolio(model, t, pi, fitted, z, alpha);
                const double g = drift_g(model, t, pi, fitted, alpha, z);
                const double w_n = fitted - g * dt;
                if (!std::isfinite(w_n))
                    throw Error(ErrorKind::non_finite, "backward wealth is not finite",
                                "path=" + std::to_string(path) + ",step=" + std::to_string(n));
                out.w[static_cast<std::size_t>(path) * (n_steps + 1) + n] = w_n;
            }
        });
    }
    return out;
}

FBSDESolution picard_solve(const MarketModel& model, const ScenarioSet& scenario,
                           const SolverConfig& config) {
    check_same_drivers(model, scenario);
    config.validate();
    const int n_paths = scenario.n_paths;
    const int threads = std::max(1, config.threads);

    FBSDESolution sol;
    sol.grid = scenario.grid;
    sol.n_paths = n_paths;
    sol.n_assets = model.allocation.d;
    sol.n_components = scenario.layout.total;

    std::vector<double> w_prev;
    std::vector<double> z_prev;
    bool have_prev = false;

    for (int it = 1; it <= config.max_picard_iterations; ++it) {
        std::vector<double> p = forward_prices(model, scenario, have_prev ? &w_prev : nullptr,
                                               have_prev ? &z_prev : nullptr, threads);
        BackwardSweepResult sweep = backward_sweep(model, scenario, p, config);

        double residual = 0.0;
        if (have_prev) {
            for (std::size_t i = 0; i < sweep.w.size(); ++i)
                residual = std::max(residual, std::fabs(sweep.w[i] - w_prev[i]));
        } else {
            for (double v : sweep.w) residual = std::max(residual, std::fabs(v));
        }
        sol.residual_history.push_back(residual);

        w_prev = std::move(sweep.w);
        z_prev = std::move(sweep.z);
        sol.p = std::move(p);
        sol.regression_condition = std::move(sweep.regression_condition);
        have_prev = true;

        if (residual <= config.picard_tolerance) {
            sol.w = std::move(w_prev);
            sol.z = std::move(z_prev);
            sol.iterations = it;
            sol.residual = residual;
            return sol;
        }
    }
    throw NoConvergenceError(
        "picard iteration did not reach tolerance " +
            std::to_string(config.picard_tolerance) + " in " +
            std::to_string(config.max_picard_iterations) + " iterations",
        sol.residual_history);
}

}  // namespace levyhedge
