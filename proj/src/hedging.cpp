#include "levyhedge/hedging.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "levyhedge/errors.hpp"
#include "levyhedge/stats.hpp"
#include "parallel_util.hpp"

namespace levyhedge {

using detail::parallel_paths;

namespace {

constexpr double kConditionLimit = 1e12;

std::string at(int path, int step) {
    return "path=" + std::to_string(path) + ",step=" + std::to_string(step);
}

/// Price-scaled hedging matrix: M(row, i) = sigma_i^(row)(t, pi, w) * pi_i,
/// so that M·alpha = Z^(d) holds in share units.
void scaled_sigma(const MarketModel& model, double t, std::span<const double> prices, double w,
                  Eigen::MatrixXd& mat) {
    const int d = model.allocation.d;
    for (int row = 0; row < d; ++row)
        for (int i = 0; i < d; ++i)
            mat(row, i) = model.coefficients.vol[static_cast<std::size_t>(i)]
                                                [static_cast<std::size_t>(row)](t, prices, w) *
                          prices[static_cast<std::size_t>(i)];
}

/// Per-path contribution of step n to the variance integrand, split into
/// the hedgeable part and the unhedgeable tail.
void integrand_at(const MarketModel& model, const FBSDESolution& sol,
                  const std::vector<double>& alpha, int path, int n, double& hedged,
                  double& tail) {
    const int d = sol.n_assets;
    const double t = sol.grid.time(n);
    const auto pi = sol.prices_at(path, n);
    const double w = sol.wealth(path, n);
    const auto z = sol.z_at(path, n);
    const double* a =
        alpha.data() + (static_cast<std::size_t>(path) * sol.grid.steps + n) * d;

    hedged = 0.0;
    for (std::size_t row = 0; row < model.ordering.flat.size(); ++row) {
        double loading = 0.0;
        for (int i = 0; i < d; ++i)
            loading += a[i] * pi[static_cast<std::size_t>(i)] *
                       model.coefficients.vol[static_cast<std::size_t>(i)][row](t, pi, w);
        const double gap = loading - z[static_cast<std::size_t>(model.ordering.flat[row])];
        hedged += gap * gap;
    }
    tail = 0.0;
    for (int c : model.tail_flat) {
        const double zc = z[static_cast<std::size_t>(c)];
        tail += zc * zc;
    }
}

}  // namespace

Eigen::VectorXd solve_portfolio(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& z_d,
                                int path, int step) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double smax = sv(0);
    if (!(smin > 0.0) || smax / smin > kConditionLimit)
        throw Error(ErrorKind::singular_sigma,
                    "sigma matrix is singular or too ill-conditioned to invert",
                    path >= 0 ? at(path, step) : "");
    return svd.solve(z_d);
}

std::vector<double> optimal_portfolio(const MarketModel& model, const FBSDESolution& solution,
                                      std::vector<double>* condition_out, int threads) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const int d = solution.n_assets;

    std::vector<double> alpha(static_cast<std::size_t>(n_paths) * n_steps * d);
    if (condition_out)
        condition_out->assign(static_cast<std::size_t>(n_paths) * n_steps, 0.0);

    parallel_paths(n_paths, threads, [&](int lo, int hi) {
        Eigen::MatrixXd mat(d, d);
        Eigen::VectorXd rhs(d);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd;
        for (int path = lo; path < hi; ++path) {
            for (int n = 0; n < n_steps; ++n) {
                const double t = solution.grid.time(n);
                const auto pi = solution.prices_at(path, n);
                const double w = solution.wealth(path, n);
                const auto z = solution.z_at(path, n);
                double* out =
                    alpha.data() + (static_cast<std::size_t>(path) * n_steps + n) * d;

                if (d == 1) {
                    const double m = model.coefficients.vol[0][0](t, pi, w) * pi[0];
                    if (m == 0.0)
                        throw Error(ErrorKind::singular_sigma,
                                    "sigma matrix is singular", at(path, n));
                    out[0] = z[static_cast<std::size_t>(model.ordering.flat[0])] / m;
                    if (condition_out)
                        (*condition_out)[static_cast<std::size_t>(path) * n_steps + n] = 1.0;
                } else {
                    scaled_sigma(model, t, pi, w, mat);
                    for (int row = 0; row < d; ++row)
                        rhs(row) = z[static_cast<std::size_t>(
                            model.ordering.flat[static_cast<std::size_t>(row)])];
                    svd.compute(mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
                    const Eigen::VectorXd& sv = svd.singularValues();
                    const double smin = sv(d - 1);
                    const double cond = smin > 0.0 ? sv(0) / smin
                                                   : std::numeric_limits<double>::infinity();
                    if (!(smin > 0.0) || cond > kConditionLimit)
                        throw Error(ErrorKind::singular_sigma,
                                    "sigma matrix is singular or too ill-conditioned to invert",
                                    at(path, n));
                    const Eigen::VectorXd a = svd.solve(rhs);
                    for (int i = 0; i < d; ++i) out[i] = a(i);
                    if (condition_out)
                        (*condition_out)[static_cast<std::size_t>(path) * n_steps + n] = cond;
                }
                for (int i = 0; i < d; ++i)
                    if (!std::isfinite(out[i]))
                        throw Error(ErrorKind::non_finite, "portfolio weight is not finite",
                                    at(path, n));
            }
        }
    });
    return alpha;
}

std::vector<double> money_market_path(const MarketModel& model, const FBSDESolution& solution,
                                      const std::vector<double>& alpha, int threads) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const int d = solution.n_assets;
    const double dt = solution.grid.dt();

    std::vector<double> p0(static_cast<std::size_t>(n_paths) * (n_steps + 1));
    parallel_paths(n_paths, threads, [&](int lo, int hi) {
        for (int path = lo; path < hi; ++path) {
            double* row = p0.data() + static_cast<std::size_t>(path) * (n_steps + 1);
            row[0] = 1.0;
            for (int n = 0; n < n_steps; ++n) {
                const std::span<const double> a{
                    alpha.data() + (static_cast<std::size_t>(path) * n_steps + n) * d,
                    static_cast<std::size_t>(d)};
                const double r = model.coefficients.rate(solution.grid.time(n),
                                                         solution.wealth(path, n), a);
                row[n + 1] = row[n] * std::exp(r * dt);
                if (!std::isfinite(row[n + 1]))
                    throw Error(ErrorKind::non_finite, "money market account is not finite",
                                at(path, n + 1));
            }
        }
    });
    return p0;
}

std::vector<double> money_weights(const FBSDESolution& solution,
                                  const std::vector<double>& alpha,
                                  const std::vector<double>& p0) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const int d = solution.n_assets;

    std::vector<double> alpha0(static_cast<std::size_t>(n_paths) * n_steps);
    for (int path = 0; path < n_paths; ++path) {
        for (int n = 0; n < n_steps; ++n) {
            const auto pi = solution.prices_at(path, n);
            double invested = 0.0;
            for (int i = 0; i < d; ++i)
                invested += alpha[(static_cast<std::size_t>(path) * n_steps + n) * d + i] *
                            pi[static_cast<std::size_t>(i)];
            alpha0[static_cast<std::size_t>(path) * n_steps + n] =
                (solution.wealth(path, n) - invested) /
                p0[static_cast<std::size_t>(path) * (n_steps + 1) + n];
        }
    }
    return alpha0;
}

std::vector<double> capital_process(const MarketModel& model, const ScenarioSet& scenario,
                                    const FBSDESolution& solution,
                                    const std::vector<double>& alpha) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const int d = solution.n_assets;

    std::vector<double> c(static_cast<std::size_t>(n_paths) * (n_steps + 1), 0.0);
    for (int path = 0; path < n_paths; ++path) {
        double* row = c.data() + static_cast<std::size_t>(path) * (n_steps + 1);
        row[n_steps] = 0.0;
        for (int m = n_steps - 1; m >= 0; --m) {
            const double t = solution.grid.time(m);
            const auto pi = solution.prices_at(path, m);
            const double w = solution.wealth(path, m);
            const auto z = solution.z_at(path, m);
            const double* a =
                alpha.data() + (static_cast<std::size_t>(path) * n_steps + m) * d;

            double term = 0.0;
            for (std::size_t row_i = 0; row_i < model.ordering.flat.size(); ++row_i) {
                double loading = 0.0;
                for (int i = 0; i < d; ++i)
                    loading += a[i] * pi[static_cast<std::size_t>(i)] *
                               model.coefficients.vol[static_cast<std::size_t>(i)][row_i](t, pi,
                                                                                          w);
                const int flat = model.ordering.flat[row_i];
                term += (loading - z[static_cast<std::size_t>(flat)]) *
                        scenario.dh_at(path, m, flat);
            }
            for (int flat : model.tail_flat)
                term -= z[static_cast<std::size_t>(flat)] * scenario.dh_at(path, m, flat);
            row[m] = row[m + 1] + term;
        }
    }
    return c;
}

std::vector<double> capital_process_budget(const FBSDESolution& solution,
                                           const std::vector<double>& alpha,
                                           const std::vector<double>& alpha0,
                                           const std::vector<double>& p0) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const int d = solution.n_assets;

    std::vector<double> c(static_cast<std::size_t>(n_paths) * (n_steps + 1), 0.0);
    for (int path = 0; path < n_paths; ++path) {
        double* row = c.data() + static_cast<std::size_t>(path) * (n_steps + 1);
        const double* p0_row = p0.data() + static_cast<std::size_t>(path) * (n_steps + 1);
        row[n_steps] = 0.0;
        for (int n = n_steps - 1; n >= 0; --n) {
            const auto pi = solution.prices_at(path, n);
            const auto pi_next = solution.prices_at(path, n + 1);
            double gains = 0.0;
            for (int i = 0; i < d; ++i)
                gains += alpha[(static_cast<std::size_t>(path) * n_steps + n) * d + i] *
                         (pi_next[static_cast<std::size_t>(i)] - pi[static_cast<std::size_t>(i)]);
            gains += alpha0[static_cast<std::size_t>(path) * n_steps + n] *
                     (p0_row[n + 1] - p0_row[n]);
            const double dw = solution.wealth(path, n + 1) - solution.wealth(path, n);
            const double dc = dw - gains;
            row[n] = row[n + 1] - dc;
        }
    }
    return c;
}

VarianceObjective variance_objective(const MarketModel& model, const FBSDESolution& solution,
                                     const std::vector<double>& alpha, int t_index) {
    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const double dt = solution.grid.dt();

    std::vector<double> hedged(static_cast<std::size_t>(n_paths), 0.0);
    std::vector<double> tail(static_cast<std::size_t>(n_paths), 0.0);
    for (int path = 0; path < n_paths; ++path) {
        double acc_h = 0.0;
        double acc_t = 0.0;
        for (int n = t_index; n < n_steps; ++n) {
            double h, t;
            integrand_at(model, solution, alpha, path, n, h, t);
            acc_h += h;
            acc_t += t;
        }
        hedged[static_cast<std::size_t>(path)] = acc_h * dt;
        tail[static_cast<std::size_t>(path)] = acc_t * dt;
    }
    return {mean(hedged), mean(tail)};
}

HedgeResult hedge_portfolio(const MarketModel& model, const ScenarioSet& scenario,
                            const FBSDESolution& solution, int threads) {
    HedgeResult result;
    result.grid = solution.grid;
    result.n_paths = solution.n_paths;
    result.n_assets = solution.n_assets;

    result.alpha = optimal_portfolio(model, solution, &result.sigma_condition, threads);
    result.p0 = money_market_path(model, solution, result.alpha, threads);
    result.alpha0 = money_weights(solution, result.alpha, result.p0);
    result.c = capital_process_budget(solution, result.alpha, result.alpha0, result.p0);
    result.c_formula = capital_process(model, scenario, solution, result.alpha);

    double gap = 0.0;
    for (std::size_t i = 0; i < result.c.size(); ++i)
        gap = std::max(gap, std::fabs(result.c[i] - result.c_formula[i]));
    result.cross_check_gap = gap;

    const int n_steps = solution.grid.steps;
    const int n_paths = solution.n_paths;
    const double dt = solution.grid.dt();

    // Suffix accumulation of the variance integrand, per path, split parts.
    std::vector<double> acc_h(static_cast<std::size_t>(n_paths), 0.0);
    std::vector<double> acc_t(static_cast<std::size_t>(n_paths), 0.0);
    result.variance_profile.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
    for (int n = n_steps - 1; n >= 0; --n) {
        for (int path = 0; path < n_paths; ++path) {
            double h, t;
            integrand_at(model, solution, result.alpha, path, n, h, t);
            acc_h[static_cast<std::size_t>(path)] += h;
            acc_t[static_cast<std::size_t>(path)] += t;
        }
        result.variance_profile[static_cast<std::size_t>(n)] =
            dt * (mean(acc_h) + mean(acc_t));
    }
    result.objective = {dt * mean(acc_h), dt * mean(acc_t)};

    result.empirical_var_c.assign(static_cast<std::size_t>(n_steps) + 1, 0.0);
    std::vector<double> column(static_cast<std::size_t>(n_paths));
    for (int n = 0; n <= n_steps; ++n) {
        for (int path = 0; path < n_paths; ++path)
            column[static_cast<std::size_t>(path)] = result.c_at(path, n);
        result.empirical_var_c[static_cast<std::size_t>(n)] = sample_variance(column);
    }
    for (int path = 0; path < n_paths; ++path)
        column[static_cast<std::size_t>(path)] = result.c_at(path, 0);
    result.c0_mean = mean(column);
    result.c0_variance = sample_variance(column);
    return result;
}

BsQuote bs_oracle(double s0, double strike, double rate, double vol, double horizon) {
    if (!(vol > 0.0) || !(horizon > 0.0) || !(s0 > 0.0) || !(strike > 0.0))
        throw Error(ErrorKind::config, "bs_oracle needs positive spot, strike, vol, horizon",
                    "bs_oracle");
    const auto normal_cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double st = vol * std::sqrt(horizon);
    const double d1 = (std::log(s0 / strike) + (rate + 0.5 * vol * vol) * horizon) / st;
    const double d2 = d1 - st;
    BsQuote q;
    q.delta = normal_cdf(d1);
    q.price = s0 * q.delta - strike * std::exp(-rate * horizon) * normal_cdf(d2);
    return q;
}

PositivityReport positivity_check(const FBSDESolution& solution) {
    const int n_steps = solution.grid.steps;
    const int d = solution.n_assets;
    PositivityReport report;
    report.negative_fraction.assign(static_cast<std::size_t>(d), 0.0);
    report.nonpositive_fraction.assign(static_cast<std::size_t>(d), 0.0);
    report.worst.assign(static_cast<std::size_t>(d), 0.0);

    const double count = static_cast<double>(solution.n_paths) * (n_steps + 1);
    for (int i = 0; i < d; ++i) {
        long negative = 0;
        long nonpositive = 0;
        double worst = 0.0;
        for (int path = 0; path < solution.n_paths; ++path)
            for (int n = 0; n <= n_steps; ++n) {
                const double p = solution.price(path, n, i);
                if (p < 0.0) ++negative;
                if (p <= 0.0) ++nonpositive;
                worst = std::min(worst, p);
            }
        report.negative_fraction[static_cast<std::size_t>(i)] =
            static_cast<double>(negative) / count;
        report.nonpositive_fraction[static_cast<std::size_t>(i)] =
            static_cast<double>(nonpositive) / count;
        report.worst[static_cast<std::size_t>(i)] = worst;
    }
    return report;
}

}  // namespace levyhedge
