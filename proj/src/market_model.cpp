#include "levyhedge/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levyhedge/errors.hpp"

namespace levyhedge {

void MartingaleAllocation::validate(const ComponentLayout& layout) const {
    if (l < 1)
        throw Error(ErrorKind::config, "need at least one driver", "model.dimension.l");
    if (static_cast<int>(m.size()) != l)
        throw Error(ErrorKind::config, "m must list one entry per driver",
                    "model.dimension.m");
    if (static_cast<int>(layout.orders.size()) != l)
        throw Error(ErrorKind::config, "driver count does not match dimension block l",
                    "model.drivers");
    int total = 0;
    for (int j = 0; j < l; ++j) {
        const int mj = m[static_cast<std::size_t>(j)];
        if (mj < 1)
            throw Error(ErrorKind::config, "m(j) must be at least 1", "model.dimension.m");
        if (mj > layout.orders[static_cast<std::size_t>(j)])
            throw Error(ErrorKind::config,
                        "m(" + std::to_string(j + 1) + ") exceeds the driver's basis order " +
                            std::to_string(layout.orders[static_cast<std::size_t>(j)]),
                        "model.dimension.m");
        total += mj;
    }
    if (total != d)
        throw Error(ErrorKind::config,
                    "sum of m(j) is " + std::to_string(total) + " but d is " +
                        std::to_string(d),
                    "model.dimension");
}

SigmaOrdering SigmaOrdering::from(const MartingaleAllocation& allocation,
                                  const ComponentLayout& layout) {
    SigmaOrdering ordering;
    for (int j = 0; j < allocation.l; ++j)
        for (int k = 1; k <= allocation.m[static_cast<std::size_t>(j)]; ++k) {
            ordering.rows.emplace_back(j + 1, k);
            ordering.flat.push_back(layout.flat(j, k));
        }
    return ordering;
}

MarketModel MarketModel::create(MartingaleAllocation allocation, CoefficientSet coefficients,
                                std::vector<double> initial_prices,
                                std::vector<LevySpec> drivers) {
    MarketModel model;
    model.allocation = std::move(allocation);
    model.coefficients = std::move(coefficients);
    model.initial_prices = std::move(initial_prices);
    model.drivers = std::move(drivers);

    if (model.drivers.empty())
        throw Error(ErrorKind::config, "need at least one driver", "model.drivers");
    for (const LevySpec& spec : model.drivers) spec.validate();
    for (const LevySpec& spec : model.drivers) model.bases.push_back(build_basis(spec));
    model.layout = ComponentLayout::from(model.bases);
    model.allocation.validate(model.layout);

    const int d = model.allocation.d;
    if (static_cast<int>(model.initial_prices.size()) != d)
        throw Error(ErrorKind::config, "need one initial price per asset",
                    "model.initial_prices");
    for (double p : model.initial_prices)
        if (!std::isfinite(p) || p < 0.0)
            throw Error(ErrorKind::config, "initial prices must be finite and nonnegative",
                        "model.initial_prices");

    if (!model.coefficients.rate)
        throw Error(ErrorKind::config, "rate function missing", "model.rate");
    if (!model.coefficients.payoff)
        throw Error(ErrorKind::config, "payoff function missing", "model.payoff");
    if (static_cast<int>(model.coefficients.drift.size()) != d)
        throw Error(ErrorKind::config, "need one drift per asset", "model.drift");
    if (static_cast<int>(model.coefficients.vol.size()) != d)
        throw Error(ErrorKind::config, "need one volatility row set per asset", "model.vol");
    for (const auto& rows : model.coefficients.vol)
        if (static_cast<int>(rows.size()) != d)
            throw Error(ErrorKind::config,
                        "each asset needs one volatility per hedged row (d total)",
                        "model.vol");

    model.ordering = SigmaOrdering::from(model.allocation, model.layout);
    for (int j = 0; j < model.allocation.l; ++j)
        for (int k = model.allocation.m[static_cast<std::size_t>(j)] + 1;
             k <= model.layout.orders[static_cast<std::size_t>(j)]; ++k) {
            model.tail_rows.emplace_back(j + 1, k);
            model.tail_flat.push_back(model.layout.flat(j, k));
        }
    return model;
}

Eigen::MatrixXd assemble_sigma(const MarketModel& model, double t,
                               std::span<const double> prices, double w) {
    const int d = model.allocation.d;
    Eigen::MatrixXd sigma(d, d);
    for (int row = 0; row < d; ++row)
        for (int i = 0; i < d; ++i)
            sigma(row, i) = model.coefficients.vol[static_cast<std::size_t>(i)]
                                                  [static_cast<std::size_t>(row)](t, prices, w);
    return sigma;
}

double drift_g(const MarketModel& model, double t, std::span<const double> prices, double w,
               std::span<const double> a, std::span<const double> z) {
    double invested = 0.0;
    double gains = 0.0;
    for (int i = 0; i < model.allocation.d; ++i) {
        const double amount = a[static_cast<std::size_t>(i)] * prices[static_cast<std::size_t>(i)];
        invested += amount;
        gains += amount * model.coefficients.drift[static_cast<std::size_t>(i)](t, prices, w, z);
    }
    return gains + (w - invested) * model.coefficients.rate(t, w, a);
}

double payoff_h(const MarketModel& model, std::span<const double> prices) {
    return model.coefficients.payoff(prices);
}

PayoffFn PayoffSpec::make() const {
    const int i = asset;
    switch (kind) {
        case Kind::call: {
            const double k = strike;
            return [i, k](std::span<const double> p) {
                return std::max(p[static_cast<std::size_t>(i)] - k, 0.0);
            };
        }
        case Kind::put: {
            const double k = strike;
            return [i, k](std::span<const double> p) {
                return std::max(k - p[static_cast<std::size_t>(i)], 0.0);
            };
        }
        case Kind::forward:
            return [i](std::span<const double> p) { return p[static_cast<std::size_t>(i)]; };
        case Kind::constant: {
            const double v = value;
            return [v](std::span<const double>) { return v; };
        }
    }
    throw Error(ErrorKind::config, "unknown payoff kind", "model.payoff.kind");
}

namespace {

CoefficientSet constant_coefficients(const ConstantParams& params, int d) {
    if (static_cast<int>(params.drift.size()) != d)
        throw Error(ErrorKind::config, "need one drift per asset", "model.drift");
    if (static_cast<int>(params.vol.size()) != d)
        throw Error(ErrorKind::config, "need one volatility row set per asset", "model.vol");
    if (params.payoff.asset < 0 || params.payoff.asset >= d)
        throw Error(ErrorKind::config, "payoff asset index out of range",
                    "model.payoff.asset");

    CoefficientSet set;
    const double r = params.rate;
    set.rate = [r](double, double, std::span<const double>) { return r; };
    for (int i = 0; i < d; ++i) {
        const double f = params.drift[static_cast<std::size_t>(i)];
        set.drift.push_back(
            [f](double, std::span<const double>, double, std::span<const double>) {
                return f;
            });
        if (static_cast<int>(params.vol[static_cast<std::size_t>(i)].size()) != d)
            throw Error(ErrorKind::config,
                        "each asset needs one volatility per hedged row (d total)",
                        "model.vol");
        std::vector<VolFn> rows;
        for (int row = 0; row < d; ++row) {
            const double s =
                params.vol[static_cast<std::size_t>(i)][static_cast<std::size_t>(row)];
            rows.push_back([s](double, std::span<const double>, double) { return s; });
        }
        set.vol.push_back(std::move(rows));
    }
    set.payoff = params.payoff.make();
    return set;
}

}  // namespace

MarketModel make_black_scholes(const MartingaleAllocation& allocation,
                               const ConstantParams& params,
                               std::vector<double> initial_prices,
                               std::vector<LevySpec> drivers) {
    for (const LevySpec& spec : drivers) {
        if (!spec.jumps.atoms.empty())
            throw Error(ErrorKind::config,
                        "black_scholes drivers must be pure Brownian; use jump_diffusion",
                        "model.drivers");
        if (!(spec.sigma > 0.0))
            throw Error(ErrorKind::config, "black_scholes drivers need sigma > 0",
                        "model.drivers");
    }
    return MarketModel::create(allocation, constant_coefficients(params, allocation.d),
                               std::move(initial_prices), std::move(drivers));
}

MarketModel make_jump_diffusion(const MartingaleAllocation& allocation,
                                const ConstantParams& params,
                                std::vector<double> initial_prices,
                                std::vector<LevySpec> drivers) {
    return MarketModel::create(allocation, constant_coefficients(params, allocation.d),
                               std::move(initial_prices), std::move(drivers));
}

MarketModel make_large_investor(const MartingaleAllocation& allocation,
                                const ConstantParams& params,
                                std::vector<double> feedback, double wealth_scale,
                                std::vector<double> initial_prices,
                                std::vector<LevySpec> drivers) {
    if (static_cast<int>(feedback.size()) != allocation.d)
        throw Error(ErrorKind::config, "need one feedback constant per asset",
                    "model.feedback");
    if (!(wealth_scale > 0.0))
        throw Error(ErrorKind::config, "wealth_scale must be positive", "model.wealth_scale");

    CoefficientSet set = constant_coefficients(params, allocation.d);
    for (int i = 0; i < allocation.d; ++i) {
        const double base = params.drift[static_cast<std::size_t>(i)];
        const double fb = feedback[static_cast<std::size_t>(i)];
        const double scale = wealth_scale;
        set.drift[static_cast<std::size_t>(i)] =
            [base, fb, scale](double, std::span<const double>, double w,
                              std::span<const double>) {
                return base + fb * std::tanh(w / scale);
            };
    }
    return MarketModel::create(allocation, std::move(set), std::move(initial_prices),
                               std::move(drivers));
}

LevySpec preset_brownian() {
    LevySpec spec;
    spec.sigma = 1.0;
    return spec;
}

LevySpec preset_two_atom() {
    LevySpec spec;
    spec.sigma = 0.0;
    spec.jumps.atoms = {{-0.3, 2.0}, {0.5, 1.2}};
    return spec;
}

LevySpec preset_mixed() {
    LevySpec spec;
    spec.sigma = 0.5;
    spec.jumps.atoms = {{0.35, 1.5}};
    return spec;
}

}  // namespace levyhedge
