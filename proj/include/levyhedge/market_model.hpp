#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "levyhedge/levy_basis.hpp"

namespace levyhedge {

/// How the d hedgeable martingale directions are split across drivers:
/// driver j contributes its first m(j) components, sum_j m(j) = d.
struct MartingaleAllocation {
    int l = 1;               // number of drivers
    std::vector<int> m;      // per driver, >= 1
    int d = 1;               // number of risky assets

    void validate(const ComponentLayout& layout) const;
};

/// Fixed enumeration of the hedged rows (j,k), k <= m(j), lexicographic.
struct SigmaOrdering {
    std::vector<std::pair<int, int>> rows;  // 1-based (driver, order)
    std::vector<int> flat;                  // matching ComponentLayout indices

    static SigmaOrdering from(const MartingaleAllocation& allocation,
                              const ComponentLayout& layout);
};

using RateFn = std::function<double(double t, double w, std::span<const double> a)>;
using DriftFn = std::function<double(double t, std::span<const double> prices, double w,
                                     std::span<const double> z)>;
using VolFn = std::function<double(double t, std::span<const double> prices, double w)>;
using PayoffFn = std::function<double(std::span<const double> prices)>;

/// Coefficient functions of the market: money-market rate r, relative
/// drifts f_i, relative volatilities sigma_i^(jk) (one per asset and
/// hedged row), and the payoff h.
struct CoefficientSet {
    RateFn rate;
    std::vector<DriftFn> drift;           // per asset
    std::vector<std::vector<VolFn>> vol;  // [asset][hedged row]
    PayoffFn payoff;
};

struct MarketModel {
    MartingaleAllocation allocation;
    CoefficientSet coefficients;
    std::vector<double> initial_prices;
    std::vector<LevySpec> drivers;

    // Derived on construction.
    std::vector<TeugelsBasis> bases;
    ComponentLayout layout;
    SigmaOrdering ordering;
    std::vector<int> tail_flat;                   // components (j,k), k > m(j)
    std::vector<std::pair<int, int>> tail_rows;

    static MarketModel create(MartingaleAllocation allocation, CoefficientSet coefficients,
                              std::vector<double> initial_prices, std::vector<LevySpec> drivers);
};

/// d x d matrix of relative volatilities; row (j,k) under SigmaOrdering,
/// column i.
Eigen::MatrixXd assemble_sigma(const MarketModel& model, double t,
                               std::span<const double> prices, double w);

/// g(t, pi, w, a) = sum_i a_i pi_i f_i + (w - sum_i a_i pi_i) r.
/// z feeds through to drift coefficients that depend on it.
double drift_g(const MarketModel& model, double t, std::span<const double> prices, double w,
               std::span<const double> a, std::span<const double> z = {});

double payoff_h(const MarketModel& model, std::span<const double> prices);

struct PayoffSpec {
    enum class Kind { call, put, forward, constant };
    Kind kind = Kind::call;
    double strike = 0.0;
    double value = 0.0;  // constant payoff
    int asset = 0;

    PayoffFn make() const;
};

/// Constant-coefficient parameter block shared by the named models.
struct ConstantParams {
    double rate = 0.0;
    std::vector<double> drift;            // per asset
    std::vector<std::vector<double>> vol; // [asset][hedged row]
    PayoffSpec payoff;
};

/// Constant r, f, sigma; drivers must be pure Brownian.
MarketModel make_black_scholes(const MartingaleAllocation& allocation,
                               const ConstantParams& params,
                               std::vector<double> initial_prices,
                               std::vector<LevySpec> drivers);

/// Constant r, f, sigma over drivers that may carry jumps.
MarketModel make_jump_diffusion(const MartingaleAllocation& allocation,
                                const ConstantParams& params,
                                std::vector<double> initial_prices,
                                std::vector<LevySpec> drivers);

/// Drift feels the wealth level: f_i = drift_i + feedback_i * tanh(w / wealth_scale).
MarketModel make_large_investor(const MartingaleAllocation& allocation,
                                const ConstantParams& params,
                                std::vector<double> feedback, double wealth_scale,
                                std::vector<double> initial_prices,
                                std::vector<LevySpec> drivers);

// Driver fixtures used across tests and the CLI docs.
LevySpec preset_brownian();   // sigma 1, no jumps          (K = 1)
LevySpec preset_two_atom();   // sigma 0, two atoms         (K = 2)
LevySpec preset_mixed();      // sigma 0.5, one atom        (K = 2)

}  // namespace levyhedge
