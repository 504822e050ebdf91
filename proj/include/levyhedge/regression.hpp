#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace levyhedge {

/// Exponent table for all monomials in n_vars variables of total degree <= degree,
/// graded lexicographic, constant term first.
struct MonomialBasis {
    int n_vars = 0;
    int degree = 0;
    std::vector<std::vector<int>> exponents;

    static MonomialBasis total_degree(int n_vars, int degree);
    int size() const { return static_cast<int>(exponents.size()); }
    void evaluate(std::span<const double> x, std::span<double> out) const;
};

/// Column-wise (x - mean) / sd over a raw state matrix; sd == 0 maps to 0.
/// Keeps conditioning of the monomial expansion independent of price scale.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& states);

/// Clamp each column into its empirical [tail_fraction, 1 - tail_fraction]
/// quantile range. Polynomial features evaluated on clamped states stay flat
/// across the sparsely populated tails instead of oscillating there.
Eigen::MatrixXd winsorize_columns(const Eigen::MatrixXd& states, double tail_fraction);

/// n_paths x basis.size() design matrix from raw states (standardized inside).
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& states, const MonomialBasis& basis);

struct RegressionResult {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd fitted;
    int rank = 0;
};

/// One SVD of the design matrix, reused for every response at the same
/// time step. Minimum-norm solutions; singular values below
/// rel_tol * s_max are treated as zero.
class LeastSquaresProjector {
public:
    explicit LeastSquaresProjector(const Eigen::MatrixXd& design, double rel_tol = 1e-12);

    RegressionResult solve(const Eigen::VectorXd& y) const;
    /// Fitted values only: U_r U_r^T y.
    Eigen::VectorXd project(const Eigen::VectorXd& y) const;

    int rank() const { return rank_; }
    int rows() const { return static_cast<int>(u_.rows()); }
    int cols() const { return n_cols_; }
    /// Ratio of largest to smallest retained singular value.
    double condition() const {
        return rank_ > 0 ? inv_singular_(rank_ - 1) / inv_singular_(0) : 0.0;
    }

private:
    Eigen::MatrixXd u_;  // thin U, rank_ columns kept
    Eigen::MatrixXd v_;
    Eigen::VectorXd inv_singular_;
    int rank_ = 0;
    int n_cols_ = 0;
};

/// SVD least squares in one call (fresh factorization).
RegressionResult regress(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                         double rel_tol = 1e-12);

}  // namespace levyhedge
