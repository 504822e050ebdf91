#include "levyhedge/regression.hpp"

#include <algorithm>
#include <cmath>

#include "levyhedge/errors.hpp"

namespace levyhedge {

MonomialBasis MonomialBasis::total_degree(int n_vars, int degree) {
    MonomialBasis basis;
    basis.n_vars = n_vars;
    basis.degree = degree;

    // Graded enumeration: total degree 0, 1, ..., lexicographic inside each grade.
    for (int total = 0; total <= degree; ++total) {
        // Generate all exponent vectors summing to `total`.
        std::vector<int> expo(static_cast<std::size_t>(n_vars), 0);
        auto emit = [&](auto&& self, int var, int left) -> void {
            if (var == n_vars - 1) {
                expo[static_cast<std::size_t>(var)] = left;
                basis.exponents.push_back(expo);
                return;
            }
            for (int e = left; e >= 0; --e) {
                expo[static_cast<std::size_t>(var)] = e;
                self(self, var + 1, left - e);
            }
            expo[static_cast<std::size_t>(var)] = 0;
        };
        if (n_vars > 0) emit(emit, 0, total);
    }
    if (n_vars == 0) basis.exponents.push_back({});
    return basis;
}

void MonomialBasis::evaluate(std::span<const double> x, std::span<double> out) const {
    for (std::size_t m = 0; m < exponents.size(); ++m) {
        double v = 1.0;
        for (int var = 0; var < n_vars; ++var) {
            const int e = exponents[m][static_cast<std::size_t>(var)];
            const double base = x[static_cast<std::size_t>(var)];
            for (int i = 0; i < e; ++i) v *= base;
        }
        out[m] = v;
    }
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& states) {
    Eigen::MatrixXd out = states;
    const auto n = static_cast<double>(states.rows());
    for (Eigen::Index col = 0; col < states.cols(); ++col) {
        const double mean = states.col(col).sum() / n;
        const double var = (states.col(col).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (sd > 0.0)
            out.col(col) = (states.col(col).array() - mean) / sd;
        else
            out.col(col).setZero();
    }
    return out;
}

Eigen::MatrixXd winsorize_columns(const Eigen::MatrixXd& states, double tail_fraction) {
    Eigen::MatrixXd out = states;
    const Eigen::Index rows = states.rows();
    const auto k = static_cast<Eigen::Index>(tail_fraction * static_cast<double>(rows));
    if (k <= 0 || 2 * k >= rows) return out;
    std::vector<double> column(static_cast<std::size_t>(rows));
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
        for (Eigen::Index r = 0; r < rows; ++r)
            column[static_cast<std::size_t>(r)] = states(r, c);
        std::nth_element(column.begin(), column.begin() + k, column.end());
        const double lo = column[static_cast<std::size_t>(k)];
        std::nth_element(column.begin(), column.begin() + (rows - 1 - k), column.end());
        const double hi = column[static_cast<std::size_t>(rows - 1 - k)];
        for (Eigen::Index r = 0; r < rows; ++r)
            out(r, c) = std::clamp(states(r, c), lo, hi);
    }
    return out;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& states, const MonomialBasis& basis) {
    const Eigen::MatrixXd z = standardize_columns(states);
    Eigen::MatrixXd design(states.rows(), basis.size());
    std::vector<double> row(static_cast<std::size_t>(states.cols()));
    std::vector<double> features(static_cast<std::size_t>(basis.size()));
    for (Eigen::Index r = 0; r < states.rows(); ++r) {
        for (Eigen::Index c = 0; c < states.cols(); ++c)
            row[static_cast<std::size_t>(c)] = z(r, c);
        basis.evaluate(row, features);
        for (Eigen::Index c = 0; c < design.cols(); ++c)
            design(r, c) = features[static_cast<std::size_t>(c)];
    }
    return design;
}

LeastSquaresProjector::LeastSquaresProjector(const Eigen::MatrixXd& design, double rel_tol) {
    n_cols_ = static_cast<int>(design.cols());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    if (!(top > 0.0) || !std::isfinite(top))
        throw Error(ErrorKind::rank_deficient_regression,
                    "design matrix has no usable singular values");

    rank_ = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * top) ++rank_;

    u_ = svd.matrixU().leftCols(rank_);
    v_ = svd.matrixV().leftCols(rank_);
    inv_singular_ = sv.head(rank_).cwiseInverse();
}

RegressionResult LeastSquaresProjector::solve(const Eigen::VectorXd& y) const {
    RegressionResult res;
    const Eigen::VectorXd uy = u_.transpose() * y;
    res.coeffs = v_ * (inv_singular_.asDiagonal() * uy);
    res.fitted = u_ * uy;
    res.rank = rank_;
    return res;
}

Eigen::VectorXd LeastSquaresProjector::project(const Eigen::VectorXd& y) const {
    return u_ * (u_.transpose() * y);
}

RegressionResult regress(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                         double rel_tol) {
    if (design.rows() != y.size())
        throw Error(ErrorKind::config, "feature rows must match target length", "regress");
    return LeastSquaresProjector(design, rel_tol).solve(y);
}

}  // namespace levyhedge
