#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levyhedge {

enum class ErrorKind {
    config,
    degenerate_driver,
    index_out_of_range,
    non_finite,
    rank_deficient_regression,
    no_convergence,
    singular_sigma,
};

const char* to_string(ErrorKind kind);

/// All failures surface as Error so the CLI can emit one structured
/// record (kind, location, message) and map it to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::string location = {})
        : std::runtime_error(message), kind_(kind), location_(std::move(location)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& location() const { return location_; }

private:
    ErrorKind kind_;
    std::string location_;
};

class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& message, std::vector<double> residuals)
        : Error(ErrorKind::no_convergence, message), residual_history(std::move(residuals)) {}

    std::vector<double> residual_history;
};

}  // namespace levyhedge
