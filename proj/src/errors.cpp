#include "levyhedge/errors.hpp"

namespace levyhedge {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::degenerate_driver: return "degenerate_driver";
        case ErrorKind::index_out_of_range: return "index_out_of_range";
        case ErrorKind::non_finite: return "non_finite";
        case ErrorKind::rank_deficient_regression: return "rank_deficient_regression";
        case ErrorKind::no_convergence: return "no_convergence";
        case ErrorKind::singular_sigma: return "singular_sigma";
    }
    return "unknown";
}

}  // namespace levyhedge
