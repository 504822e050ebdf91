#pragma once

#include "levyhedge/errors.hpp"

namespace levyhedge {

/// Uniform grid t_n = n * T / N on [0, T].
struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;

    double dt() const { return horizon / steps; }
    double time(int n) const { return horizon * n / steps; }

    void validate() const {
        if (!(horizon > 0.0))
            throw Error(ErrorKind::config, "time grid horizon must be positive", "grid.horizon");
        if (steps < 1)
            throw Error(ErrorKind::config, "time grid needs at least one step", "grid.steps");
    }
};

}  // namespace levyhedge
