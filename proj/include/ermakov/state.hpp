// Shared phase-space types for the planar second-order systems.
#pragma once

#include <cmath>

namespace ermakov {

struct State {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double xdot = 0.0;
    double ydot = 0.0;

    bool finite() const {
        return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) && std::isfinite(xdot) &&
               std::isfinite(ydot);
    }
};

struct Accel {
    double ax = 0.0;
    double ay = 0.0;
};

} // namespace ermakov
