// Adaptive quadrature: recursive interval halving with the classic Simpson
// pair as the embedded error estimate, plus one Richardson extrapolation on
// accepted intervals.
#pragma once

#include <functional>

namespace ermakov {

struct QuadratureOptions {
    double tol = 1e-10;   // absolute tolerance on the whole integral
    int max_depth = 52;   // recursion depth cap per initial interval
    long max_evals = 40'000'000; // total integrand evaluation budget
};

// Integral of f over [a, b].  a > b integrates with flipped sign, a == b is 0.
// Throws QuadratureError when the tolerance is unreachable within the budget;
// integrand exceptions (domain errors) propagate unchanged.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opt = {});

} // namespace ermakov
