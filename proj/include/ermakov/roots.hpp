// Bracketed root refinement and monotone-function inversion.
#pragma once

#include <functional>

namespace ermakov {

struct RootOptions {
    double tol_f = 1e-12;  // accept when |f(x)| <= tol_f
    double tol_x = 1e-14;  // ... or when the bracket is this tight (relative)
    int max_iter = 200;
};

// Root of f in [lo, hi]; f(lo) and f(hi) must have opposite signs (or one of
// them be an exact root).  Safeguarded secant: a secant step is taken when it
// stays inside the bracket and shrinks it, otherwise bisection.
double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const RootOptions& opt = {});

// Solve F(x) = target for a (not necessarily strictly) increasing F, starting
// the bracket search at x0 with doubling steps, limited to |x - x0| <=
// max_span.  Throws RootFindError when no bracket is found within the horizon.
double invert_increasing(const std::function<double(double)>& F, double target, double x0,
                         double max_span, const RootOptions& opt = {});

} // namespace ermakov
