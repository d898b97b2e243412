#include "ermakov/roots.hpp"

#include <algorithm>
#include <cmath>

#include "ermakov/errors.hpp"

namespace ermakov {

double find_root_bracketed(const std::function<double(double)>& f, double lo, double hi,
                           const RootOptions& opt) {
    double flo = f(lo);
    double fhi = f(hi);
    if (std::fabs(flo) <= opt.tol_f) return lo;
    if (std::fabs(fhi) <= opt.tol_f) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw RootFindError("root is not bracketed");

    double x = lo, fx = flo;
    for (int it = 0; it < opt.max_iter; ++it) {
        const double scale = std::max({std::fabs(lo), std::fabs(hi), 1.0});
        if (hi - lo <= opt.tol_x * scale) break;

        // secant through the bracket endpoints, bisection as fallback
        double cand = lo - flo * (hi - lo) / (fhi - flo);
        const double margin = 0.01 * (hi - lo);
        if (!std::isfinite(cand) || cand <= lo + margin || cand >= hi - margin)
            cand = 0.5 * (lo + hi);

        x = cand;
        fx = f(x);
        if (std::fabs(fx) <= opt.tol_f) return x;
        if ((fx > 0.0) == (fhi > 0.0)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
    }
    return std::fabs(flo) < std::fabs(fhi) ? lo : hi;
}

double invert_increasing(const std::function<double(double)>& F, double target, double x0,
                         double max_span, const RootOptions& opt) {
    const double f0 = F(x0) - target;
    if (std::fabs(f0) <= opt.tol_f) return x0;

    const double dir = f0 < 0.0 ? 1.0 : -1.0; // which side of x0 the root lies on
    double step = std::min(1.0, 0.25 * max_span);
    double prev = x0;
    double fprev = f0;
    while (true) {
        const double cand = x0 + dir * step;
        const double fc = F(cand) - target;
        if (std::fabs(fc) <= opt.tol_f) return cand;
        if ((fc > 0.0) != (fprev > 0.0)) {
            const double lo = std::min(prev, cand);
            const double hi = std::max(prev, cand);
            return find_root_bracketed([&](double x) { return F(x) - target; }, lo, hi, opt);
        }
        prev = cand;
        fprev = fc;
        if (step >= max_span)
            throw RootFindError("bracket not found within configured horizon");
        step = std::min(2.0 * step, max_span);
    }
}

} // namespace ermakov
