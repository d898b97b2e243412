#include "ermakov/quadrature.hpp"

#include <cmath>
#include <limits>

#include "ermakov/errors.hpp"

namespace ermakov {
namespace {

struct Workspace {
    const std::function<double(double)>& f;
    long evals = 0;
    long budget = 0;

    double eval(double x) {
        if (++evals > budget) throw QuadratureError("quadrature evaluation budget exhausted");
        const double y = f(x);
        if (!std::isfinite(y)) throw DomainError("integrand is not finite");
        return y;
    }
};

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

// One interval with cached endpoint/midpoint values.  `whole` is the Simpson
// estimate over [a,b]; the two half-interval estimates provide the error.
// `floor` is the roundoff floor of the whole integral: below it, deltas are
// node-placement noise and splitting further only chases the last bits.
double refine(Workspace& ws, double a, double b, double fa, double fm, double fb, double whole,
              double tol, double floor, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = ws.eval(lm);
    const double frm = ws.eval(rm);
    const double h = b - a;
    const double left = simpson(fa, flm, fm, 0.5 * h);
    const double right = simpson(fm, frm, fb, 0.5 * h);
    const double delta = left + right - whole;
    // |delta| ~ 15x the error of the refined estimate
    if (std::fabs(delta) <= std::max(15.0 * tol, floor) || m == a || m == b)
        return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureError("quadrature tolerance not reached (max depth)");
    return refine(ws, a, m, fa, flm, fm, left, 0.5 * tol, floor, depth - 1) +
           refine(ws, m, b, fm, frm, fb, right, 0.5 * tol, floor, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opt) {
    if (a == b) return 0.0;
    if (a > b) return -integrate_adaptive(f, b, a, opt);
    if (!(opt.tol > 0.0)) throw QuadratureError("quadrature tolerance must be positive");

    Workspace ws{f, 0, opt.max_evals};
    const double fa = ws.eval(a);
    const double m = 0.5 * (a + b);
    const double fm = ws.eval(m);
    const double fb = ws.eval(b);
    const double whole = simpson(fa, fm, fb, b - a);
    const double scale = simpson(std::fabs(fa), std::fabs(fm), std::fabs(fb), b - a);
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * scale;
    return refine(ws, a, b, fa, fm, fb, whole, opt.tol, floor, opt.max_depth);
}

} // namespace ermakov
