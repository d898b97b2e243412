#include "ermakov/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "ermakov/errors.hpp"

namespace ermakov {

std::vector<double> fd_weights(const std::vector<double>& x, double z, int m) {
    const int n = static_cast<int>(x.size()) - 1;
    if (n < m) throw Error("fd_weights: need more nodes than the derivative order");

    // Fornberg's recursion; w(i, k) = weight of node i for the k-th derivative.
    std::vector<std::vector<double>> w(n + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - z;
    w[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    w[i][k] = c1 * (k * w[i - 1][k - 1] - c5 * w[i - 1][k]) / c2;
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                w[j][k] = (c4 * w[j][k] - k * w[j][k - 1]) / c3;
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }

    std::vector<double> out(n + 1);
    for (int i = 0; i <= n; ++i) out[i] = w[i][m];
    return out;
}

std::vector<double> fd_derivative_5pt(const std::vector<double>& x,
                                      const std::vector<double>& f) {
    const std::size_t n = x.size();
    if (n < 5 || f.size() != n)
        throw Error("fd_derivative_5pt: need at least 5 matched samples");

    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i < 2 ? 0 : std::min(i - 2, n - 5);
        std::vector<double> nodes(x.begin() + lo, x.begin() + lo + 5);
        const std::vector<double> w = fd_weights(nodes, x[i], 1);
        double acc = 0.0;
        for (std::size_t k = 0; k < 5; ++k) acc += w[k] * f[lo + k];
        out[i] = acc;
    }
    return out;
}

HermitePath::HermitePath(std::vector<double> t, std::vector<double> value,
                         std::vector<double> deriv)
    : t_(std::move(t)), v_(std::move(value)), d_(std::move(deriv)) {
    if (t_.size() < 2 || v_.size() != t_.size() || d_.size() != t_.size())
        throw Error("HermitePath: need >= 2 matched samples");
    for (std::size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1])) throw Error("HermitePath: grid must be strictly increasing");
}

std::size_t HermitePath::segment(double t) const {
    if (t < t_.front() || t > t_.back())
        throw Error("HermitePath: query outside the sampled window");
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    if (i > 0) --i;
    if (i >= t_.size() - 1) i = t_.size() - 2;
    return i;
}

double HermitePath::value(double t) const {
    const std::size_t i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * v_[i] + h10 * h * d_[i] + h01 * v_[i + 1] + h11 * h * d_[i + 1];
}

double HermitePath::deriv(double t) const {
    const std::size_t i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double s2 = s * s;
    const double dh00 = (6.0 * s2 - 6.0 * s) / h;
    const double dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    const double dh01 = (-6.0 * s2 + 6.0 * s) / h;
    const double dh11 = 3.0 * s2 - 2.0 * s;
    return dh00 * v_[i] + dh10 * d_[i] + dh01 * v_[i + 1] + dh11 * d_[i + 1];
}

void HermitePath::truncate_after(double t_cut) {
    std::size_t keep = t_.size();
    while (keep > 2 && t_[keep - 1] > t_cut) --keep;
    t_.resize(keep);
    v_.resize(keep);
    d_.resize(keep);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2) throw Error("linspace: need at least 2 points");
    std::vector<double> out(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

} // namespace ermakov
