// Small numeric helpers shared across modules: finite-difference weights on
// arbitrary nodes, cubic-Hermite sampled paths, uniform grids.
#pragma once

#include <cstddef>
#include <vector>

namespace ermakov {

// Fornberg weights: w[j] such that sum_j w[j] f(x[j]) approximates the
// m-th derivative of f at z, for arbitrary distinct nodes x.
std::vector<double> fd_weights(const std::vector<double>& x, double z, int m);

// First derivative of sampled data (f over nodes x, both length n >= 5) via
// centered 5-point stencils; one-sided stencils at the edges.
std::vector<double> fd_derivative_5pt(const std::vector<double>& x,
                                      const std::vector<double>& f);

// Samples of a smooth function together with its first derivative on a
// strictly increasing grid; queries interpolate with the matching cubic
// Hermite segment.
class HermitePath {
  public:
    HermitePath() = default;
    HermitePath(std::vector<double> t, std::vector<double> value, std::vector<double> deriv);

    double value(double t) const;
    double deriv(double t) const; // derivative of the interpolant

    double t_front() const { return t_.front(); }
    double t_back() const { return t_.back(); }
    std::size_t size() const { return t_.size(); }
    const std::vector<double>& grid() const { return t_; }
    const std::vector<double>& values() const { return v_; }
    const std::vector<double>& derivs() const { return d_; }

    // Drop all samples strictly after t_cut (keeps at least two samples).
    void truncate_after(double t_cut);

  private:
    std::size_t segment(double t) const; // throws outside [t_front, t_back]
    std::vector<double> t_, v_, d_;
};

std::vector<double> linspace(double a, double b, std::size_t n);

} // namespace ermakov
