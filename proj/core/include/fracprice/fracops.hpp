#pragma once

#include <vector>

namespace fracprice {

/// Samples of a function on strictly increasing abscissae.
struct GridFunction {
    std::vector<double> xs;
    std::vector<double> ys;

    /// Throws InvalidArgument unless sizes match, xs is strictly increasing and there are >= 4 points.
    void validate() const;

    /// Piecewise-linear interpolation; throws XOutsideGrid outside [xs.front(), xs.back()].
    double operator()(double x) const;
};

/// Fractional order nu > 0 with lower terminal origin.
struct FracOrder {
    double nu = 0.5;
    double origin = 0.0;
};

/// Samples f on xs.
template <class F>
GridFunction sample(const std::vector<double>& xs, F&& f) {
    GridFunction g;
    g.xs = xs;
    g.ys.reserve(xs.size());
    for (double x : xs) g.ys.push_back(f(x));
    return g;
}

/// Uniform grid of n points on [a, b].
std::vector<double> uniform_grid(double a, double b, int n);

/// Grid on [a, b] clustered towards a: a + (b - a) (i/(n-1))^power.
std::vector<double> graded_grid(double a, double b, int n, double power);

/// Riemann-Liouville integral of order nu by product integration of the linear interpolant.
double rl_integral(const GridFunction& f, const FracOrder& o, double x);

/// rl_integral evaluated at every grid node at or right of the origin.
GridFunction rl_integral_grid(const GridFunction& f, const FracOrder& o);

/// Riemann-Liouville derivative: ceil(nu)-th derivative (fourth-order differences) of the
/// (ceil(nu) - nu)-integral. fd_step <= 0 selects a default.
double rl_derivative(const GridFunction& f, const FracOrder& o, double x, double fd_step = 0.0);

/// Caputo derivative: the (ceil(nu) - nu)-integral of the ceil(nu)-th derivative, with the last
/// derivative taken exactly on the piecewise-linear interpolant. Constants map to exactly 0.
double caputo_derivative(const GridFunction& f, const FracOrder& o, double x);

/// Spectral application of the symbol -|k|^alpha e^{i sign(k) theta pi/2} on a uniform symmetric grid.
/// Sets *insufficient_decay when the boundary values are not small against the maximum.
GridFunction riesz_feller_apply(const GridFunction& f, double alpha, double theta,
                                bool* insufficient_decay = nullptr);

}  // namespace fracprice
