#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fracprice::quad {

struct PanelResult {
    double value = 0.0;
    double error = 0.0;
};

/// Full 15-point Kronrod node set on [-1,1] with Kronrod and embedded 7-point Gauss weights.
struct Kronrod15 {
    std::array<double, 15> x{};
    std::array<double, 15> wk{};
    std::array<double, 15> wg{};

    static const Kronrod15& get();
};

/// Kronrod 15 with the embedded 7-point Gauss difference as error.
template <class F>
PanelResult kronrod15(F& f, double a, double b) {
    const Kronrod15& k = Kronrod15::get();
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double vk = 0.0, vg = 0.0;
    for (std::size_t i = 0; i < k.x.size(); ++i) {
        const double y = f(c + h * k.x[i]);
        vk += k.wk[i] * y;
        vg += k.wg[i] * y;
    }
    return {vk * h, std::abs(vk - vg) * h};
}

/// Adaptive bisection with Kronrod 15 panels; a panel is accepted once its error is below
/// rel_tol times its own magnitude, or at max_depth.
template <class F>
PanelResult adaptive(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 20) {
    PanelResult r = kronrod15(f, a, b);
    if (r.error <= rel_tol * std::abs(r.value) || r.error == 0.0 || max_depth == 0) return r;
    const double m = 0.5 * (a + b);
    const PanelResult left = adaptive(f, a, m, rel_tol, max_depth - 1);
    const PanelResult right = adaptive(f, m, b, rel_tol, max_depth - 1);
    return {left.value + right.value, left.error + right.error};
}

/// Gauss-Legendre nodes and weights on [-1,1] for an arbitrary order (cached per n).
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    static const GaussLegendre& get(std::size_t n);
};

}  // namespace fracprice::quad
