#include "fracprice/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "fracprice/error.hpp"

namespace fracprice {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::mutex& fftw_plan_mutex() {
    static std::mutex mu;
    return mu;
}

/// Nodes of f restricted to [a, b] with interpolated endpoints.
void restrict_nodes(const GridFunction& f, double a, double b, std::vector<double>& y,
                    std::vector<double>& v) {
    y.clear();
    v.clear();
    y.push_back(a);
    v.push_back(f(a));
    auto it = std::upper_bound(f.xs.begin(), f.xs.end(), a);
    for (; it != f.xs.end() && *it < b; ++it) {
        y.push_back(*it);
        v.push_back(f.ys[static_cast<std::size_t>(it - f.xs.begin())]);
    }
    if (b > a) {
        y.push_back(b);
        v.push_back(f(b));
    }
}

/// int_{y0}^{x} (x - y)^{nu - 1} p(y) dy for the piecewise-linear p through (y, v).
double product_integral(const std::vector<double>& y, const std::vector<double>& v, double x,
                        double nu) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        const double h = y[j + 1] - y[j];
        if (h <= 0.0) continue;
        const double u0 = x - y[j];
        const double u1 = x - y[j + 1];
        const double d = (v[j] - v[j + 1]) / h;  // slope in u
        const double c0 = v[j + 1] - d * u1;
        const double i0 = (std::pow(u0, nu) - std::pow(u1, nu)) / nu;
        const double i1 = (std::pow(u0, nu + 1.0) - std::pow(u1, nu + 1.0)) / (nu + 1.0);
        acc += c0 * i0 + d * i1;
    }
    return acc;
}

/// Lagrange derivative of order `order` at node i from the five nearest nodes, written on
/// differences f_k - f_i so that constants give exactly zero.
double node_derivative(const std::vector<double>& xs, const std::vector<double>& ys, std::size_t i,
                       int order) {
    const std::size_t n = xs.size();
    std::size_t lo = i >= 2 ? i - 2 : 0;
    if (lo + 5 > n) lo = n - 5;
    double pts[5], w[5];
    for (int k = 0; k < 5; ++k) pts[k] = xs[lo + k] - xs[i];
    // weights from the derivative of the Lagrange basis at 0
    for (int k = 0; k < 5; ++k) {
        double denom = 1.0;
        for (int m = 0; m < 5; ++m)
            if (m != k) denom *= pts[k] - pts[m];
        // coefficients of prod_{m != k} (t - pts[m])
        double poly[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
        int deg = 0;
        for (int m = 0; m < 5; ++m) {
            if (m == k) continue;
            for (int d = deg + 1; d > 0; --d) poly[d] = poly[d - 1] - pts[m] * poly[d];
            poly[0] = -pts[m] * poly[0];
            ++deg;
        }
        const double fact = order == 1 ? 1.0 : 2.0;
        w[k] = fact * poly[order] / denom;
    }
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += w[k] * (ys[lo + k] - ys[i]);
    return acc;
}

void check_point(const GridFunction& f, const FracOrder& o, double x) {
    f.validate();
    if (!(o.nu > 0.0)) throw Error(ErrorCode::InvalidArgument, "fractional order must be positive");
    if (o.origin < f.xs.front() || x > f.xs.back() || x < f.xs.front())
        throw Error(ErrorCode::XOutsideGrid, "evaluation point outside the grid");
    if (x < o.origin) throw Error(ErrorCode::XOutsideGrid, "evaluation point left of the origin");
}

}  // namespace

// ===========================================================================
// GridFunction
// ===========================================================================

void GridFunction::validate() const {
    if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "grid sizes differ");
    if (xs.size() < 4) throw Error(ErrorCode::InvalidArgument, "grid needs at least 4 points");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid not strictly increasing");
}

double GridFunction::operator()(double x) const {
    if (x < xs.front() || x > xs.back()) throw Error(ErrorCode::XOutsideGrid, "interpolation outside grid");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    if (j == 0) return ys.front();
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    xs.back() = b;
    return xs;
}

std::vector<double> graded_grid(double a, double b, int n, double power) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xs[static_cast<std::size_t>(i)] = a + (b - a) * std::pow(static_cast<double>(i) / (n - 1), power);
    xs.back() = b;
    return xs;
}

// ===========================================================================
// Riemann-Liouville and Caputo
// ===========================================================================

double rl_integral(const GridFunction& f, const FracOrder& o, double x) {
    check_point(f, o, x);
    if (x == o.origin) return 0.0;
    std::vector<double> y, v;
    restrict_nodes(f, o.origin, x, y, v);
    return product_integral(y, v, x, o.nu) / std::tgamma(o.nu);
}

GridFunction rl_integral_grid(const GridFunction& f, const FracOrder& o) {
    f.validate();
    GridFunction g;
    for (std::size_t i = 0; i < f.xs.size(); ++i) {
        if (f.xs[i] < o.origin) continue;
        g.xs.push_back(f.xs[i]);
        g.ys.push_back(rl_integral(f, o, f.xs[i]));
    }
    return g;
}

double rl_derivative(const GridFunction& f, const FracOrder& o, double x, double fd_step) {
    check_point(f, o, x);
    const int n = static_cast<int>(std::ceil(o.nu - 1e-12));
    if (n > 2) throw Error(ErrorCode::InvalidArgument, "rl_derivative supports orders up to 2");
    const double mu = n - o.nu;
    auto J = [&](double y) {
        if (mu <= 1e-12) return f(y);
        return rl_integral(f, FracOrder{mu, o.origin}, y);
    };
    const double room_right = f.xs.back() - x;
    const double room_left = x - o.origin;
    double h = fd_step > 0.0 ? fd_step : 0.01 * std::max(1e-3, std::min(1.0, room_left));
    if (2.0 * h <= room_right && 2.0 * h <= room_left) {
        if (n == 1) return (-J(x + 2 * h) + 8 * J(x + h) - 8 * J(x - h) + J(x - 2 * h)) / (12 * h);
        return (-J(x + 2 * h) + 16 * J(x + h) - 30 * J(x) + 16 * J(x - h) - J(x - 2 * h)) / (12 * h * h);
    }
    h = std::min(h, room_left / 5.0);
    if (!(h > 0.0)) throw Error(ErrorCode::XOutsideGrid, "no room for the outer difference stencil");
    if (n == 1)
        return (25 * J(x) - 48 * J(x - h) + 36 * J(x - 2 * h) - 16 * J(x - 3 * h) + 3 * J(x - 4 * h)) /
               (12 * h);
    return (45 * J(x) - 154 * J(x - h) + 214 * J(x - 2 * h) - 156 * J(x - 3 * h) + 61 * J(x - 4 * h) -
            10 * J(x - 5 * h)) /
           (12 * h * h);
}

double caputo_derivative(const GridFunction& f, const FracOrder& o, double x) {
    check_point(f, o, x);
    const int n = static_cast<int>(std::ceil(o.nu - 1e-12));
    if (n > 2) throw Error(ErrorCode::InvalidArgument, "caputo_derivative supports orders up to 2");
    const double mu = n - o.nu;

    // g = f^{(n-1)} on the nodes; its derivative is taken exactly on the linear interpolant
    GridFunction g = f;
    if (n == 2) {
        for (std::size_t i = 0; i < f.xs.size(); ++i) g.ys[i] = node_derivative(f.xs, f.ys, i, 1);
    }
    if (mu <= 1e-12) {
        auto it = std::upper_bound(g.xs.begin(), g.xs.end(), x);
        std::size_t j = static_cast<std::size_t>(it - g.xs.begin());
        j = std::clamp<std::size_t>(j, 1, g.xs.size() - 1);
        return (g.ys[j] - g.ys[j - 1]) / (g.xs[j] - g.xs[j - 1]);
    }
    if (x == o.origin) return 0.0;
    std::vector<double> y, v;
    restrict_nodes(g, o.origin, x, y, v);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        const double h = y[j + 1] - y[j];
        const double dv = v[j + 1] - v[j];
        if (h <= 0.0 || dv == 0.0) continue;
        const double u0 = x - y[j], u1 = x - y[j + 1];
        acc += dv / h * (std::pow(u0, mu) - std::pow(u1, mu)) / mu;
    }
    return acc / std::tgamma(mu);
}

// ===========================================================================
// Riesz-Feller spectral application
// ===========================================================================

GridFunction riesz_feller_apply(const GridFunction& f, double alpha, double theta,
                                bool* insufficient_decay) {
    f.validate();
    if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 2]");
    if (std::abs(theta) > std::min(alpha, 2.0 - alpha) + 1e-14)
        throw Error(ErrorCode::ThetaOutsideDiamond, "theta outside the Feller-Takayasu diamond");
    const std::size_t n = f.xs.size();
    const double span = f.xs.back() - f.xs.front();
    const double dx = span / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(f.xs[i] + f.xs[n - 1 - i]) > 1e-9 * span)
            throw Error(ErrorCode::GridNotSymmetric, "grid is not symmetric about the origin");
        if (i > 0 && std::abs(f.xs[i] - f.xs[i - 1] - dx) > 1e-6 * dx)
            throw Error(ErrorCode::GridNotSymmetric, "grid is not uniform");
    }
    double fmax = 0.0;
    for (double y : f.ys) fmax = std::max(fmax, std::abs(y));
    const double edge = std::max(std::abs(f.ys.front()), std::abs(f.ys.back()));
    if (insufficient_decay) *insufficient_decay = edge > 1e-8 * fmax;

    // zero padding keeps periodic images far from the data
    const std::size_t m = 4 * n;
    fftw_complex* buf = fftw_alloc_complex(m);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        bwd = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fwd = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    const std::size_t off = (m - n) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        buf[i][0] = (i >= off && i < off + n) ? f.ys[i - off] : 0.0;
        buf[i][1] = 0.0;
    }
    fftw_execute(bwd);  // sum f_j e^{+2 pi i j q / m}
    const double dk = 2.0 * kPi / (static_cast<double>(m) * dx);
    for (std::size_t q = 0; q < m; ++q) {
        std::complex<double> sym;
        if (2 * q == m) {
            const double k = kPi / dx;
            sym = -std::pow(k, alpha) * std::cos(0.5 * kPi * theta);
        } else {
            const double k = (2 * q < m) ? dk * static_cast<double>(q) : -dk * static_cast<double>(m - q);
            if (k == 0.0) sym = 0.0;
            else sym = -std::pow(std::abs(k), alpha) * std::polar(1.0, (k > 0 ? 1.0 : -1.0) * 0.5 * kPi * theta);
        }
        std::complex<double> v(buf[q][0], buf[q][1]);
        v *= sym;
        buf[q][0] = v.real();
        buf[q][1] = v.imag();
    }
    fftw_execute(fwd);
    GridFunction out;
    out.xs = f.xs;
    out.ys.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.ys[i] = buf[i + off][0] / static_cast<double>(m);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(buf);
    return out;
}

}  // namespace fracprice
