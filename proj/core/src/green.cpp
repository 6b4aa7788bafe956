#include "fracprice/green.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include "fracprice/error.hpp"
#include "fracprice/quadrature.hpp"

namespace fracprice {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesRadius = 1.5;
constexpr double kClampTol = 1e-9;

double clamp_density(double v) {
    if (v >= 0.0) return v;
    if (v >= -kClampTol) return 0.0;
    throw Error(ErrorCode::PositivityViolation, "Green function negative beyond round-off");
}

void check_gamma_kernel(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw Error(ErrorCode::GammaOutOfRange, "smearing kernels need 0 < gamma < 1");
}

}  // namespace

const char* to_string(DerivativeKind k) {
    return k == DerivativeKind::Caputo ? "caputo" : "rf";
}

// ===========================================================================
// DiffusionSpec
// ===========================================================================

double DiffusionSpec::kappa() const { return kind == DerivativeKind::Caputo ? 1.0 : gamma; }

void DiffusionSpec::validate() const {
    if (!(alpha > 1.0 && alpha <= 2.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (1, 2]");
    if (!(gamma > 0.0 && gamma < 2.0)) throw Error(ErrorCode::InvalidArgument, "gamma must lie in (0, 2)");
    if (gamma > 1.0 && !(gamma < alpha))
        throw Error(ErrorCode::InvalidArgument, "gamma > 1 requires gamma < alpha for a positive Green function");
    if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
}

double DiffusionSpec::scale_c() const {
    if (alpha == 2.0) return sigma * sigma;
    return std::pow(sigma, alpha) / std::abs(std::cos(0.5 * kPi * alpha));
}

double DiffusionSpec::unit_length(double tau) const {
    return std::pow(scale_c() * std::pow(tau, gamma), 1.0 / alpha);
}

// ===========================================================================
// GreenFunction
// ===========================================================================

ContourConfig contour_for(const DiffusionSpec& spec) {
    ContourConfig cfg;
    const double rho = spec.gamma / spec.alpha;
    if (rho < 1.0) cfg.t_max = std::clamp(50.0 / (0.5 * kPi * (1.0 - rho)), cfg.t_max, 2.0e3);
    return cfg;
}

GreenFunction::GreenFunction(const DiffusionSpec& spec, const ContourConfig& cfg)
    : spec_(spec), cfg_(cfg) {
    spec_.validate();
    const double a = spec_.alpha, g = spec_.gamma, kap = spec_.kappa();
    if (!(cfg_.c > 0.0 && cfg_.c < a)) throw Error(ErrorCode::InvalidArgument, "contour abscissa must lie in (0, alpha)");
    if (!(cfg_.t_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_max must be positive");
    if (cfg_.n_nodes < 64) throw Error(ErrorCode::InvalidArgument, "n_nodes must be at least 64");

    c0_ = cfg_.c / a;
    const double d = 0.9 * (1.0 - c0_);
    h_ = 2.0 * kPi * d / 40.0;
    prefactor_ = std::tgamma(kap) / (a * kPi);

    auto weight = [&](double t, bool neg) {
        const cplx s(c0_, t);
        cplx lf = log_gamma_complex(1.0 - s) - log_gamma_complex(kap - g * s / a);
        if (neg) lf += log_sin_pi((a - 1.0) * s / a) - log_sin_pi(s / a);
        return std::exp(lf);
    };

    auto build = [&](bool neg, std::vector<cplx>& w) {
        for (int pass = 0; pass < 2; ++pass) {
            w.clear();
            double fmax = 0.0;
            bool done = false;
            for (int j = 0;; ++j) {
                const double t = j * h_;
                if (t > cfg_.t_max) break;
                const cplx f = weight(t, neg);
                const double m = std::abs(f);
                fmax = std::max(fmax, m);
                w.push_back(h_ * f);
                if (t > 2.0 && m < 1e-17 * fmax) {
                    done = true;
                    break;
                }
            }
            if (!done) {
                const double tail = std::abs(w.back()) / (h_ * fmax);
                if (tail > 1e-14)
                    throw Error(ErrorCode::ContourTruncation,
                                "contour integrand not negligible at t_max; gamma/alpha too close to 1");
            }
            if (static_cast<int>(w.size()) >= cfg_.n_nodes || pass == 1) break;
            h_ = (w.size() * h_) / cfg_.n_nodes;
        }
        w.front() *= 0.5;
    };
    build(false, w_pos_);
    build(true, w_neg_);
}

double GreenFunction::contour_sum(double x) const {
    const std::vector<cplx>& w = x > 0.0 ? w_pos_ : w_neg_;
    const double L = std::log(std::abs(x));
    const cplx step = std::polar(1.0, h_ * L);
    cplx z = 1.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if ((j & 63) == 0) z = std::polar(1.0, static_cast<double>(j) * h_ * L);
        acc += w[j].real() * z.real() - w[j].imag() * z.imag();
        z *= step;
    }
    return prefactor_ * std::pow(std::abs(x), c0_ - 1.0) * acc;
}

double GreenFunction::series(double x, bool& ok) const {
    // x > 0: G(x) = Gamma(kappa)/alpha sum (-x)^n / (n! Gamma(kappa - gamma (n+1)/alpha))
    const double a = spec_.alpha, g = spec_.gamma, kap = spec_.kappa();
    const long double ax = std::abs(x);
    const long double sgn = -1.0L;
    long double sum = 0.0L, max_term = 0.0L, pw = 1.0L, fact = 1.0L;
    ok = false;
    for (int n = 0; n < 400; ++n) {
        if (n > 0) {
            pw *= sgn * ax;
            fact *= n;
        }
        const double arg = kap - g * (n + 1.0) / a;
        const long double term = pw / fact * rgamma(arg);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        // |1/Gamma(z)| <= Gamma(1 - z)/pi; terms vanish exactly where z hits a pole
        const long double bound = arg < 0.0 ? std::abs(pw / fact) * std::exp(std::lgamma(1.0L - arg)) / kPi
                                            : std::abs(term) + std::abs(pw / fact);
        if (n > 8 && bound < 1e-19L * std::abs(sum)) {
            ok = max_term * LDBL_EPSILON * 16.0L < 1e-14L * std::abs(sum);
            break;
        }
    }
    return std::tgamma(kap) / a * static_cast<double>(sum);
}

double GreenFunction::unit_origin() const {
    const double a = spec_.alpha, g = spec_.gamma, kap = spec_.kappa();
    return std::tgamma(kap) / a * rgamma(kap - g / a);
}

double GreenFunction::tail_coefficient(int m) const {
    const double a = spec_.alpha, g = spec_.gamma, kap = spec_.kappa();
    const double sgn = (m % 2) ? -1.0 : 1.0;
    int s1 = 1, s2 = 1;
    const double lg = boost::math::lgamma(1.0 + m * a, &s1) - boost::math::lgamma(kap + m * g, &s2);
    return std::tgamma(kap) * s1 * s2 * std::exp(lg) * sgn * std::sin(-m * kPi * (a - 1.0)) / kPi;
}

double GreenFunction::unit_negative_tail(double x, int terms) const {
    const double ax = std::abs(x);
    double acc = 0.0;
    for (int m = 1; m <= terms; ++m) acc += tail_coefficient(m) * std::pow(ax, -m * spec_.alpha - 1.0);
    return acc;
}

double GreenFunction::unit_contour(double x) const {
    if (x == 0.0) throw Error(ErrorCode::XiZero, "contour formula undefined at xi = 0; use green_at_origin");
    return contour_sum(x);
}

double GreenFunction::unit(double x) const {
    if (x == 0.0) return unit_origin();
    if (x > 0.0 && x < kSeriesRadius) {
        bool ok = false;
        const double v = series(x, ok);
        if (ok) return clamp_density(v);
    }
    if (x < -50.0 && spec_.alpha < 2.0) {
        // asymptotic expansion: accept once the terms have dropped far enough
        const double ax = -x;
        double acc = 0.0, last = 0.0;
        bool ok = false;
        for (int m = 1; m <= 12; ++m) {
            if (std::abs(std::sin(m * M_PI * (spec_.alpha - 1.0))) < 1e-12) continue;
            const double t = tail_coefficient(m) * std::pow(ax, -m * spec_.alpha - 1.0);
            if (last != 0.0 && std::abs(t) > std::abs(last)) break;
            acc += t;
            last = t;
            if (std::abs(t) < 1e-15 * std::abs(acc)) {
                ok = true;
                break;
            }
        }
        if (ok && acc > 0.0) return acc;
    }
    return clamp_density(contour_sum(x));
}

double GreenFunction::operator()(double xi, double tau) const {
    const double l = spec_.unit_length(tau);
    return unit(xi / l) / l;
}

// ===========================================================================
// Free functions
// ===========================================================================

namespace {

bool same(const DiffusionSpec& a, const DiffusionSpec& b) {
    return a.alpha == b.alpha && a.gamma == b.gamma && a.kind == b.kind;
}

bool same(const ContourConfig& a, const ContourConfig& b) {
    return a.c == b.c && a.t_max == b.t_max && a.n_nodes == b.n_nodes;
}

/// Per-thread cache of the most recent unit Green function (shape only; sigma enters via scale).
const GreenFunction& cached_green(const DiffusionSpec& spec, const ContourConfig& cfg) {
    thread_local std::unique_ptr<GreenFunction> last;
    thread_local ContourConfig last_cfg;
    if (!last || !same(last->spec(), spec) || !same(last_cfg, cfg)) {
        DiffusionSpec shape = spec;
        shape.sigma = 1.0;
        last = std::make_unique<GreenFunction>(shape, cfg);
        last_cfg = cfg;
    }
    return *last;
}

}  // namespace

double green_mellin_barnes(const DiffusionSpec& spec, const ContourConfig& cfg, double xi, double tau) {
    spec.validate();
    if (xi == 0.0) throw Error(ErrorCode::XiZero, "contour formula undefined at xi = 0; use green_at_origin");
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    const GreenFunction& g = cached_green(spec, cfg);
    const double l = spec.unit_length(tau);
    return g.unit(xi / l) / l;
}

double green_at_origin(const DiffusionSpec& spec, double tau) {
    spec.validate();
    const double a = spec.alpha, g = spec.gamma, kap = spec.kappa();
    return std::tgamma(kap) / a * rgamma(kap - g / a) / spec.unit_length(tau);
}

double green_fourier(const DiffusionSpec& spec, double xi, double tau) {
    spec.validate();
    if (spec.gamma != 1.0) throw Error(ErrorCode::InvalidArgument, "green_fourier requires gamma = 1");
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    StableParams p{spec.alpha, -1.0, 0.0, spec.sigma * std::pow(tau, 1.0 / spec.alpha)};
    return stable_density(p, xi, 1e-12);
}

std::vector<double> green_fourier_batch(const DiffusionSpec& spec, double tau, const std::vector<double>& xs) {
    spec.validate();
    if (spec.gamma != 1.0) throw Error(ErrorCode::InvalidArgument, "green_fourier_batch requires gamma = 1");
    if (xs.size() < 4) throw Error(ErrorCode::InvalidArgument, "grid needs at least 4 points");
    const std::size_t n = xs.size();
    const double dx = (xs.back() - xs.front()) / static_cast<double>(n - 1);
    std::size_t m = 1;
    while (m < 16 * n) m <<= 1;
    const double dk = 2.0 * kPi / (static_cast<double>(m) * dx);
    const StableParams p{spec.alpha, -1.0, 0.0, spec.sigma * std::pow(tau, 1.0 / spec.alpha)};

    fftw_complex* buf = fftw_alloc_complex(m);
    fftw_plan plan;
    {
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t q = 0; q < m; ++q) {
        const double k = (2 * q < m) ? dk * static_cast<double>(q) : -dk * static_cast<double>(m - q);
        cplx v = std::exp(stable_hamiltonian(p, k) - cplx(0.0, k * xs.front()));
        if (2 * q == m) v = cplx(v.real(), 0.0);
        buf[q][0] = v.real();
        buf[q][1] = v.imag();
    }
    fftw_execute(plan);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = std::max(0.0, buf[j][0] * dk / (2.0 * kPi));
    {
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

// ===========================================================================
// Smearing kernels
// ===========================================================================

double smearing_kernel_caputo(double gamma, double tau, double l) {
    check_gamma_kernel(gamma);
    if (!(tau > 0.0) || !(l >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel needs tau > 0, l >= 0");
    const double tg = std::pow(tau, gamma);
    return std::exp(log_wright_m(gamma, l / tg)) / tg;
}

double smearing_kernel_rf(double gamma, double tau, double l) {
    check_gamma_kernel(gamma);
    if (!(tau > 0.0) || !(l >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel needs tau > 0, l >= 0");
    if (l == 0.0) return 0.0;
    const double tg = std::pow(tau, gamma);
    return std::tgamma(gamma + 1.0) * l / (tg * tg) * std::exp(log_wright_m(gamma, l / tg));
}

double smearing_kernel_rf_stable(double gamma, double tau, double l) {
    check_gamma_kernel(gamma);
    if (!(tau > 0.0) || !(l >= 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel needs tau > 0, l >= 0");
    if (l == 0.0) return 0.0;
    // one-sided stable law with Laplace image exp(-s^gamma)
    const StableParams p{gamma, 1.0, 0.0, std::pow(std::cos(0.5 * kPi * gamma), 1.0 / gamma)};
    const double sl = std::pow(l, -1.0 / gamma);
    return std::tgamma(gamma) * std::pow(tau, 1.0 - gamma) * sl * stable_density(p, tau * sl, 1e-11);
}

namespace {

/// Unit-scale gamma = 1 density tabulated by one FFT on [-32, 32] and read back with cubic interpolation.
struct StableTable {
    double alpha = 0.0;
    double z0 = 0.0, dz = 0.0;
    std::vector<double> v;
};

double unit_stable(double alpha, double z) {
    thread_local StableTable t;
    if (t.v.empty() || t.alpha != alpha) {
        const int n = 65537;
        t.alpha = alpha;
        t.z0 = -32.0;
        t.dz = 64.0 / (n - 1);
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = t.z0 + i * t.dz;
        t.v = green_fourier_batch({alpha, 1.0, DerivativeKind::Caputo, 1.0}, 1.0, xs);
    }
    const double u = (z - t.z0) / t.dz;
    const auto i = std::clamp(static_cast<std::ptrdiff_t>(std::floor(u)) - 1, std::ptrdiff_t{0},
                              static_cast<std::ptrdiff_t>(t.v.size()) - 4);
    const double r = u - static_cast<double>(i);
    const double* y = t.v.data() + i;
    const double l0 = -(r - 1) * (r - 2) * (r - 3) / 6, l1 = r * (r - 2) * (r - 3) / 2;
    const double l2 = -r * (r - 1) * (r - 3) / 2, l3 = r * (r - 1) * (r - 2) / 6;
    return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

/// gamma = 1 density of the model at pseudo-time lp, with the far tails taken from the
/// standard stable expansion where direct inversion would need excessive panels.
double pseudo_time_density(const DiffusionSpec& spec, double xi, double lp) {
    const double a = spec.alpha;
    const double s = spec.sigma * std::pow(lp, 1.0 / a);
    const double z = xi / s;
    if (z > 30.0) return 0.0;
    if (z < -30.0 && a < 2.0) {
        const double cz = std::pow(std::abs(std::cos(0.5 * kPi * a)), -1.0 / a);  // unit-c length
        const double x = -z / cz;
        double acc = 0.0, last = 0.0;
        for (int m = 1; m <= 10; ++m) {
            const double lg = std::lgamma(1.0 + m * a) - std::lgamma(1.0 + m);
            const double t = ((m % 2) ? 1.0 : -1.0) * std::exp(lg) * std::sin(m * kPi * (a - 1.0)) / kPi *
                             std::pow(x, -m * a - 1.0);
            if (m > 1 && std::abs(t) > std::abs(last)) break;
            acc += t;
            last = t;
        }
        return acc / (cz * s);
    }
    if (z < -30.0) return 0.0;
    return unit_stable(a, z) / s;
}

/// Fixed product rule over u = l / tau^gamma with the kernel weight folded in; two nested
/// resolutions give an error estimate.
struct KernelRule {
    double gamma = -1.0;
    DerivativeKind kind = DerivativeKind::Caputo;
    std::vector<double> u, w_coarse, w_fine;  // w_coarse is zero on fine-only nodes
};

const KernelRule& kernel_rule(double g, DerivativeKind kind) {
    thread_local KernelRule r;
    if (r.gamma == g && r.kind == kind) return r;
    const bool rf = kind == DerivativeKind::RieszFeller;
    const double grf = std::tgamma(g + 1.0);
    // M_gamma(u) (Caputo) or Gamma(gamma+1) u M_gamma(u) (RF)
    auto weight = [&](double u) {
        const double lm = log_wright_m(g, u);
        return rf ? grf * u * std::exp(lm) : std::exp(lm);
    };
    double u_max = 1.0;
    while (std::log(std::max(weight(u_max), 1e-300)) > -45.0) u_max *= 1.5;
    // the weight concentrates at its mode as gamma -> 1
    double mode = 0.0, best = -HUGE_VAL;
    for (int i = 1; i <= 2000; ++i) {
        const double u = u_max * i / 2000.0;
        const double lw = std::log(std::max(weight(u), 1e-300));
        if (lw > best) {
            best = lw;
            mode = u;
        }
    }
    std::vector<double> cuts{0.0, u_max, mode};
    for (double b = std::ldexp(1.0, -30); b < u_max; b *= 2.0) cuts.push_back(b);
    for (int k = 1; k <= 14; ++k) {
        const double d = mode * std::ldexp(1.0, -k);
        cuts.push_back(mode - d);
        cuts.push_back(std::min(mode + d, u_max));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    r = KernelRule{};
    r.gamma = g;
    r.kind = kind;
    const auto& gl = quad::GaussLegendre::get(16);
    auto push = [&](double a, double b, bool coarse, bool fine) {
        const double h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            const double u = c + h * gl.x[j];
            const double wt = weight(u) * gl.w[j] * h;
            r.u.push_back(u);
            r.w_coarse.push_back(coarse ? wt : 0.0);
            r.w_fine.push_back(fine ? wt : 0.0);
        }
    };
    for (std::size_t i = 0; i + 1 < cuts.size() && cuts[i] < u_max; ++i) {
        const double a = cuts[i], b = cuts[i + 1], m = 0.5 * (a + b);
        push(a, b, true, false);
        push(a, m, false, true);
        push(m, b, false, true);
    }
    return r;
}

}  // namespace

double green_via_kernel(const DiffusionSpec& spec, double xi, double tau) {
    spec.validate();
    check_gamma_kernel(spec.gamma);
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    const double tg = std::pow(tau, spec.gamma);
    const KernelRule& rule = kernel_rule(spec.gamma, spec.kind);
    double coarse = 0.0, total = 0.0;
    for (std::size_t i = 0; i < rule.u.size(); ++i) {
        const double wc = rule.w_coarse[i], wf = rule.w_fine[i];
        if (wc == 0.0 && wf == 0.0) continue;
        const double d = pseudo_time_density(spec, xi, rule.u[i] * tg);
        coarse += wc * d;
        total += wf * d;
    }
    const double err = std::abs(total - coarse);
    if (err > 1e-7 * std::max(1.0, std::abs(total)))
        throw Error(ErrorCode::QuadratureBudget, "kernel composition quadrature did not converge");
    return clamp_density(total);
}

double diffusion_scaling(const DiffusionSpec& spec, double xi, double tau) {
    spec.validate();
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    const double s = std::pow(tau, -spec.scaling_exponent());
    if (xi == 0.0) return s * green_at_origin(spec, 1.0);
    return s * green_mellin_barnes(spec, ContourConfig{}, xi * s, 1.0);
}

// ===========================================================================
// Exponential moments and the Esscher drift
// ===========================================================================

double exponential_moment(const DiffusionSpec& spec, double lambda, double tau) {
    spec.validate();
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be non-negative");
    const double z = spec.scale_c() * std::pow(lambda, spec.alpha) * std::pow(tau, spec.gamma);
    if (spec.gamma == 1.0) return std::exp(z);
    const double kap = spec.kappa();
    return std::tgamma(kap) * mittag_leffler(spec.gamma, kap, cplx(z, 0.0)).real();
}

double esscher_drift(const DiffusionSpec& spec, double tau) {
    spec.validate();
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    if (spec.gamma == 1.0) {
        if (spec.alpha == 2.0) return -spec.sigma * spec.sigma;
        return std::pow(spec.sigma, spec.alpha) / std::cos(0.5 * kPi * spec.alpha);
    }
    return -std::log(exponential_moment(spec, 1.0, tau)) / tau;
}

}  // namespace fracprice
