#include "fracprice/specfun.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "fracprice/error.hpp"
#include "fracprice/quadrature.hpp"

namespace fracprice {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kLogPi = 1.14472988584940017414;

// ===========================================================================
// Lanczos approximation, g = 607/128, 15 coefficients
// ===========================================================================

constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5,
};

cplx lanczos_log_gamma(cplx z) {
    cplx x = z - 1.0;
    cplx sum = kLanczosC[0];
    for (int k = 1; k < 15; ++k) sum += kLanczosC[k] / (x + static_cast<double>(k));
    cplx t = x + kLanczosG + 0.5;
    return kHalfLog2Pi + (x + 0.5) * std::log(t) - t + std::log(sum);
}

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

cplx log_sin_pi(cplx z) {
    double xr = z.real() - 2.0 * std::round(0.5 * z.real());
    cplx w(xr, z.imag());
    if (std::abs(w.imag()) < 1.0) return std::log(std::sin(kPi * w));
    if (w.imag() < 0.0) return std::conj(log_sin_pi(std::conj(w)));
    const cplx i(0.0, 1.0);
    cplx e2 = std::exp(2.0 * i * kPi * w);
    return -i * kPi * w + std::log(cplx(0.0, 0.5)) + std::log(1.0 - e2);
}

namespace {

long double lgamma_ld(long double x, int* sign) {
    return boost::math::lgamma(x, sign);
}

}  // namespace

// ===========================================================================
// Parameter handling
// ===========================================================================

void validate(const StableParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 2.0))
        throw Error(ErrorCode::InvalidArgument, "stable alpha must lie in (0, 2]");
    if (!(p.beta >= -1.0 && p.beta <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "stable beta must lie in [-1, 1]");
    if (!(p.scale >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "stable scale must be non-negative");
}

ThetaForm to_theta_form(const StableParams& p) {
    validate(p);
    ThetaForm t;
    t.alpha = p.alpha;
    t.loc = p.loc;
    const double sa = std::pow(p.scale, p.alpha);
    if (p.alpha == 1.0) {
        if (p.beta != 0.0)
            throw Error(ErrorCode::InvalidArgument, "alpha = 1 with beta != 0 has no theta form");
        t.theta = 0.0;
        t.c = sa;
        return t;
    }
    const double tn = (p.alpha == 2.0) ? 0.0 : std::tan(0.5 * kPi * p.alpha);
    t.theta = (2.0 / kPi) * std::atan(-p.beta * tn);
    t.c = sa * std::sqrt(1.0 + p.beta * p.beta * tn * tn);
    return t;
}

StableParams from_theta_form(const ThetaForm& t) {
    const double lim = std::min(t.alpha, 2.0 - t.alpha);
    if (std::abs(t.theta) > lim + 1e-14)
        throw Error(ErrorCode::ThetaOutsideDiamond, "theta outside the Feller-Takayasu diamond");
    StableParams p;
    p.alpha = t.alpha;
    p.loc = t.loc;
    const double ct = std::cos(0.5 * kPi * t.theta);
    if (t.alpha == 2.0 || t.alpha == 1.0) {
        p.beta = 0.0;
    } else {
        p.beta = -std::tan(0.5 * kPi * t.theta) / std::tan(0.5 * kPi * t.alpha);
        p.beta = std::clamp(p.beta, -1.0, 1.0);
    }
    p.scale = std::pow(t.c * ct, 1.0 / t.alpha);
    return p;
}

// ===========================================================================
// Gamma
// ===========================================================================

cplx log_gamma_complex(cplx z) {
    if (is_nonpositive_integer(z))
        throw Error(ErrorCode::Pole, "Gamma has a pole at non-positive integer " +
                                         std::to_string(static_cast<long long>(z.real())));
    if (z.real() < 0.5) return kLogPi - log_sin_pi(z) - lanczos_log_gamma(1.0 - z);
    return lanczos_log_gamma(z);
}

cplx gamma_complex(cplx z) { return std::exp(log_gamma_complex(z)); }

cplx rgamma_complex(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma_complex(z));
}

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    int sign = 1;
    double lg = boost::math::lgamma(x, &sign);
    return sign * std::exp(-lg);
}

// ===========================================================================
// Mittag-Leffler
// ===========================================================================

namespace {

struct SeriesOutcome {
    cplx value;
    bool ok;
};

SeriesOutcome ml_series(double a, double b, cplx z, const SeriesControl& ctl) {
    using cl = std::complex<long double>;
    const long double r = std::abs(z);
    if (r == 0.0L) return {rgamma(b), true};
    const long double lr = std::log(r);
    const long double ph = std::arg(z);
    cl sum = 0.0L;
    long double max_term = 0.0L;
    long double prev = std::numeric_limits<long double>::infinity();
    for (int n = 0; n < ctl.max_terms; ++n) {
        const long double x = static_cast<long double>(a) * n + b;
        long double mag;
        int sign = 1;
        if (x <= 0.0L && x == std::floor(x)) {
            mag = 0.0L;
        } else {
            long double lg = lgamma_ld(x, &sign);
            mag = std::exp(n * lr - lg);
        }
        cl term = std::polar(mag, n * ph) * static_cast<long double>(sign);
        sum += term;
        max_term = std::max(max_term, mag);
        if (!std::isfinite(static_cast<double>(std::abs(sum)))) return {cplx(), false};
        const long double ratio = (prev > 0.0L && std::isfinite(prev)) ? mag / prev : 1.0L;
        const long double scale = std::max(1.0L, std::abs(sum));
        if (n > 2 && mag < prev && ratio < 0.9L) {
            const long double tail = mag * ratio / (1.0L - ratio);
            if (tail < ctl.abs_tol * scale) {
                const long double cancel = max_term * LDBL_EPSILON * 8.0L;
                bool ok = cancel <= std::max<long double>(ctl.abs_tol, 1e-13L * std::abs(sum));
                return {cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag())), ok};
            }
        }
        prev = mag;
    }
    return {cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag())), false};
}

bool ml_contour(double a, double b, cplx z, const SeriesControl& ctl, cplx& out) {
    const cplx mz = -z;
    const double rho = kPi * (1.0 - 0.5 * a) - std::abs(std::arg(mz));
    if (rho < 0.05) return false;
    const double c = 0.5;
    const double h = 0.05;
    const cplx lmz = std::log(mz);
    auto f = [&](double t) {
        cplx s(c, t);
        return kPi / std::cosh(kPi * t) * rgamma_complex(b - a * s) * std::exp(-s * lmz);
    };
    cplx sum = h * f(0.0);
    double fmax = std::abs(f(0.0));
    const double t_cap = std::max(20.0, 60.0 / rho);
    bool converged = false;
    for (int j = 1; j * h <= t_cap; ++j) {
        const double t = j * h;
        cplx fp = f(t), fm = f(-t);
        sum += h * (fp + fm);
        const double m = std::max(std::abs(fp), std::abs(fm));
        fmax = std::max(fmax, m);
        if (t > 5.0 && m < 1e-18 * fmax) {
            converged = true;
            break;
        }
    }
    if (!converged) return false;
    out = sum / (2.0 * kPi);
    (void)ctl;
    return true;
}

}  // namespace

cplx mittag_leffler(double a, double b, cplx z, const SeriesControl& ctl) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "Mittag-Leffler requires a > 0");
    if (std::abs(z) <= ctl.switch_radius) {
        auto s = ml_series(a, b, z, ctl);
        if (s.ok) return s.value;
    } else {
        cplx v;
        if (ml_contour(a, b, z, ctl, v)) return v;
        auto s = ml_series(a, b, z, ctl);
        if (s.ok) return s.value;
    }
    throw Error(ErrorCode::NonConvergence,
                "Mittag-Leffler: neither series nor contour reached tolerance");
}

// ===========================================================================
// Wright M
// ===========================================================================

namespace {

struct RealSeries {
    long double value;
    bool ok;
};

RealSeries wright_series(double nu, double z, const SeriesControl& ctl) {
    // M = (1/pi) sum (-z)^n / n! * Gamma(nu(n+1)) sin(pi nu (n+1))
    const long double lz = std::log(static_cast<long double>(z));
    long double sum = 0.0L, max_term = 0.0L;
    long double prev = std::numeric_limits<long double>::infinity();
    for (int n = 0; n < ctl.max_terms; ++n) {
        const long double m = nu * (n + 1.0L);
        const long double s = std::sin(static_cast<long double>(kPi) * m);
        int sg = 1;
        long double lg = lgamma_ld(m, &sg);
        long double mag = std::exp(n * lz - std::lgamma(n + 1.0L) + lg) / static_cast<long double>(kPi);
        long double term = mag * s * ((n % 2) ? -1.0L : 1.0L);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        if (n > 2 && mag < prev) {
            const long double ratio = mag / prev;
            if (ratio < 0.9L && mag * ratio / (1.0L - ratio) < ctl.abs_tol * 1e-2L * std::max(1e-300L, std::abs(sum))) {
                const long double cancel = max_term * LDBL_EPSILON * 8.0L;
                return {sum, cancel <= 1e-13L * std::abs(sum)};
            }
        }
        prev = mag;
    }
    return {sum, false};
}

double log_sinc(double x) {
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return -x2 / 6.0 - x2 * x2 / 180.0 - x2 * x2 * x2 / 2835.0;
    }
    return std::log(std::sin(x) / x);
}

double kanter_log_a0(double nu) { return (nu / (1.0 - nu)) * std::log(nu) + std::log(1.0 - nu); }

/// log a(u) - log a(0), free of cancellation at small u.
double kanter_log_ratio(double nu, double u) {
    return (nu * log_sinc(nu * u) + (1.0 - nu) * log_sinc((1.0 - nu) * u) - log_sinc(u)) / (1.0 - nu);
}

double wright_log_kanter(double nu, double z) {
    const double Z = std::pow(z, 1.0 / (1.0 - nu));
    const double la0 = kanter_log_a0(nu);
    const double a0 = std::exp(la0);
    auto f = [&](double u) {
        if (u >= kPi) return 0.0;
        const double d = kanter_log_ratio(nu, u);
        const double e = a0 * std::expm1(d) * Z;
        if (!(e < 745.0)) return 0.0;
        return std::exp(la0 + d - e);
    };
    const double w = std::min(kPi, 1.0 / std::sqrt(std::max(Z, 1e-300)));
    double total = 0.0;
    double lo = 0.0, hi = w;
    while (lo < kPi) {
        hi = std::min(hi, kPi);
        auto r = quad::adaptive(f, lo, hi, 1e-12, 10);
        total += r.value;
        if (lo > 0.0 && r.value < 1e-17 * total) break;
        lo = hi;
        hi = 2.0 * hi;
    }
    if (!(total > 0.0))
        throw Error(ErrorCode::ToleranceNotReached, "Wright M: integral representation underflowed");
    return (nu / (1.0 - nu)) * std::log(z) - std::log(kPi * (1.0 - nu)) - a0 * Z + std::log(total);
}

}  // namespace

double log_wright_m(double nu, double z, const SeriesControl& ctl) {
    if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorCode::InvalidArgument, "Wright M requires 0 < nu < 1");
    if (!(z >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Wright M requires z >= 0");
    if (z == 0.0) return -std::lgamma(1.0 - nu);
    if (z < 3.0) {
        auto s = wright_series(nu, z, ctl);
        if (s.ok && s.value > 0.0L) return static_cast<double>(std::log(s.value));
    }
    return wright_log_kanter(nu, z);
}

double wright_m(double nu, double z, const SeriesControl& ctl) {
    return std::exp(log_wright_m(nu, z, ctl));
}

// ===========================================================================
// Stable Hamiltonians
// ===========================================================================

cplx stable_hamiltonian(const StableParams& p, double k) {
    validate(p);
    if (k == 0.0) return 0.0;
    const double ak = std::abs(k);
    const double sg = k > 0.0 ? 1.0 : -1.0;
    double omega;
    if (p.alpha == 1.0) omega = (2.0 / kPi) * std::log(ak);
    else if (p.alpha == 2.0) omega = 0.0;
    else omega = std::tan(0.5 * kPi * p.alpha);
    const double mag = std::pow(p.scale * ak, p.alpha);
    return cplx(0.0, p.loc * k) - mag * cplx(1.0, -p.beta * sg * omega);
}

cplx stable_hamiltonian_theta(double alpha, double theta, double c, double xbar, double k) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 2]");
    if (std::abs(theta) > std::min(alpha, 2.0 - alpha) + 1e-14)
        throw Error(ErrorCode::ThetaOutsideDiamond, "theta outside the Feller-Takayasu diamond");
    if (k == 0.0) return 0.0;
    const double sg = k > 0.0 ? 1.0 : -1.0;
    return cplx(0.0, xbar * k) - c * std::pow(std::abs(k), alpha) * std::polar(1.0, sg * theta * 0.5 * kPi);
}

// ===========================================================================
// Stable density by Fourier inversion
// ===========================================================================

namespace {

template <class F>
double refine_panel(F& f, double a, double b, double tol, int depth, double& err) {
    auto r = quad::kronrod15(f, a, b);
    if (r.error <= tol || depth == 0) {
        err += r.error;
        return r.value;
    }
    const double m = 0.5 * (a + b);
    return refine_panel(f, a, m, 0.5 * tol, depth - 1, err) +
           refine_panel(f, m, b, 0.5 * tol, depth - 1, err);
}

}  // namespace

double stable_density(const StableParams& p, double x, double abs_tol) {
    validate(p);
    if (!(p.scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "stable_density requires scale > 0");
    const double alpha = p.alpha, beta = p.beta;
    const double z = (p.loc - x) / p.scale;
    const double ls = std::log(p.scale);
    const bool unit = alpha == 1.0;
    const double tn = (unit || alpha == 2.0) ? 0.0 : std::tan(0.5 * kPi * alpha);

    auto f = [&](double u) {
        if (u <= 0.0) return 1.0;
        const double ua = std::pow(u, alpha);
        const double om = unit ? (2.0 / kPi) * (std::log(u) - ls) : tn;
        const double phase = beta * ua * om + u * z;
        return std::exp(-ua) * std::cos(phase);
    };

    const double U = std::pow(41.0, 1.0 / alpha);
    double osc = std::abs(beta) * (unit ? (2.0 / kPi) * (std::abs(ls) + std::abs(std::log(U)) + 2.0)
                                        : alpha * std::abs(tn) * std::max(1.0, std::pow(U, alpha - 1.0)));
    const double w = std::min(0.5, 2.0 / (std::abs(z) + osc + 1.0));
    const int n_panels = static_cast<int>(std::ceil((U - w) / w));
    const double tol = abs_tol * kPi;
    const double panel_tol = tol / (n_panels + 60);

    double err = 0.0, total = 0.0;
    // geometric grading towards the cusp of u^alpha at the origin
    double hi = w;
    for (int j = 0; j < 50; ++j) {
        const double lo = 0.5 * hi;
        total += refine_panel(f, lo, hi, panel_tol, 8, err);
        hi = lo;
    }
    total += hi;  // integrand ~ 1 on [0, hi]
    for (int j = 0; j < n_panels; ++j) {
        const double a = w + j * w;
        const double b = std::min(U, a + w);
        if (b <= a) break;
        total += refine_panel(f, a, b, panel_tol, 8, err);
    }
    if (err > tol)
        throw Error(ErrorCode::ToleranceNotReached, "stable_density: quadrature tolerance not reached");
    const double v = total / (kPi * p.scale);
    return v < 0.0 ? 0.0 : v;
}

cplx levy_laplace_exponent(double alpha, double sigma, double xbar, cplx lam) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 2]");
    if (alpha == 1.0) throw Error(ErrorCode::InvalidArgument, "Laplace exponent undefined at alpha = 1");
    if (lam.real() < 0.0) throw Error(ErrorCode::InvalidArgument, "Laplace exponent requires Re(lambda) >= 0");
    if (lam == 0.0) return 0.0;
    const double sec = 1.0 / std::cos(0.5 * kPi * alpha);
    return -lam * xbar - std::pow(lam, alpha) * std::pow(sigma, alpha) * sec;
}

}  // namespace fracprice
