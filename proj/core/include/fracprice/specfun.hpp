#pragma once

#include <complex>

namespace fracprice {

using cplx = std::complex<double>;

// ===========================================================================
// Stable-law parameterizations
// ===========================================================================

/// Stable law (alpha, beta) with location and scale.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double loc = 0.0;
    double scale = 1.0;
};

/// Equivalent (alpha, theta, c) view: H(k) = i loc k - c |k|^alpha e^{i sign(k) theta pi/2}.
struct ThetaForm {
    double alpha = 2.0;
    double theta = 0.0;
    double c = 1.0;
    double loc = 0.0;
};

/// Throws InvalidArgument when alpha, beta or scale are out of range.
void validate(const StableParams& p);

/// (beta, scale) -> (theta, c); alpha = 1 with beta != 0 has no theta form and throws.
ThetaForm to_theta_form(const StableParams& p);

/// Inverse of to_theta_form.
StableParams from_theta_form(const ThetaForm& t);

/// Truncation controls for power series and their integral-representation fallbacks.
struct SeriesControl {
    double abs_tol = 1e-15;
    int max_terms = 4000;
    double switch_radius = 5.0;
};

// ===========================================================================
// Gamma function
// ===========================================================================

/// log Gamma(z) on some branch; exp() of it is Gamma(z). Throws Pole at non-positive integers.
cplx log_gamma_complex(cplx z);

cplx gamma_complex(cplx z);

/// 1/Gamma(z), entire: zero at the poles of Gamma.
cplx rgamma_complex(cplx z);

/// 1/Gamma(x) for real x, zero at the poles.
double rgamma(double x);

/// log sin(pi z) on some branch, stable for large |Im z|.
cplx log_sin_pi(cplx z);

// ===========================================================================
// Mittag-Leffler and Wright functions
// ===========================================================================

/// E_{a,b}(z) = sum z^n / Gamma(a n + b).
cplx mittag_leffler(double a, double b, cplx z, const SeriesControl& ctl = {});

/// Wright M function M_nu(z), z >= 0.
double wright_m(double nu, double z, const SeriesControl& ctl = {});

/// log M_nu(z); finite far into the tail where M_nu underflows.
double log_wright_m(double nu, double z, const SeriesControl& ctl = {});

// ===========================================================================
// Stable Hamiltonians, densities and Laplace exponents
// ===========================================================================

/// i loc k - scale^alpha |k|^alpha (1 - i beta sign(k) omega), omega = tan(pi alpha/2) or (2/pi) ln|k| at alpha = 1.
cplx stable_hamiltonian(const StableParams& p, double k);

/// i xbar k - c |k|^alpha e^{i sign(k) theta pi/2}; throws ThetaOutsideDiamond when |theta| > min(alpha, 2 - alpha).
cplx stable_hamiltonian_theta(double alpha, double theta, double c, double xbar, double k);

/// Density of the stable law by oscillatory Fourier inversion.
/// Throws ToleranceNotReached when the panel error estimate exceeds abs_tol.
double stable_density(const StableParams& p, double x, double abs_tol = 1e-11);

/// Log of the two-sided Laplace image for beta = 1: -lam xbar - lam^alpha sigma^alpha sec(pi alpha/2).
cplx levy_laplace_exponent(double alpha, double sigma, double xbar, cplx lam);

}  // namespace fracprice
