#pragma once

#include <vector>

#include "fracprice/specfun.hpp"

namespace fracprice {

enum class DerivativeKind { Caputo, RieszFeller };

const char* to_string(DerivativeKind k);

/// Double-fractional model: space order alpha, time order gamma, volatility scale sigma.
struct DiffusionSpec {
    double alpha = 2.0;
    double gamma = 1.0;
    DerivativeKind kind = DerivativeKind::Caputo;
    double sigma = 1.0;

    /// 1 for Caputo, gamma for Riesz-Feller.
    double kappa() const;

    /// Throws InvalidArgument outside 1 < alpha <= 2, 0 < gamma < 2, sigma > 0, and gamma < alpha when gamma > 1.
    void validate() const;

    /// c = sigma^alpha |sec(pi alpha/2)|, i.e. minus the gamma = 1 drift.
    double scale_c() const;

    /// (c tau^gamma)^{1/alpha}: g(xi, tau) = G(xi/l)/l with G the unit Green function.
    double unit_length(double tau) const;

    /// gamma / alpha
    double scaling_exponent() const { return gamma / alpha; }
};

/// Vertical Mellin contour Re s = c, 0 < c < alpha, truncated at |Im s| = t_max.
struct ContourConfig {
    double c = 0.5;
    double t_max = 200.0;
    int n_nodes = 64;
};

/// Default contour with t_max stretched so the integrand decays below the noise floor as gamma/alpha nears 1.
ContourConfig contour_for(const DiffusionSpec& spec);

/// Unit-scale Green function of a model with contour weights precomputed once.
/// Immutable after construction and safe to share between threads.
class GreenFunction {
public:
    explicit GreenFunction(const DiffusionSpec& spec, const ContourConfig& cfg = {});

    const DiffusionSpec& spec() const { return spec_; }

    /// G(x) for any real x; near the origin a convergent power series replaces the contour.
    double unit(double x) const;

    /// Contour evaluation only; throws XiZero at x = 0.
    double unit_contour(double x) const;

    /// G(0) = Gamma(kappa) / (alpha Gamma(kappa - gamma/alpha)).
    double unit_origin() const;

    /// Leading terms of the power-law expansion for x -> -infinity.
    double unit_negative_tail(double x, int terms = 4) const;

    /// Coefficient of |x|^{-m alpha - 1} in the negative-tail expansion.
    double tail_coefficient(int m) const;

    /// g(xi, tau) = G(xi/l)/l.
    double operator()(double xi, double tau) const;

    /// Number of contour nodes kept per side (positive, negative).
    std::size_t node_count(bool negative) const { return negative ? w_neg_.size() : w_pos_.size(); }

private:
    double contour_sum(double x) const;
    double series(double x, bool& ok) const;

    DiffusionSpec spec_;
    ContourConfig cfg_;
    double c0_ = 0.0;
    double h_ = 0.0;
    double prefactor_ = 0.0;
    std::vector<cplx> w_pos_;
    std::vector<cplx> w_neg_;
};

/// Green function by the Mellin-Barnes contour. Throws XiZero at xi = 0, ContourTruncation
/// when the integrand is not negligible at t_max, PositivityViolation below -1e-9.
double green_mellin_barnes(const DiffusionSpec& spec, const ContourConfig& cfg, double xi, double tau);

/// Limit of the Green function at xi = 0.
double green_at_origin(const DiffusionSpec& spec, double tau);

/// gamma = 1 Green function by characteristic-function inversion.
double green_fourier(const DiffusionSpec& spec, double xi, double tau);

/// gamma = 1 Green function on a uniform grid through a single FFT of the characteristic function.
std::vector<double> green_fourier_batch(const DiffusionSpec& spec, double tau, const std::vector<double>& xs);

/// Normalized Riesz-Feller smearing kernel over pseudo-time l.
double smearing_kernel_rf(double gamma, double tau, double l);

/// Same kernel through the one-sided stable density (slower; used for cross-checks).
double smearing_kernel_rf_stable(double gamma, double tau, double l);

/// Caputo smearing kernel tau^{-gamma} M_gamma(l / tau^gamma).
double smearing_kernel_caputo(double gamma, double tau, double l);

/// Green function for gamma < 1 as a kernel-weighted superposition of gamma = 1 densities.
double green_via_kernel(const DiffusionSpec& spec, double xi, double tau);

/// tau^{-Omega} g(xi tau^{-Omega}, 1).
double diffusion_scaling(const DiffusionSpec& spec, double xi, double tau);

/// <e^{lambda y}> under g(., tau): Gamma(kappa) E_{gamma,kappa}(c lambda^alpha tau^gamma).
double exponential_moment(const DiffusionSpec& spec, double lambda, double tau);

/// Esscher drift mu(tau) = -ln<e^y>/tau; equals sigma^alpha sec(pi alpha/2) for gamma = 1.
double esscher_drift(const DiffusionSpec& spec, double tau = 1.0);

/// gamma > 1 drifts rest on the formally extended kernel composition.
inline bool drift_is_formal(const DiffusionSpec& spec) { return spec.gamma > 1.0; }

}  // namespace fracprice
