#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "fracprice/green.hpp"

namespace fracprice {

enum class OptionSide { Call, Put };

const char* to_string(OptionSide s);

struct OptionQuote {
    OptionSide side = OptionSide::Call;
    double strike = 0.0;
    double maturity = 0.0;
    double mid = 0.0;
};

/// One trading day of an option chain.
struct MarketSnapshot {
    std::string date;
    double spot = 0.0;
    double rate = 0.0;
    double div_yield = 0.0;
    std::vector<OptionQuote> quotes;

    double forward(double tau) const { return spot * std::exp((rate - div_yield) * tau); }
};

struct PriceResult {
    double value = 0.0;
    double quadrature_error = 0.0;
    double drift_mu = 0.0;
    /// |numeric <e^y> / closed form - 1| for the slice used.
    double martingale_residual = 0.0;
    bool martingale_ok = true;
    bool formal_drift = false;
};

// ===========================================================================
// Black-Scholes
// ===========================================================================

double norm_cdf(double x);

PriceResult bs_price(double S, double K, double tau, double r, double q, double sigma_bs, OptionSide side);

/// Lognormal call delta e^{-q tau} N(d1).
double bs_delta(double S, double K, double tau, double r, double q, double sigma_bs);

// ===========================================================================
// Discretized terminal law
// ===========================================================================

/// Quadrature representation of the unit Green function G: Kronrod panels over the body,
/// log-spaced panels over the power-law negative tail and a point mass for the remainder.
/// Depends only on (alpha, gamma, kind); immutable once built.
class TerminalMeasure {
public:
    /// ell_max: largest exponential rate e^{ell x} the measure must resolve.
    TerminalMeasure(const DiffusionSpec& spec, double ell_max, const ContourConfig& cfg = {});

    const DiffusionSpec& spec() const { return spec_; }
    const GreenFunction& green() const { return green_; }

    struct Panel {
        double a, b;
        std::size_t first;  // index of the first node
        double error;       // |Kronrod - Gauss| estimate of the mass
    };

    const std::vector<double>& nodes() const { return x_; }
    /// Quadrature weight times G at each node.
    const std::vector<double>& weights() const { return wg_; }
    const std::vector<Panel>& panels() const { return panels_; }
    double far_mass() const { return far_mass_; }
    double far_point() const { return far_point_; }
    double ell_max() const { return ell_max_; }

    /// G at x inside panel p by barycentric interpolation of the panel nodes.
    double interpolate(std::size_t p, double x) const;

    /// Index of the panel containing x, or panels().size() when x is right of all panels.
    std::size_t locate(double x) const;

    /// Shared measure for the shape of spec covering ell_needed; reuses the calling thread's last build.
    static std::shared_ptr<const TerminalMeasure> shared(const DiffusionSpec& spec, double ell_needed);

    /// Sum of node masses plus the far mass.
    double total_mass() const;

private:
    void add_panel(double a, double b, double tol, int depth);

    DiffusionSpec spec_;
    GreenFunction green_;
    double ell_max_;
    std::vector<double> x_;
    std::vector<double> g_;
    std::vector<double> wg_;
    std::vector<Panel> panels_;
    double far_mass_ = 0.0;
    double far_point_ = 0.0;
    double noise_ = 0.0;
};

/// Terminal price distribution at one maturity: S_T = A e^{ell x}, A = F / <e^{ell x}>,
/// with suffix sums of 1, e^{ell x} and e^{2 ell x} for O(1) option moments.
class MaturitySlice {
public:
    /// spec carries sigma; m must share its (alpha, gamma, kind).
    MaturitySlice(std::shared_ptr<const TerminalMeasure> m, const DiffusionSpec& spec, double S, double tau, double r,
                  double q);

    double tau() const { return tau_; }
    double forward() const { return F_; }
    double level() const { return A_; }
    double ell() const { return ell_; }
    double drift() const { return mu_; }
    double discount() const { return std::exp(-r_ * tau_); }
    /// Numeric <e^{ell x}> over the closed form, minus one.
    double martingale_residual() const { return mart_res_; }

    /// E[(S_T - K)^+] (undiscounted).
    double call_expectation(double K) const;
    /// E[(K - S_T)^+] (undiscounted), integrated directly with the far-tail mass.
    double put_expectation(double K) const;
    /// E[(S_T - K)^+ S_T], E[((S_T - K)^+)^2].
    double call_times_spot(double K) const;
    double call_squared(double K) const;
    /// E[S_T], E[S_T^2] from the discrete measure.
    double spot_moment(int order) const;

    /// Error bound for call_expectation(K) from the panel estimates.
    double call_error(double K) const;

private:
    struct Partial {
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    };
    /// Moments of the measure restricted to x > xs; w(x) = 1, e^{ell x}, e^{2 ell x}.
    Partial right_of(double xs) const;

    std::shared_ptr<const TerminalMeasure> m_;
    double tau_, r_, q_, F_, A_, ell_, mu_, mart_res_;
    std::vector<double> u0_, u1_, u2_;
};

// ===========================================================================
// Double-fractional prices
// ===========================================================================

/// Pricer for a fixed model; slices are built per maturity and reused across strikes.
class DfPricer {
public:
    DfPricer(const DiffusionSpec& spec, double S, double r, double q, std::vector<double> maturities);

    const DiffusionSpec& spec() const { return spec_; }
    const MaturitySlice& slice(double tau) const;
    PriceResult price(OptionSide side, double K, double tau) const;

private:
    DiffusionSpec spec_;
    double S_, r_, q_;
    std::shared_ptr<const TerminalMeasure> measure_;
    std::vector<MaturitySlice> slices_;
};

PriceResult df_call_price(const DiffusionSpec& spec, double S, double K, double tau, double r, double q);

/// Put by put-call parity from df_call_price.
PriceResult df_put_price(const DiffusionSpec& spec, double S, double K, double tau, double r, double q);

/// Put from direct payoff integration, including the power-law tail mass.
PriceResult df_put_price_direct(const DiffusionSpec& spec, double S, double K, double tau, double r, double q);

/// e^{-(r-q) tau} E[S_T] / S - 1 from the discrete measure.
double martingale_check(const DiffusionSpec& spec, double tau);

}  // namespace fracprice
