#pragma once

#include <optional>

#include "fracprice/pricing.hpp"

namespace fracprice {

/// Single-period hedge of a short European option. Exactly one of spec / bs_vol drives the
/// terminal law: the double-fractional model when spec is set, else a lognormal with bs_vol.
struct HedgeInput {
    std::optional<DiffusionSpec> spec;
    double bs_vol = 0.0;
    double S0 = 100.0;
    double K = 100.0;
    double tau = 1.0;
    double r = 0.0;
    double q = 0.0;
    OptionSide side = OptionSide::Call;

    void validate() const;
};

/// Terminal moments of the hedge: payoff P, dividend-reinvested present value D = e^{-(r-q)tau} S_T.
struct HedgeMoments {
    double price = 0.0;  // C = e^{-r tau} E[P]
    double ep = 0.0, ep2 = 0.0, eps = 0.0;
    double es = 0.0, es2 = 0.0;
    double disc = 1.0, carry = 1.0;  // e^{-r tau}, e^{-(r-q) tau}
};

HedgeMoments hedge_moments(const HedgeInput& inp);

/// E[(e^{-r tau} P - C - phi (D - S0))^2], the variance of the hedged position in present value.
double portfolio_risk(double phi, const HedgeInput& inp);
double portfolio_risk(double phi, const HedgeMoments& m, double S0);

/// Stationary point of portfolio_risk: Cov(e^{-r tau} P, D) / Var(D).
double optimal_phi(const HedgeInput& inp);
double optimal_phi(const HedgeMoments& m, double S0);

/// Var(D), the curvature of portfolio_risk in phi.
double hedge_variance(const HedgeMoments& m, double S0);

/// Uncentred form <(S_T - S0) P> / <(S_T - S0)^2>, normalising by the raw second moment of the
/// spot move instead of the covariance structure.
double optimal_phi_literal(const HedgeInput& inp);

}  // namespace fracprice
