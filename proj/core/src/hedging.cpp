#include "fracprice/hedging.hpp"

#include <cmath>

#include "fracprice/error.hpp"

namespace fracprice {

void HedgeInput::validate() const {
    if (!(S0 > 0.0) || !(K > 0.0) || !(tau > 0.0))
        throw Error(ErrorCode::InvalidArgument, "hedge needs positive S0, K, tau");
    if (spec) spec->validate();
    else if (!(bs_vol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "bs_vol must be non-negative");
}

namespace {

HedgeMoments lognormal_moments(const HedgeInput& inp) {
    HedgeMoments m;
    m.disc = std::exp(-inp.r * inp.tau);
    m.carry = std::exp(-(inp.r - inp.q) * inp.tau);
    const double F = inp.S0 / m.carry;
    const double K = inp.K;
    const double v = inp.bs_vol * inp.bs_vol * inp.tau;
    m.es = F;
    m.es2 = F * F * std::exp(v);
    if (v <= 0.0) {
        const double p = inp.side == OptionSide::Call ? std::max(F - K, 0.0) : std::max(K - F, 0.0);
        m.ep = p;
        m.ep2 = p * p;
        m.eps = p * F;
    } else {
        const double sv = std::sqrt(v);
        const double d1 = (std::log(F / K) + 0.5 * v) / sv;
        const double d2 = d1 - sv;
        const double d3 = d1 + sv;
        // E[S 1{S>K}], E[S^2 1{S>K}], P(S>K)
        const double s1 = F * norm_cdf(d1), s2 = m.es2 * norm_cdf(d3), s0 = norm_cdf(d2);
        if (inp.side == OptionSide::Call) {
            m.ep = s1 - K * s0;
            m.eps = s2 - K * s1;
            m.ep2 = s2 - 2.0 * K * s1 + K * K * s0;
        } else {
            const double l0 = 1.0 - s0, l1 = F - s1, l2 = m.es2 - s2;
            m.ep = K * l0 - l1;
            m.eps = K * l1 - l2;
            m.ep2 = K * K * l0 - 2.0 * K * l1 + l2;
        }
    }
    m.price = m.disc * m.ep;
    return m;
}

HedgeMoments model_moments(const HedgeInput& inp) {
    DfPricer pricer(*inp.spec, inp.S0, inp.r, inp.q, {inp.tau});
    const MaturitySlice& s = pricer.slice(inp.tau);
    HedgeMoments m;
    m.disc = s.discount();
    m.carry = std::exp(-(inp.r - inp.q) * inp.tau);
    m.es = s.spot_moment(1);
    m.es2 = s.spot_moment(2);
    const double c1 = s.call_expectation(inp.K);
    const double cs = s.call_times_spot(inp.K);
    const double c2 = s.call_squared(inp.K);
    if (inp.side == OptionSide::Call) {
        m.ep = c1;
        m.eps = cs;
        m.ep2 = c2;
    } else {
        // (K - S)^+ = (S - K)^+ - (S - K)
        const double K = inp.K;
        const double m0 = s.spot_moment(0);
        m.ep = c1 - m.es + K * m0;
        m.eps = cs - m.es2 + K * m.es;
        m.ep2 = c2 - 2.0 * (cs - K * c1) + m.es2 - 2.0 * K * m.es + K * K * m0;
    }
    m.price = m.disc * m.ep;
    return m;
}

}  // namespace

HedgeMoments hedge_moments(const HedgeInput& inp) {
    inp.validate();
    return inp.spec ? model_moments(inp) : lognormal_moments(inp);
}

double hedge_variance(const HedgeMoments& m, double S0) {
    const double b = m.carry;
    return b * b * m.es2 - 2.0 * b * S0 * m.es + S0 * S0;
}

double portfolio_risk(double phi, const HedgeMoments& m, double S0) {
    const double a = m.disc, b = m.carry, C = m.price;
    const double pp = a * a * m.ep2 - 2.0 * a * C * m.ep + C * C;
    const double pd = a * b * m.eps - a * S0 * m.ep - C * b * m.es + C * S0;
    const double dd = hedge_variance(m, S0);
    return std::max(pp - 2.0 * phi * pd + phi * phi * dd, 0.0);
}

double portfolio_risk(double phi, const HedgeInput& inp) {
    return portfolio_risk(phi, hedge_moments(inp), inp.S0);
}

double optimal_phi(const HedgeMoments& m, double S0) {
    const double a = m.disc, b = m.carry, C = m.price;
    const double dd = hedge_variance(m, S0);
    if (!(dd > 1e-14 * S0 * S0)) throw Error(ErrorCode::VanishingVariance, "terminal spot variance vanishes");
    const double pd = a * b * m.eps - a * S0 * m.ep - C * b * m.es + C * S0;
    return pd / dd;
}

double optimal_phi(const HedgeInput& inp) { return optimal_phi(hedge_moments(inp), inp.S0); }

double optimal_phi_literal(const HedgeInput& inp) {
    const HedgeMoments m = hedge_moments(inp);
    const double S0 = inp.S0;
    const double den = m.es2 - 2.0 * S0 * m.es + S0 * S0;
    if (!(den > 1e-14 * S0 * S0)) throw Error(ErrorCode::VanishingVariance, "terminal spot variance vanishes");
    return (m.eps - S0 * m.ep) / den;
}

}  // namespace fracprice
