#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fracprice/error.hpp"
#include "fracprice/green.hpp"
#include "fracprice/hedging.hpp"

using namespace fracprice;

namespace {

struct Brute {
    double price, phi;
};

// Cov(e^{-r tau} P, D) / Var(D) with S_T = F e^x / E[e^x]; Simpson panels over [cuts[i], cuts[i+1]]
// with the strike node inserted, density tabulated once.
Brute brute_hedge(const std::function<double(double)>& density, std::vector<double> cuts, int n_per_panel, double S0,
                  double K, double tau, double r, double q) {
    std::vector<double> xs, ws;
    auto build = [&](const std::vector<double>& c) {
        xs.clear();
        ws.clear();
        for (std::size_t p = 0; p + 1 < c.size(); ++p) {
            const double h = (c[p + 1] - c[p]) / n_per_panel;
            for (int i = 0; i <= n_per_panel; ++i) {
                xs.push_back(c[p] + i * h);
                ws.push_back((i == 0 || i == n_per_panel ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0);
            }
        }
    };
    build(cuts);
    std::vector<double> g(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) g[i] = density(xs[i]);
    double M = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) M += ws[i] * g[i] * std::exp(xs[i]);

    const double F = S0 * std::exp((r - q) * tau);
    const double xk = std::log(K * M / F);
    cuts.push_back(xk);
    std::sort(cuts.begin(), cuts.end());
    build(cuts);
    g.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) g[i] = density(xs[i]);

    double ep = 0, es = 0, eps = 0, es2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double st = F * std::exp(xs[i]) / M, w = ws[i] * g[i];
        const double pay = std::max(st - K, 0.0);
        ep += w * pay;
        es += w * st;
        eps += w * pay * st;
        es2 += w * st * st;
    }
    const double disc = std::exp(-r * tau), carry = std::exp(-(r - q) * tau);
    return {disc * ep, disc * carry * (eps - ep * es) / (carry * carry * (es2 - es * es))};
}

HedgeInput model_input(const DiffusionSpec& s, double K = 100.0) {
    HedgeInput in;
    in.spec = s;
    in.S0 = 100.0;
    in.K = K;
    in.tau = 0.5;
    in.r = 0.02;
    in.q = 0.01;
    return in;
}

HedgeInput lognormal_input(double vol, double K = 100.0) {
    HedgeInput in;
    in.bs_vol = vol;
    in.S0 = 100.0;
    in.K = K;
    in.tau = 0.5;
    in.r = 0.02;
    return in;
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(Hedging, LognormalClosedForm) {
    const double frozen = 0.584020976091874;
    const HedgeInput in = lognormal_input(0.2);
    EXPECT_NEAR(optimal_phi(in), frozen, 1e-12);

    const double sd = 0.2 * std::sqrt(in.tau);
    auto normal = [&](double x) {
        const double z = (x + 0.5 * sd * sd) / sd;
        return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
    };
    const Brute b = brute_hedge(normal, {-12 * sd, 12 * sd}, 200000, in.S0, in.K, in.tau, in.r, in.q);
    EXPECT_NEAR(optimal_phi(in), b.phi, 1e-9);
    EXPECT_NEAR(hedge_moments(in).price, b.price, 1e-8);
    EXPECT_NEAR(hedge_moments(in).price, bs_price(100, 100, 0.5, 0.02, 0.0, 0.2, OptionSide::Call).value, 1e-12);
}

TEST(Hedging, GaussianLimitOfModel) {
    const double vol = 0.2;
    const HedgeInput m = model_input({2.0, 1.0, DerivativeKind::Caputo, vol / std::sqrt(2.0)});
    HedgeInput l = m;
    l.spec.reset();
    l.bs_vol = vol;
    EXPECT_NEAR(optimal_phi(m), optimal_phi(l), 1e-7);
    EXPECT_NEAR(portfolio_risk(0.5, m), portfolio_risk(0.5, l), 1e-6);
}

TEST(Hedging, StableTerminalLawBruteForce) {
    const DiffusionSpec s{1.6, 1.0, DerivativeKind::Caputo, 0.15};
    const HedgeInput in = model_input(s);
    auto density = [&](double x) { return green_fourier(s, x, in.tau); };
    const Brute b = brute_hedge(density, {-30.0, -8.0, -2.0, -0.5, 0.5, 1.5}, 1600, in.S0, in.K, in.tau, in.r, in.q);
    EXPECT_NEAR(hedge_moments(in).price, b.price, 1e-5);
    EXPECT_NEAR(optimal_phi(in), b.phi, 1e-6);
}

TEST(Hedging, OptimumIsStationary) {
    for (const DiffusionSpec& s : {DiffusionSpec{1.6, 1.05, DerivativeKind::Caputo, 0.15},
                                   DiffusionSpec{1.8, 0.8, DerivativeKind::RieszFeller, 0.1}}) {
        const HedgeInput in = model_input(s, 105.0);
        const HedgeMoments m = hedge_moments(in);
        const double phi = optimal_phi(m, in.S0);
        const double h = 1e-3;
        const double slope = (portfolio_risk(phi + h, m, in.S0) - portfolio_risk(phi - h, m, in.S0)) / (2 * h);
        EXPECT_LE(std::abs(slope), 1e-6 * hedge_variance(m, in.S0));
        const double gs = golden_min([&](double p) { return portfolio_risk(p, m, in.S0); }, -1.0, 2.0);
        EXPECT_NEAR(gs, phi, 1e-5);
    }
}

TEST(Hedging, RiskIsExactlyQuadratic) {
    const HedgeInput in = model_input({1.6, 1.05, DerivativeKind::Caputo, 0.15});
    const HedgeMoments m = hedge_moments(in);
    const double phi = optimal_phi(m, in.S0), r0 = portfolio_risk(phi, m, in.S0), v = hedge_variance(m, in.S0);
    for (double p : {-0.5, 0.0, 0.3, 0.9, 1.7}) {
        const double expect = r0 + v * (p - phi) * (p - phi);
        EXPECT_NEAR(portfolio_risk(p, m, in.S0), expect, 1e-8 * std::max(1.0, expect)) << p;
    }
}

TEST(Hedging, PutHedgeDiffersByCarry) {
    for (bool model : {false, true}) {
        HedgeInput c = model ? model_input({1.7, 0.95, DerivativeKind::Caputo, 0.12}, 97.0) : lognormal_input(0.25, 97.0);
        c.q = 0.01;
        HedgeInput p = c;
        p.side = OptionSide::Put;
        EXPECT_NEAR(optimal_phi(p), optimal_phi(c) - std::exp(-c.q * c.tau), model ? 1e-7 : 1e-12);
    }
}

TEST(Hedging, StrikeLimitsAndMonotonicity) {
    const DiffusionSpec s{1.6, 1.05, DerivativeKind::Caputo, 0.15};
    const HedgeInput deep = model_input(s, 1e-3);
    EXPECT_NEAR(optimal_phi(deep), std::exp(-deep.q * deep.tau), 1e-6);
    EXPECT_NEAR(optimal_phi(model_input(s, 1e4)), 0.0, 1e-8);
    double prev = 2.0;
    for (double K = 60.0; K <= 160.0; K += 5.0) {
        const double phi = optimal_phi(model_input(s, K));
        EXPECT_LT(phi, prev) << K;
        prev = phi;
    }
}

TEST(Hedging, LiteralFormAgreesWithoutCarry) {
    HedgeInput in = model_input({1.6, 1.05, DerivativeKind::Caputo, 0.15}, 102.0);
    in.r = in.q = 0.0;
    EXPECT_NEAR(optimal_phi_literal(in), optimal_phi(in), 1e-9);
    in.r = 0.05;
    EXPECT_GT(std::abs(optimal_phi_literal(in) - optimal_phi(in)), 1e-4);
}

TEST(Hedging, VanishingVariance) {
    try {
        optimal_phi(lognormal_input(0.0));
        FAIL() << "expected VanishingVariance";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::VanishingVariance);
    }
    HedgeInput bad = lognormal_input(0.2);
    bad.S0 = -1.0;
    EXPECT_THROW(optimal_phi(bad), Error);
}
