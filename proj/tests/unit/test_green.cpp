#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracprice/error.hpp"
#include "fracprice/fracops.hpp"
#include "fracprice/green.hpp"

using namespace fracprice;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

const std::vector<double> kXi{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

double g_at(const DiffusionSpec& s, double xi, double tau) {
    return xi == 0.0 ? green_at_origin(s, tau) : green_mellin_barnes(s, ContourConfig{}, xi, tau);
}

// Integral of f over the real line in units of the unit length, split at fixed breakpoints.
template <class F>
double integrate_line(F&& f, double ell, double left, double right) {
    const double edges[] = {-1000, -300, -100, -30, -10, -3, -1, 0, 1, 3, 10, 30};
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(edges); ++i) {
        const double a = std::max(edges[i], left), b = std::min(edges[i + 1], right);
        if (b > a) s += GK::integrate([&](double u) { return f(u * ell) * ell; }, a, b, 8, 1e-11);
    }
    return s;
}

}  // namespace

TEST(Green, GaussianLimit) {
    const DiffusionSpec s{2.0, 1.0, DerivativeKind::Caputo, 1.0};
    EXPECT_NEAR(green_mellin_barnes(s, {}, 0.5, 1.0), std::exp(-0.25 / 4) / std::sqrt(4 * M_PI), 1e-10);
    EXPECT_NEAR(green_at_origin(s, 1.0), 0.28209479177387814, 1e-12);
    for (double xi = -5.0; xi <= 5.0; xi += 0.37) {
        if (std::abs(xi) < 1e-12) continue;
        EXPECT_NEAR(green_mellin_barnes(s, {}, xi, 1.0), std::exp(-xi * xi / 4) / std::sqrt(4 * M_PI), 1e-9) << xi;
    }
}

TEST(Green, XiZeroThrows) {
    try {
        green_mellin_barnes({1.6, 1.0, DerivativeKind::Caputo, 1.0}, {}, 0.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::XiZero);
    }
}

TEST(Green, ContourMatchesFourier) {
    for (double alpha : {1.5, 1.6, 1.8}) {
        const DiffusionSpec s{alpha, 1.0, DerivativeKind::Caputo, 1.0};
        for (double xi : kXi)
            EXPECT_NEAR(green_mellin_barnes(s, {}, xi, 1.0), green_fourier(s, xi, 1.0), 1e-8) << alpha << " " << xi;
    }
}

TEST(Green, FourierScaleMapping) {
    const DiffusionSpec s{1.5, 1.0, DerivativeKind::Caputo, 1.0};
    EXPECT_NEAR(green_fourier(s, 1.0, 2.0), stable_density({1.5, -1.0, 0.0, std::pow(2.0, 2.0 / 3.0)}, 1.0), 1e-12);
}

TEST(Green, FourierBatchMatchesPointwise) {
    const DiffusionSpec s{1.6, 1.0, DerivativeKind::Caputo, 0.8};
    std::vector<double> xs;
    for (int i = 0; i <= 200; ++i) xs.push_back(-10.0 + 0.1 * i);
    const auto b = green_fourier_batch(s, 1.0, xs);
    for (std::size_t i = 0; i < xs.size(); i += 17) EXPECT_NEAR(b[i], green_fourier(s, xs[i], 1.0), 1e-6) << xs[i];
}

TEST(Green, ContourMatchesKernelComposition) {
    for (double gamma : {0.8, 0.9})
        for (auto kind : {DerivativeKind::Caputo, DerivativeKind::RieszFeller}) {
            const DiffusionSpec s{1.8, gamma, kind, 1.0};
            for (double xi : kXi)
                EXPECT_NEAR(green_mellin_barnes(s, {}, xi, 1.0), green_via_kernel(s, xi, 1.0), 1e-6)
                    << gamma << " " << to_string(kind) << " " << xi;
        }
}

TEST(Green, KernelCompositionIsContinuousAtGammaOne) {
    const DiffusionSpec near{1.6, 0.999, DerivativeKind::Caputo, 1.0};
    const DiffusionSpec one{1.6, 1.0, DerivativeKind::Caputo, 1.0};
    for (double xi : {-1.0, 0.5, 1.5}) EXPECT_NEAR(green_via_kernel(near, xi, 1.0), green_fourier(one, xi, 1.0), 1e-3);
}

TEST(Green, NormalizationAndPositivity) {
    const std::vector<DiffusionSpec> specs{
        {1.3, 1.0, DerivativeKind::Caputo, 1.0}, {1.6, 0.7, DerivativeKind::Caputo, 0.5},
        {1.8, 0.9, DerivativeKind::RieszFeller, 1.0}, {1.6, 1.2, DerivativeKind::Caputo, 1.0}};
    for (const auto& s : specs) {
        const double ell = s.unit_length(1.0);
        auto g = [&](double xi) { return g_at(s, xi, 1.0); };
        double mass = integrate_line(g, ell, -1000.0, 30.0);
        const GreenFunction gf(s);
        // remaining tail by its leading power law
        mass += gf.tail_coefficient(1) / s.alpha * std::pow(1000.0, -s.alpha);
        EXPECT_NEAR(mass, 1.0, 1e-5) << s.alpha << " " << s.gamma;
        for (double u = -40.0; u <= 12.0; u += 0.13) EXPECT_GE(g(u * ell), -1e-9);
    }
}

TEST(Green, ScalingLaw) {
    const DiffusionSpec s{1.6, 1.1, DerivativeKind::Caputo, 1.0};
    EXPECT_DOUBLE_EQ(s.scaling_exponent(), 1.1 / 1.6);
    EXPECT_DOUBLE_EQ(DiffusionSpec{}.scaling_exponent(), 0.5);
    for (double xi : {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
        const double direct = g_at(s, xi, 4.0);
        EXPECT_NEAR(diffusion_scaling(s, xi, 4.0) / direct, 1.0, 1e-6) << xi;
        EXPECT_NEAR(diffusion_scaling(s, xi, 1.0) / g_at(s, xi, 1.0), 1.0, 1e-14);
    }
}

TEST(Green, PdeResidualAtGammaOne) {
    const DiffusionSpec s{1.7, 1.0, DerivativeKind::Caputo, 1.0};
    const auto xs = uniform_grid(-400.0, 400.0, 1 << 16);
    const double tau = 1.0, dt = 1e-3;
    const auto g = green_fourier_batch(s, tau, xs);
    const auto gp = green_fourier_batch(s, tau + dt, xs);
    const auto gm = green_fourier_batch(s, tau - dt, xs);
    GridFunction f{xs, g};
    const GridFunction rf = riesz_feller_apply(f, s.alpha, s.alpha - 2.0);
    const double c = s.scale_c();
    const std::size_t mid = xs.size() / 2;
    for (std::size_t i = mid - 400; i <= mid + 400; i += 80) {
        const double dg = (gp[i] - gm[i]) / (2.0 * dt);
        EXPECT_NEAR(dg, c * rf.ys[i], 1e-3) << xs[i];
    }
}

TEST(Green, FastDiffusionHasOffCentreMaximum) {
    const DiffusionSpec s{1.6, 1.1, DerivativeKind::Caputo, 1.0};
    const double ell = s.unit_length(5.0);
    std::vector<double> v;
    for (int i = 1; i <= 400; ++i) v.push_back(g_at(s, 0.01 * i * ell, 5.0));
    bool found = false;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) found = true;
    EXPECT_TRUE(found);
}

TEST(Green, PositivityRequiresGammaBelowAlpha) {
    EXPECT_THROW((DiffusionSpec{1.3, 1.5, DerivativeKind::Caputo, 1.0}.validate()), Error);
    EXPECT_NO_THROW((DiffusionSpec{1.6, 1.5, DerivativeKind::Caputo, 1.0}.validate()));
}

TEST(Green, ContourTruncationNearUnitRatio) {
    const DiffusionSpec s{1.5, 1.4, DerivativeKind::Caputo, 1.0};
    try {
        GreenFunction g(s);
        FAIL() << "expected ContourTruncation";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ContourTruncation);
    }
    EXPECT_GT(contour_for(s).t_max, 200.0);
    const DiffusionSpec levy{1.08, 1.0, DerivativeKind::Caputo, 1.0};
    EXPECT_THROW(GreenFunction{levy}, Error);
    const ContourConfig cfg = contour_for(levy);
    for (double x : {-3.0, -1.0, 0.7, 2.0})
        EXPECT_NEAR(green_mellin_barnes(levy, cfg, x, 1.0), green_fourier(levy, x, 1.0), 1e-8) << x;
    EXPECT_EQ(contour_for({1.6, 1.05, DerivativeKind::Caputo, 0.15}).t_max, 200.0);
}

TEST(Esscher, ClosedForms) {
    EXPECT_NEAR(esscher_drift({2.0, 1.0, DerivativeKind::Caputo, 1.0}), -1.0, 1e-15);
    EXPECT_NEAR(esscher_drift({1.5, 1.0, DerivativeKind::Caputo, 1.0}), -std::sqrt(2.0), 1e-14);
}

TEST(Esscher, KernelFormMatchesBruteForceExpectation) {
    const DiffusionSpec s{1.7, 0.9, DerivativeKind::Caputo, 0.2};
    EXPECT_NEAR(s.scale_c(), 0.0727562168265398294, 1e-15);
    const double mu = esscher_drift(s, 1.0);
    EXPECT_NEAR(mu, -0.0759424883277241021, 1e-12);
    const double ell = s.unit_length(1.0);
    const double m = integrate_line([&](double xi) { return std::exp(xi) * g_at(s, xi, 1.0); }, ell, -1000.0, 30.0);
    EXPECT_NEAR(-std::log(m), mu, 1e-5);
}

TEST(Esscher, ExponentialMomentGammaOne) {
    const DiffusionSpec s{1.6, 1.0, DerivativeKind::Caputo, 0.3};
    EXPECT_NEAR(std::log(exponential_moment(s, 1.0, 2.0)), -2.0 * esscher_drift(s), 1e-13);
}

TEST(Kernels, Normalization) {
    for (double gamma : {0.6, 0.8, 0.95}) {
        double rf = 0.0, cap = 0.0;
        for (double a = 0.0, b = 0.25; a < 60.0; a = b, b *= 2.0) {
            rf += GK::integrate([&](double l) { return smearing_kernel_rf(gamma, 1.0, l); }, a, b, 10, 1e-12);
            cap += GK::integrate([&](double l) { return smearing_kernel_caputo(gamma, 1.0, l); }, a, b, 10, 1e-12);
        }
        EXPECT_NEAR(rf, 1.0, 1e-5) << gamma;
        EXPECT_NEAR(cap, 1.0, 1e-5) << gamma;
    }
}

TEST(Kernels, CaputoAtOrigin) {
    EXPECT_NEAR(smearing_kernel_caputo(0.5, 1.0, 0.0), 1.0 / std::sqrt(M_PI), 1e-14);
    EXPECT_NEAR(smearing_kernel_caputo(0.7, 1.0, 0.0), 1.0 / std::tgamma(0.3), 1e-14);
}

TEST(Kernels, WrightStableBridge) {
    // one-sided stable density with Laplace image exp(-s^{1/2}) against (nu c / x^{nu+1}) M_nu(c / x^nu)
    const StableParams p{0.5, 1.0, 0.0, std::pow(std::cos(M_PI / 4), 2.0)};
    for (double x : {0.5, 1.0, 2.0}) {
        const double lhs = stable_density(p, x, 1e-13);
        const double rhs = 0.5 / std::pow(x, 1.5) * wright_m(0.5, 1.0 / std::sqrt(x));
        EXPECT_NEAR(lhs, rhs, 1e-6) << x;
        EXPECT_NEAR(rhs, std::exp(-1.0 / (4.0 * x)) / (2.0 * std::sqrt(M_PI) * std::pow(x, 1.5)), 1e-14);
    }
}

TEST(Kernels, RieszFellerRoutesAgree) {
    for (double gamma : {0.6, 0.8})
        for (double l : {0.05, 0.4, 1.0, 2.5})
            EXPECT_NEAR(smearing_kernel_rf(gamma, 1.3, l), smearing_kernel_rf_stable(gamma, 1.3, l), 1e-7)
                << gamma << " " << l;
}

TEST(Kernels, RieszFellerSmallPseudoTime) {
    const double frozen[] = {0.402818341810537452, 0.202878562070397384};
    const double gammas[] = {0.6, 0.8};
    for (int i = 0; i < 2; ++i) {
        const double g = gammas[i];
        EXPECT_NEAR(std::tgamma(g + 1.0) / std::tgamma(1.0 - g), frozen[i], 1e-14);
        EXPECT_NEAR(smearing_kernel_rf(g, 1.0, 1e-6) / 1e-6 / frozen[i], 1.0, 1e-4) << g;
    }
}

TEST(Kernels, StretchedExponentialDecay) {
    for (double g : {0.5, 0.6, 0.8}) {
        // least-squares slope of log(-log K) against log l where the exponential dominates
        const double l1 = std::pow(1000.0, 1.0 - g);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = 9;
        for (int i = 0; i < n; ++i) {
            const double l = l1 * std::pow(4.0, i / (n - 1.0));
            const double x = std::log(l), y = std::log(-log_wright_m(g, l));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        EXPECT_NEAR(slope * (1.0 - g), 1.0, 0.05) << g;
    }
}

TEST(Kernels, GammaOutOfRange) {
    try {
        smearing_kernel_rf(1.0, 1.0, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GammaOutOfRange);
    }
    EXPECT_THROW(green_via_kernel({1.6, 1.1, DerivativeKind::Caputo, 1.0}, 0.5, 1.0), Error);
}
