#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracprice/error.hpp"
#include "fracprice/specfun.hpp"

using namespace fracprice;

namespace {

// Gamma by upward recurrence plus a Stirling series; independent of the Lanczos coefficients.
cplx stirling_gamma(cplx z) {
    const int shift = 40;
    cplx prod = 1.0;
    for (int k = 0; k < shift; ++k) prod *= z + static_cast<double>(k);
    const cplx w = z + static_cast<double>(shift);
    static const double b[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360, 1.0 / 156};
    cplx s = 0.0, wp = w;
    for (double c : b) {
        s += c / wp;
        wp *= w * w;
    }
    const cplx lg = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * M_PI) + s;
    return std::exp(lg) / prod;
}

long double ml_series_oracle(long double a, long double b, long double z, int terms) {
    long double s = 0.0L;
    for (int n = 0; n < terms; ++n) {
        const long double t = std::pow(z, n) / std::tgamma(a * n + b);
        if (!std::isfinite(t)) break;
        s += t;
    }
    return s;
}

double trapezoid_inversion(double alpha, double beta, double x, int n, double kmax) {
    const double h = kmax / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double k = i * h;
        const cplx ph = std::exp(-std::pow(k, alpha) * cplx(1.0, -beta * std::tan(M_PI * alpha / 2)) - cplx(0.0, k * x));
        s += (i == 0 || i == n ? 0.5 : 1.0) * ph.real();
    }
    return s * h / M_PI;
}

}  // namespace

TEST(Gamma, Identities) {
    EXPECT_NEAR(std::abs(gamma_complex(1.0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(gamma_complex(0.5).real(), std::sqrt(M_PI), 1e-13);
    EXPECT_NEAR(gamma_complex(5.0).real(), 24.0, 1e-11);
}

TEST(Gamma, ComplexArgumentAgainstStirlingOracle) {
    const cplx frozen(0.00116464368481149052, 0.00335255988803520251);
    const cplx z(0.3, 4.0);
    EXPECT_LT(std::abs(stirling_gamma(z) / frozen - 1.0), 1e-12);
    EXPECT_LT(std::abs(gamma_complex(z) / frozen - 1.0), 1e-12);
    for (cplx w : {cplx(-3.7, 2.0), cplx(2.5, -17.0), cplx(0.7, 60.0), cplx(-0.4, 150.0)})
        EXPECT_LT(std::abs(gamma_complex(w) / stirling_gamma(w) - 1.0), 1e-11) << w;
}

TEST(Gamma, PolesThrow) {
    EXPECT_THROW(gamma_complex(0.0), Error);
    EXPECT_THROW(gamma_complex(-3.0), Error);
    EXPECT_EQ(rgamma(-2.0), 0.0);
    EXPECT_EQ(std::abs(rgamma_complex(-4.0)), 0.0);
}

TEST(MittagLeffler, ClosedForms) {
    EXPECT_NEAR(mittag_leffler(1.0, 1.0, 1.0).real(), M_E, 1e-13);
    EXPECT_NEAR(mittag_leffler(2.0, 1.0, -1.0).real(), std::cos(1.0), 1e-13);
    EXPECT_NEAR(mittag_leffler(1.0, 1.0, -12.0).real(), std::exp(-12.0), 1e-13);
}

TEST(MittagLeffler, BruteForceSeries) {
    const double frozen = 0.603405498695860968;
    const long double oracle = ml_series_oracle(0.9L, 1.0L, -0.5L, 10000);
    EXPECT_NEAR(static_cast<double>(oracle), frozen, 1e-15);
    EXPECT_NEAR(mittag_leffler(0.9, 1.0, -0.5).real(), frozen, 1e-14);
}

TEST(MittagLeffler, SeriesAndContourAgreeAcrossSwitch) {
    SeriesControl series_only;
    series_only.switch_radius = 1e9;
    SeriesControl contour_first;
    contour_first.switch_radius = 0.5;
    for (double a : {0.6, 0.9, 1.3})
        for (double r : {2.5, 3.0, 3.5})
            for (double phase : {M_PI, 0.8 * M_PI, -0.9 * M_PI}) {
                const cplx z = std::polar(r, phase);
                const cplx s = mittag_leffler(a, 1.0, z, series_only);
                const cplx c = mittag_leffler(a, 1.0, z, contour_first);
                EXPECT_LT(std::abs(s - c), 1e-8) << "a=" << a << " z=" << z;
            }
}

TEST(WrightM, OriginAndGaussianReduction) {
    EXPECT_NEAR(wright_m(0.5, 0.0), 1.0 / std::sqrt(M_PI), 1e-14);
    EXPECT_NEAR(wright_m(0.3, 0.0), 1.0 / std::tgamma(0.7), 1e-14);
    for (double z : {0.5, 1.0, 2.9, 3.1, 6.0})
        EXPECT_NEAR(wright_m(0.5, z), std::exp(-z * z / 4) / std::sqrt(M_PI), 1e-13) << z;
}

TEST(WrightM, IsADensity) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double mass = GK::integrate([](double u) { return wright_m(0.6, u); }, 0.0, 40.0, 15, 1e-12);
    EXPECT_NEAR(mass, 1.0, 1e-6);
    for (double z = 0.0; z < 20.0; z += 0.25) EXPECT_GE(wright_m(0.6, z), 0.0);
}

TEST(StableHamiltonian, Examples) {
    EXPECT_EQ(std::abs(stable_hamiltonian({1.5, -1.0, 0.0, 1.0}, 0.0)), 0.0);
    for (double beta : {-1.0, 0.0, 0.7})
        for (double k : {-2.0, 0.3, 1.7}) {
            const cplx h = stable_hamiltonian({2.0, beta, 0.0, 1.0}, k);
            EXPECT_NEAR(h.real(), -k * k, 1e-13);
            EXPECT_NEAR(h.imag(), 0.0, 1e-13);
        }
    const cplx h = stable_hamiltonian({1.5, -1.0, 0.0, 1.0}, 1.0);
    EXPECT_NEAR(h.real(), -1.0, 1e-14);
    EXPECT_NEAR(h.imag(), 1.0, 1e-14);
}

TEST(StableHamiltonian, ThetaFormMatchesNumerically) {
    EXPECT_NEAR(stable_hamiltonian_theta(1.3, 0.0, 2.0, 0.0, 1.5).real(), -2.0 * std::pow(1.5, 1.3), 1e-13);
    EXPECT_NEAR(stable_hamiltonian_theta(2.0, 0.0, 1.0, 0.0, 3.0).real(), -9.0, 1e-13);
    for (double alpha : {1.2, 1.5, 1.8})
        for (double beta : {-1.0, 1.0}) {
            const StableParams p{alpha, beta, 0.0, 1.0};
            // match (c, theta) from the value at k = 1 alone
            const cplx h1 = stable_hamiltonian(p, 1.0);
            const double c = std::abs(h1);
            const double theta = std::arg(-h1) * 2.0 / M_PI;
            EXPECT_NEAR(theta, beta > 0 ? 2.0 - alpha : alpha - 2.0, 1e-12);
            for (double k = -4.0; k <= 4.0; k += 0.37)
                EXPECT_LT(std::abs(stable_hamiltonian_theta(alpha, theta, c, 0.0, k) - stable_hamiltonian(p, k)), 1e-10);
            const ThetaForm t = to_theta_form(p);
            EXPECT_NEAR(t.theta, theta, 1e-12);
            EXPECT_NEAR(t.c, c, 1e-12);
        }
    EXPECT_THROW(stable_hamiltonian_theta(1.5, 0.6, 1.0, 0.0, 1.0), Error);
}

TEST(StableDensity, ClosedForms) {
    EXPECT_NEAR(stable_density({2.0, 0.0, 0.0, 1.0}, 0.0), 1.0 / std::sqrt(4.0 * M_PI), 1e-10);
    EXPECT_NEAR(stable_density({2.0, 0.0, 0.0, 1.0}, 1.3), std::exp(-1.69 / 4) / std::sqrt(4.0 * M_PI), 1e-10);
    EXPECT_NEAR(stable_density({1.0, 0.0, 0.0, 1.0}, 0.0), 1.0 / M_PI, 1e-10);
    EXPECT_NEAR(stable_density({1.0, 0.0, 0.0, 1.0}, 2.0), 1.0 / (M_PI * 5.0), 1e-10);
}

TEST(StableDensity, BruteForceInversion) {
    const double frozen = 0.246515640532722451;
    const double oracle = trapezoid_inversion(1.5, -1.0, 0.5, 1000000, 60.0);
    EXPECT_NEAR(oracle, frozen, 1e-9);
    EXPECT_NEAR(stable_density({1.5, -1.0, 0.0, 1.0}, 0.5), frozen, 1e-10);
}

TEST(StableDensity, Reflection) {
    for (double alpha : {1.2, 1.5, 1.8})
        for (double beta : {-1.0, -0.4, 0.6})
            for (double x : {-3.0, -0.7, 0.2, 1.9})
                EXPECT_NEAR(stable_density({alpha, beta, 0.0, 1.0}, x), stable_density({alpha, -beta, 0.0, 1.0}, -x),
                            1e-8);
}

TEST(StableDensity, Normalization) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    for (double alpha : {1.2, 1.5, 1.8, 2.0})
        for (double beta : {-1.0, 0.0, 1.0}) {
            const StableParams p{alpha, beta, 0.0, 1.0};
            auto f = [&](double x) { return stable_density(p, x, 1e-10); };
            double mass = 0.0;
            const double edges[] = {-200, -60, -20, -8, -3, 0, 3, 8, 20, 60, 200};
            for (int i = 0; i + 1 < 11; ++i) mass += GK::integrate(f, edges[i], edges[i + 1], 6, 1e-9);
            // survival beyond |x| = 200 from the standard tail constant
            const double tail = std::tgamma(alpha) * std::sin(M_PI * alpha / 2) / M_PI * std::pow(200.0, -alpha);
            if (alpha < 2.0) mass += 2.0 * tail;
            EXPECT_NEAR(mass, 1.0, 1e-4) << alpha << " " << beta;
        }
}

TEST(StableDensity, TailExponent) {
    for (double alpha : {1.2, 1.5, 1.8}) {
        const StableParams p{alpha, 0.0, 0.0, 1.0};
        const double slope = std::log(stable_density(p, 400.0) / stable_density(p, 200.0)) / std::log(2.0);
        EXPECT_NEAR(slope, -(alpha + 1.0), 0.05) << alpha;
    }
}

TEST(LevyLaplace, Examples) {
    EXPECT_EQ(std::abs(levy_laplace_exponent(1.5, 1.0, 0.0, 0.0)), 0.0);
    EXPECT_NEAR(levy_laplace_exponent(1.5, 1.0, 0.0, 1.0).real(), std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(levy_laplace_exponent(2.0, 1.0, 0.0, 1.0).real(), 1.0, 1e-13);
    EXPECT_THROW(levy_laplace_exponent(1.0, 1.0, 0.0, 1.0), Error);
}
