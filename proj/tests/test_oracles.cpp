#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hfpquad/oracles.hpp"
#include "test_support.hpp"

using namespace hfpquad;

namespace {

constexpr double pi = std::numbers::pi;

// sum_k eta^k k^p cos(kx + p pi/2): derivatives of the Poisson series,
// accumulated in long double since the terms reach ~1e7 for p = 10
double poisson_series_derivative(double eta, double x, int p)
{
    const long double lpi = std::numbers::pi_v<long double>;
    long double acc = p == 0 ? 1.0L : 0.0L;
    long double e = 1.0L;
    for (int k = 1; k < 400; ++k) {
        e *= eta;
        acc += e * std::pow(static_cast<long double>(k), p) *
               std::cos(static_cast<long double>(k) * x + p * lpi / 2.0L);
    }
    return static_cast<double>(acc);
}

} // namespace

TEST(PoissonU, PointValues)
{
    EXPECT_EQ(poisson_u(0.0, 1.234), 1.0);
    EXPECT_DOUBLE_EQ(poisson_u(0.5, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(poisson_u(0.5, pi), 2.0 / 3.0);
    EXPECT_THROW((void)poisson_u(1.0, 0.0), error);
    try {
        (void)poisson_u(-1.5, 0.0);
        FAIL() << "expected an exception";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::domain_error);
    }
}

TEST(PoissonU, DerivativesMatchModeSum)
{
    for (double eta : {0.1, 0.3, 0.5}) {
        for (double x : {-2.0, 0.0, 1.0, 2.5}) {
            for (int k = 0; k <= 10; ++k) {
                const double ref = poisson_series_derivative(eta, x, k);
                EXPECT_NEAR(poisson_u_derivative(eta, x, k), ref, 1e-11 * std::max(1.0, std::abs(ref)))
                    << "eta=" << eta << " x=" << x << " k=" << k;
            }
        }
    }
}

TEST(ExactSupersingular, TrivialCases)
{
    EXPECT_EQ(exact_supersingular(0.0, 1.0), 0.0);
    EXPECT_NEAR(exact_supersingular(0.4, 0.0), 0.0, 1e-15);
    EXPECT_THROW((void)exact_supersingular(1.0, 1.0), error);
}

TEST(ExactSupersingular, AgreesWithModeSeries)
{
    // mpmath nsum of 4 pi sum eta^k k^2 sin(k)
    EXPECT_NEAR(exact_supersingular(0.3, 1.0), 5.8019998701720564, 1e-14);
    EXPECT_NEAR(exact_supersingular(0.5, 1.0), 3.5184622427755930, 1e-14);
    for (double eta : {0.1, 0.3, 0.5, 0.7}) {
        // smallest M with 4 pi eta^{M+1} (M+1)^2 * 2 / (1 - eta) < 1e-16
        int M = 1;
        while (4.0 * pi * std::pow(eta, M + 1) * (M + 1) * (M + 1) * 2.0 / (1.0 - eta) >= 1e-16) {
            ++M;
        }
        for (double t : {0.0, 0.5, 1.0, 2.0, 3.0, 5.5}) {
            const double closed = exact_supersingular(eta, t);
            EXPECT_NEAR(closed, supersingular_series(eta, t, M), 1e-16 + 1e-14 * std::abs(closed))
                << "eta=" << eta << " t=" << t;
        }
    }
}

TEST(FourierModeHfp, DisplayedIdentity)
{
    EXPECT_EQ(fourier_mode_hfp(0, 0.7), std::complex<double>(0.0, 0.0));
    const auto m1 = fourier_mode_hfp(1, 0.0);
    EXPECT_NEAR(m1.real(), 0.0, 1e-15);
    EXPECT_NEAR(m1.imag(), -4.0 * pi, 1e-14);
    const auto m2 = fourier_mode_hfp(-2, 0.0);
    EXPECT_NEAR(m2.real(), 0.0, 1e-14);
    EXPECT_NEAR(m2.imag(), 16.0 * pi, 1e-13);
}

TEST(FourierModeHfp, PoissonDensityReproducesClosedForm)
{
    // u = 1/2 sum_k eta^|k| e^{ikx}
    const double eta = 0.3;
    const double t = 1.0;
    std::complex<double> acc = 0.0;
    for (int k = -80; k <= 80; ++k) {
        acc += 0.5 * std::pow(eta, std::abs(k)) * fourier_mode_hfp(k, t) * (k == 0 ? 2.0 : 1.0);
    }
    EXPECT_NEAR(acc.real(), exact_supersingular(eta, t), 1e-13);
    EXPECT_NEAR(acc.imag(), 0.0, 1e-13);
}

TEST(HfpPowerIntegral, ClosedForms)
{
    EXPECT_DOUBLE_EQ(hfp_power_integral(-3, 0.0, 2.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(hfp_power_integral(-1, 0.0, 3.0, 1.0), std::log(2.0));
    EXPECT_DOUBLE_EQ(hfp_power_integral(0, 0.0, 2.0, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(hfp_power_integral(-2, 0.0, 2.0, 1.0), -2.0);
    EXPECT_THROW((void)hfp_power_integral(-2, 0.0, 2.0, 2.0), error);
}

TEST(HfpReference, ElementaryCases)
{
    auto one = [](double) { return 1.0; };
    EXPECT_NEAR(hfp_reference(one, {1, 0, 0, 0, 0}, 1, 0.0, 3.0, 1.0), std::log(2.0), 1e-12);
    auto ident = [](double x) { return x; };
    EXPECT_NEAR(hfp_reference(ident, {1, 1, 0, 0, 0, 0}, 2, 0.0, 2.0, 1.0), -2.0, 1e-12);
    // g even about t, so g/(x - t)^3 is odd on an interval centred at t
    auto even = [](double x) { return std::cos(x - 0.5) + std::pow(x - 0.5, 2); };
    EXPECT_NEAR(hfp_reference(even, {1, 0, 1, 0, 1, 0, -1, 0, 1}, 3, -1.0, 2.0, 0.5), 0.0, 1e-11);
}

TEST(HfpReference, InsufficientDerivatives)
{
    auto one = [](double) { return 1.0; };
    try {
        (void)hfp_reference(one, {1, 0, 0}, 3, -1.0, 1.0, 0.0);
        FAIL() << "expected an exception";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::missing_derivatives);
    }
    EXPECT_THROW((void)hfp_reference(one, {1, 0, 0, 0, 0}, 1, -1.0, 1.0, 0.0, {1}), error);
}

TEST(HfpReference, NonConvergenceIsReported)
{
    // a jump in g keeps the panel sums from settling
    auto jump = [](double x) { return x < 0.3 ? 0.0 : 1.0; };
    ReferenceOptions opts;
    opts.tolerance = 1e-15;
    opts.max_panels = 8;
    try {
        (void)hfp_reference(jump, std::vector<double>(10, 0.0), 1, -1.0, 1.0, 0.0, opts);
        FAIL() << "expected an exception";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::reference_not_converged);
    }
}

TEST(HfpReference, SmoothingOrderIndependence)
{
    std::mt19937_64 rng(5);
    for (int m = 1; m <= 4; ++m) {
        const auto poly = test_support::random_trig_polynomial(rng);
        const auto c = test_support::user_integrand(m, 0.6, poly, m + 10);
        const auto& f = c.integrand;
        ReferenceOptions k4;
        ReferenceOptions k6;
        k6.smoothing_order = 6;
        const double a = hfp_reference(f.g(), c.derivs, m, f.lower(), f.upper(), 0.6, k4);
        const double b = hfp_reference(f.g(), c.derivs, m, f.lower(), f.upper(), 0.6, k6);
        EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a))) << "m=" << m;
    }
}

TEST(HfpReference, MatchesClosedFormFamily)
{
    for (double eta : {0.1, 0.3, 0.5}) {
        for (double t : {0.5, 1.0, 2.0}) {
            const auto c = make_eta_integrand({eta, t}, 12);
            const auto& f = c.integrand;
            const double ref = hfp_reference(f.g(), c.derivs, 3, f.lower(), f.upper(), t);
            EXPECT_NEAR(ref, exact_supersingular(eta, t), 1e-8) << "eta=" << eta << " t=" << t;
        }
    }
}

TEST(ThetaIntegrand, DerivativesAtSingularPoint)
{
    // g(t) = (T/pi)^3 u(t), g'(t) = (T/pi)^3 u'(t) for the m = 3 kernel
    const auto c = make_eta_integrand({0.4, 1.0}, 4);
    const double scale = 8.0;
    EXPECT_NEAR(c.derivs[0], scale * poisson_u(0.4, 1.0), 1e-13);
    EXPECT_NEAR(c.derivs[1], scale * poisson_u_derivative(0.4, 1.0, 1), 1e-13);
    const double h = 1e-3;
    const auto& g = c.integrand.g();
    const double fd2 = (g(1.0 + h) - 2.0 * g(1.0) + g(1.0 - h)) / (h * h);
    EXPECT_NEAR(c.derivs[2], fd2, 1e-4 * std::abs(fd2) + 1e-5);
}

TEST(ThetaKernel, RemovableLimit)
{
    EXPECT_DOUBLE_EQ(theta_numerator(3, 0.0, two_pi), 8.0);
    EXPECT_NEAR(theta_numerator(3, 1e-9, two_pi), 8.0, 1e-12);
    EXPECT_NEAR(theta_numerator(2, 1e-9, two_pi), 4.0, 1e-12);
    EXPECT_NEAR(theta_kernel(1, 1.0, two_pi), 1.0 / std::tan(0.5), 1e-14);
}
