#pragma once

// Closed-form reference values and an independent finite-part integrator.
//
// The test family is f(x) = theta_m(x - t) u(x) with T-periodic u and
//   theta_m(y) = cos(pi y/T) / sin^m(pi y/T)   (m odd)
//   theta_m(y) = 1 / sin^m(pi y/T)             (m even),
// so g(x) = (x - t)^m theta_m(x - t) u(x) is smooth on [a, b]. For m = 3,
// T = 2 pi and the Poisson-kernel u the finite-part integral is known in
// closed form.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "hfpquad/error.hpp"
#include "hfpquad/integrand.hpp"
#include "hfpquad/series.hpp"

namespace hfpquad {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace detail {

inline void check_eta(double eta)
{
    if (!(std::abs(eta) < 1.0)) {
        throw error(errc::domain_error, "|eta| must be < 1 (got " + std::to_string(eta) + ")");
    }
}

// Eulerian polynomial coefficients A_k(q): (q d/dq)^k 1/(1-q) = q A_k(q)/(1-q)^{k+1}
inline std::vector<double> eulerian_row(int k)
{
    std::vector<double> row{1.0};
    for (int n = 2; n <= k; ++n) {
        std::vector<double> next(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            if (j < n - 1) {
                v += (j + 1) * row[static_cast<std::size_t>(j)];
            }
            if (j >= 1) {
                v += (n - j) * row[static_cast<std::size_t>(j - 1)];
            }
            next[static_cast<std::size_t>(j)] = v;
        }
        row = std::move(next);
    }
    return row;
}

} // namespace detail

/// Parameters of the closed-form m = 3 test case on a 2 pi period.
struct GeometricKernelCase {
    double eta = 0.5;
    double t = 1.0;

    static constexpr double period = two_pi;
    static constexpr int order = 3;
};

/// u(x) = sum_{k>=0} eta^k cos(kx) = (1 - eta cos x) / (1 - 2 eta cos x + eta^2).
inline double poisson_u(double eta, double x)
{
    detail::check_eta(eta);
    const double c = std::cos(x);
    return (1.0 - eta * c) / (1.0 - 2.0 * eta * c + eta * eta);
}

/// k-th derivative of poisson_u, from Re[i^k (q d/dq)^k 1/(1-q)] at q = eta e^{ix}.
inline double poisson_u_derivative(double eta, double x, int k)
{
    detail::check_eta(eta);
    if (k < 0) {
        throw error(errc::invalid_argument, "poisson_u_derivative: k must be >= 0");
    }
    const std::complex<double> q = eta * std::exp(std::complex<double>(0.0, x));
    if (k == 0) {
        return (1.0 / (1.0 - q)).real();
    }
    const auto row = detail::eulerian_row(k);
    std::complex<double> poly = 0.0;
    for (std::size_t j = row.size(); j-- > 0;) {
        poly = poly * q + row[j];
    }
    const std::complex<double> ik = std::pow(std::complex<double>(0.0, 1.0), k);
    return (ik * q * poly / std::pow(1.0 - q, k + 1)).real();
}

/// HFP int_0^{2pi} cos((x-t)/2)/sin^3((x-t)/2) u(x) dx for the Poisson u,
/// = 4 pi Im[q (1 + q) / (1 - q)^3], q = eta e^{it}.
inline double exact_supersingular(double eta, double t)
{
    detail::check_eta(eta);
    const std::complex<double> q = eta * std::exp(std::complex<double>(0.0, t));
    return 4.0 * std::numbers::pi * (q * (1.0 + q) / std::pow(1.0 - q, 3)).imag();
}

/// The same value from the truncated mode sum 4 pi sum_{k=1}^{terms} eta^k k^2 sin(kt).
inline double supersingular_series(double eta, double t, int terms)
{
    detail::check_eta(eta);
    // extended accumulation: the terms cancel for eta near 1
    long double acc = 0.0L;
    long double p = 1.0L;
    for (int k = 1; k <= terms; ++k) {
        p *= eta;
        acc += p * k * k * std::sin(static_cast<long double>(k) * t);
    }
    return static_cast<double>(4.0L * std::numbers::pi_v<long double> * acc);
}

/// HFP int_0^{2pi} cos((x-t)/2)/sin^3((x-t)/2) e^{i k x} dx = -sgn(k) i 4 pi k^2 e^{ikt}.
inline std::complex<double> fourier_mode_hfp(int mode, double t)
{
    if (mode == 0) {
        return {0.0, 0.0};
    }
    const double sgn = mode > 0 ? 1.0 : -1.0;
    const double k = mode;
    return -sgn * std::complex<double>(0.0, 4.0 * std::numbers::pi * k * k) *
           std::exp(std::complex<double>(0.0, k * t));
}

/// Finite part of int_a^b (x - t)^p dx for a < t < b.
inline double hfp_power_integral(int p, double a, double b, double t)
{
    if (!(a < t && t < b)) {
        throw error(errc::invalid_argument, "hfp_power_integral: requires a < t < b");
    }
    if (p == -1) {
        return std::log((b - t) / (t - a));
    }
    return (std::pow(b - t, p + 1) - std::pow(a - t, p + 1)) / (p + 1);
}

struct ReferenceOptions {
    int smoothing_order = 4; // K
    double tolerance = 1e-11;
    int max_panels = 4096;
};

/// HFP int_a^b g(x)/(x - t)^m dx by Taylor subtraction: the first m + K terms
/// of g about t are integrated in closed form and the remainder, which is
/// C^{K-1}, by composite 20-point Gauss-Legendre panels split at t with
/// doubling until successive values agree.
///
/// derivs holds g^{(i)}(t) for i = 0..D with D >= m + K - 1. Any orders past
/// m + K - 1 evaluate the remainder near t, where direct subtraction cancels.
inline double hfp_reference(const std::function<double(double)>& g,
                            const std::vector<double>& derivs, int m, double a, double b,
                            double t, const ReferenceOptions& opts = {})
{
    const int K = opts.smoothing_order;
    if (m < 1 || K < 2) {
        throw error(errc::invalid_argument, "hfp_reference: need m >= 1 and K >= 2");
    }
    if (!(a < t && t < b)) {
        throw error(errc::invalid_argument, "hfp_reference: requires a < t < b");
    }
    const int last = m + K - 1;
    if (static_cast<int>(derivs.size()) <= last) {
        throw error(errc::missing_derivatives,
                    "hfp_reference: needs g^(i)(t) for i <= " + std::to_string(last));
    }
    const int top = static_cast<int>(derivs.size()) - 1;
    std::vector<double> c(derivs.size());
    double fact = 1.0;
    for (int i = 0; i <= top; ++i) {
        if (i > 0) {
            fact *= i;
        }
        c[static_cast<std::size_t>(i)] = derivs[static_cast<std::size_t>(i)] / fact;
    }

    double closed = 0.0;
    for (int i = 0; i <= last; ++i) {
        closed += c[static_cast<std::size_t>(i)] * hfp_power_integral(i - m, a, b, t);
    }

    // switch radius: balance cancellation in the direct form against
    // truncation of the near-t series
    constexpr double u = std::numeric_limits<double>::epsilon() / 2.0;
    double radius = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 48; ++j) {
        const double d = (b - a) * std::ldexp(1.0, -j);
        double scale = 0.0;
        for (int i = 0; i <= last; ++i) {
            scale += std::abs(c[static_cast<std::size_t>(i)]) * std::pow(d, i);
        }
        // two trailing terms, so a vanishing last coefficient (even or odd g)
        // does not hide the truncation
        double tail = std::abs(c[static_cast<std::size_t>(top)]) * std::pow(d, top + 1 - m);
        if (top - 1 > last) {
            tail += std::abs(c[static_cast<std::size_t>(top - 1)]) * std::pow(d, top - m);
        }
        const double est = u * scale / std::pow(d, m) + tail;
        if (est < best) {
            best = est;
            radius = d;
        }
    }

    // the series is only trusted near t, whatever the coefficients say
    radius = std::min(radius, 0.25 * std::min(t - a, b - t));

    auto remainder = [&](double x) {
        const double y = x - t;
        if (std::abs(y) < radius) {
            double acc = 0.0;
            for (int i = top; i > last; --i) {
                acc = acc * y + c[static_cast<std::size_t>(i)];
            }
            return acc * std::pow(y, K);
        }
        double poly = 0.0;
        for (int i = last; i >= 0; --i) {
            poly = poly * y + c[static_cast<std::size_t>(i)];
        }
        double gx = 0.0;
        try {
            gx = g(x);
        } catch (const std::exception& e) {
            throw error(errc::evaluation_failed,
                        std::string("hfp_reference: evaluator failed: ") + e.what());
        }
        return (gx - poly) / std::pow(y, m);
    };

    auto panels = [&](double lo, double hi, int count) {
        const double w = (hi - lo) / count;
        double acc = 0.0;
        for (int p = 0; p < count; ++p) {
            acc += boost::math::quadrature::gauss<double, 20>::integrate(remainder, lo + p * w,
                                                                         lo + (p + 1) * w);
        }
        return acc;
    };

    double prev = panels(a, t, 1) + panels(t, b, 1);
    for (int count = 2; count <= opts.max_panels; count *= 2) {
        const double cur = panels(a, t, count) + panels(t, b, count);
        if (std::abs(cur - prev) <= opts.tolerance * std::max(1.0, std::abs(cur))) {
            return closed + cur;
        }
        prev = cur;
    }
    throw error(errc::reference_not_converged, "reference did not converge");
}

// ---------------------------------------------------------------------------
// theta_m test integrands

/// theta_m(y) on period T.
inline double theta_kernel(int m, double y, double T)
{
    const double z = std::numbers::pi * y / T;
    const double s = std::pow(std::sin(z), m);
    return (m % 2 == 1 ? std::cos(z) : 1.0) / s;
}

/// Taylor coefficients in y of psi_m(y) = y^m theta_m(y) through y^order.
inline series::coefficients theta_numerator_taylor(int m, double T, std::size_t order)
{
    const double c = std::numbers::pi / T;
    // y^m / sin^m(cy) = c^{-m} (sinc(cy))^{-m}
    auto base = series::power(series::reciprocal(series::sinc_scaled(c, order), order), m, order);
    const double scale = std::pow(1.0 / c, m);
    for (auto& v : base) {
        v *= scale;
    }
    if (m % 2 == 1) {
        base = series::multiply(base, series::cos_scaled(c, order), order);
    }
    return base;
}

/// psi_m(y) = y^m theta_m(y), smooth for |y| < T.
inline double theta_numerator(int m, double y, double T)
{
    const double z = std::numbers::pi * y / T;
    if (z == 0.0) {
        return std::pow(T / std::numbers::pi, m);
    }
    const double ratio = std::pow(y / std::sin(z), m);
    return (m % 2 == 1 ? std::cos(z) : 1.0) * ratio;
}

/// Real trigonometric polynomial sum_k a_k cos(kx) + b_k sin(kx), b_0 unused.
struct TrigPolynomial {
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;

    double derivative(double x, int order) const
    {
        double acc = 0.0;
        const std::size_t deg = std::max(cos_coeffs.size(), sin_coeffs.size());
        for (std::size_t k = 0; k < deg; ++k) {
            const double a = k < cos_coeffs.size() ? cos_coeffs[k] : 0.0;
            const double b = (k < sin_coeffs.size() && k > 0) ? sin_coeffs[k] : 0.0;
            const double kk = static_cast<double>(k);
            // d^p/dx^p cos(kx) = k^p cos(kx + p pi/2)
            const double phase = kk * x + order * std::numbers::pi / 2.0;
            const double kp = order == 0 ? 1.0 : std::pow(kk, order);
            acc += kp * (a * std::cos(phase) + b * std::sin(phase));
        }
        return acc;
    }

    double operator()(double x) const { return derivative(x, 0); }
};

/// A theta_m test integrand together with g^{(i)}(t) for i = 0..max_order.
struct ThetaIntegrand {
    PeriodicIntegrand integrand;
    std::vector<double> derivs;
};

/// f(x) = theta_m(x - t) u(x) on [a, b]; u_derivs_at_t[i] = u^{(i)}(t).
inline ThetaIntegrand make_theta_integrand(int m, double t, double a, double b,
                                           std::function<double(double)> u,
                                           const std::vector<double>& u_derivs_at_t)
{
    const double T = b - a;
    const std::size_t order = u_derivs_at_t.empty() ? 0 : u_derivs_at_t.size() - 1;
    series::coefficients u_taylor(order + 1);
    double fact = 1.0;
    for (std::size_t i = 0; i <= order; ++i) {
        if (i > 0) {
            fact *= static_cast<double>(i);
        }
        u_taylor[i] = u_derivs_at_t[i] / fact;
    }
    const auto g_taylor =
        series::multiply(theta_numerator_taylor(m, T, order), u_taylor, order);
    std::vector<double> derivs(order + 1);
    fact = 1.0;
    for (std::size_t i = 0; i <= order; ++i) {
        if (i > 0) {
            fact *= static_cast<double>(i);
        }
        derivs[i] = g_taylor[i] * fact;
    }
    auto g = [m, t, T, u = std::move(u)](double x) { return theta_numerator(m, x - t, T) * u(x); };
    return ThetaIntegrand{PeriodicIntegrand(m, t, a, b, g, derivs), derivs};
}

/// Fundamental interval of length 2 pi containing t in its interior:
/// [-pi, pi] when possible, otherwise [0, 2 pi] or a centered one.
inline std::pair<double, double> eta_family_interval(double t)
{
    constexpr double pi = std::numbers::pi;
    if (-pi < t && t < pi) {
        return {-pi, pi};
    }
    if (0.0 < t && t < two_pi) {
        return {0.0, two_pi};
    }
    return {t - pi, t + pi};
}

/// The closed-form m = 3 case as a rule-ready integrand, with g^{(i)}(t)
/// for i = 0..max_order.
inline ThetaIntegrand make_eta_integrand(const GeometricKernelCase& c, int max_order = 8)
{
    detail::check_eta(c.eta);
    const auto [a, b] = eta_family_interval(c.t);
    std::vector<double> ud;
    for (int i = 0; i <= max_order; ++i) {
        ud.push_back(poisson_u_derivative(c.eta, c.t, i));
    }
    const double eta = c.eta;
    return make_theta_integrand(3, c.t, a, b, [eta](double x) { return poisson_u(eta, x); }, ud);
}

} // namespace hfpquad
