#pragma once

// Collocation solvers for periodic supersingular integral equations
//
//   lambda phi(t) + HFP int_a^b K(t, x) phi(x) dx = w(t),
//   K(t, x) = U(t, x) / (x - t)^3.
//
// "simple": T^(2)_{3,n} at every point of a 4n grid; only kernel values are
// needed. "advanced": T^(0)_{3,n} on an n grid with the derivatives of phi
// at the collocation point replaced by derivatives of its trigonometric
// interpolant.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hfpquad/error.hpp"
#include "hfpquad/integrand.hpp"
#include "hfpquad/quadrature.hpp"
#include "hfpquad/series.hpp"

namespace hfpquad {

/// K(t, x) = U(t, x) / (x - t)^3, T-periodic in both arguments.
///
/// The solvers call U(t, x) with x - t in [-T/2, T/2), i.e. on the band
/// around the diagonal rather than on [a, b]^2; U must be smooth there.
/// diagonal[k](t) = d^k U / dx^k at x = t, needed only by the advanced
/// approach.
struct PeriodicKernel {
    double a = 0.0;
    double b = 2.0 * std::numbers::pi;
    std::function<double(double, double)> U;
    std::optional<std::array<std::function<double(double)>, 4>> diagonal;

    double period() const noexcept { return b - a; }

    /// K(t, t + d) for d != 0 mod T, d taken as given.
    double at_offset(double t, double d) const
    {
        double v = 0.0;
        try {
            v = U(t, t + d);
        } catch (const std::exception& e) {
            throw error(errc::evaluation_failed,
                        std::string("kernel evaluation failed: ") + e.what());
        }
        if (!std::isfinite(v)) {
            throw error(errc::evaluation_failed, "kernel returned a non-finite value");
        }
        return v / (d * d * d);
    }
};

enum class approach { simple, advanced };

struct CollocationSystem {
    approach method = approach::simple;
    double lambda = 1.0;
    std::vector<double> grid;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

struct CollocationSolution {
    std::vector<double> grid;
    std::vector<double> phi;
    double residual_max = 0.0;
    double condition_estimate = 0.0;
};

/// Weight pattern of T^(2)_{3,n} on the 4n grid:
/// 8 if |i-j-2| = 0 mod 4, -2 if |i-j-1| = 0 mod 2, else 0.
inline int epsilon_weight(std::int64_t i, std::int64_t j) noexcept
{
    const std::int64_t d = i - j;
    if ((d - 2) % 4 == 0) {
        return 8;
    }
    if ((d - 1) % 2 == 0) {
        return -2;
    }
    return 0;
}

namespace detail {

// representative of k mod N in [-N/2, N/2)
inline std::int64_t centered(std::int64_t k, std::int64_t N) noexcept
{
    std::int64_t r = k % N;
    if (r < 0) {
        r += N;
    }
    if (2 * r >= N) {
        r -= N;
    }
    return r;
}

inline double eval_checked(const std::function<double(double)>& fn, double x, const char* what)
{
    double v = 0.0;
    try {
        v = fn(x);
    } catch (const std::exception& e) {
        throw error(errc::evaluation_failed, std::string(what) + " failed: " + e.what());
    }
    if (!std::isfinite(v)) {
        throw error(errc::evaluation_failed, std::string(what) + " returned a non-finite value");
    }
    return v;
}

} // namespace detail

/// Row i of the simple system (without lambda) uses K(x_i, x_i + k hhat),
/// k the centered offset of j - i. x_j = a + j hhat for j = 1..4n.
inline CollocationSystem build_simple_system(const PeriodicKernel& kernel,
                                             const std::function<double(double)>& w,
                                             double lambda, int n)
{
    if (n < 2) {
        throw error(errc::invalid_argument, "build_simple_system: n must be >= 2");
    }
    const std::int64_t N = 4 * static_cast<std::int64_t>(n);
    const double T = kernel.period();
    const double hhat = T / static_cast<double>(N);

    CollocationSystem sys;
    sys.method = approach::simple;
    sys.lambda = lambda;
    sys.grid.resize(static_cast<std::size_t>(N));
    sys.matrix = Eigen::MatrixXd::Zero(N, N);
    sys.rhs.resize(N);
    for (std::int64_t i = 1; i <= N; ++i) {
        sys.grid[static_cast<std::size_t>(i - 1)] = kernel.a + static_cast<double>(i) * hhat;
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        const double xi = sys.grid[static_cast<std::size_t>(i - 1)];
        for (std::int64_t j = 1; j <= N; ++j) {
            const int eps = epsilon_weight(i, j);
            double entry = (i == j) ? lambda : 0.0;
            if (eps != 0) {
                const std::int64_t k = detail::centered(j - i, N);
                const double d = static_cast<double>(k) * T / static_cast<double>(N);
                entry += eps * hhat * kernel.at_offset(xi, d);
            }
            sys.matrix(i - 1, j - 1) = entry;
        }
        sys.rhs(i - 1) = detail::eval_checked(w, xi, "right-hand side");
    }
    return sys;
}

/// D_n(y) = sin(n pi y / T) cot(pi y / T) / n for even n: the cardinal
/// trigonometric interpolant on x_j = a + jT/n, D_n(x_s - x_j) = delta_sj.
inline double dirichlet_kernel_deriv(int k, int n, double y, double T);

inline double dirichlet_kernel(int n, double y, double T)
{
    return dirichlet_kernel_deriv(0, n, y, T);
}

namespace detail {

// Taylor coefficients in z of sin(n z) cot(z) / n = [sin(nz)/(nz)] [z cot z]
inline series::coefficients dirichlet_taylor(int n, std::size_t order)
{
    const auto zcot = series::multiply(series::cos_scaled(1.0, order),
                                       series::reciprocal(series::sinc_scaled(1.0, order), order),
                                       order);
    return series::multiply(series::sinc_scaled(static_cast<double>(n), order), zcot, order);
}

} // namespace detail

/// k-th derivative (k <= 3) of D_n in y. Within |z| < 1e-4 of a multiple
/// of pi, z = pi y / T, a Taylor expansion through z^12 is used.
inline double dirichlet_kernel_deriv(int k, int n, double y, double T)
{
    if (n < 2 || n % 2 != 0) {
        throw error(errc::odd_n_unsupported,
                    "odd n unsupported (n=" + std::to_string(n) + ")");
    }
    if (k < 0 || k > 3) {
        throw error(errc::invalid_argument, "dirichlet_kernel_deriv: k must be in 0..3");
    }
    const double c = std::numbers::pi / T;
    // period T in y: reduce to z in [-pi/2, pi/2)
    double z = c * y;
    z -= std::numbers::pi * std::round(z / std::numbers::pi);
    const double chain = std::pow(c, k);
    if (std::abs(z) < 1e-4) {
        const auto coeffs = detail::dirichlet_taylor(n, 12);
        return chain * series::evaluate_derivative(coeffs, k, z);
    }
    const double nn = n;
    const double sn = std::sin(nn * z);
    const double cn = std::cos(nn * z);
    const double cot = std::cos(z) / std::sin(z);
    const double csc2 = 1.0 + cot * cot;
    // derivatives of sin(nz) and cot(z)
    const std::array<double, 4> ds{sn, nn * cn, -nn * nn * sn, -nn * nn * nn * cn};
    const std::array<double, 4> dc{cot, -csc2, 2.0 * cot * csc2, -2.0 * csc2 * (1.0 + 3.0 * cot * cot)};
    static constexpr std::array<std::array<double, 4>, 4> binom{
        {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}}};
    double acc = 0.0;
    for (int p = 0; p <= k; ++p) {
        acc += binom[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)] *
               ds[static_cast<std::size_t>(p)] * dc[static_cast<std::size_t>(k - p)];
    }
    return chain * acc / nn;
}

/// Coefficients of phi^{(k)}(t), k = 0..3, in T^(0)_{3,n}[K(t, .) phi].
inline std::array<double, 4> ak_coefficients(const PeriodicKernel& kernel, double t, double h)
{
    if (!kernel.diagonal) {
        throw error(errc::missing_diagonal_derivatives,
                    "advanced approach requires U_k(t,t), k<=3");
    }
    std::array<double, 4> u{};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& fn = (*kernel.diagonal)[k];
        if (!fn) {
            throw error(errc::missing_diagonal_derivatives,
                        "advanced approach requires U_k(t,t), k<=3");
        }
        u[k] = detail::eval_checked(fn, t, "diagonal derivative");
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    return {-pi2 / 3.0 * u[1] / h + u[3] * h / 6.0,
            -pi2 / 3.0 * u[0] / h + u[2] * h / 2.0,
            u[1] * h / 2.0,
            u[0] * h / 6.0};
}

/// x_j = a + j h, j = 0..n-1, h = T / n, n even.
inline CollocationSystem build_advanced_system(const PeriodicKernel& kernel,
                                               const std::function<double(double)>& w,
                                               double lambda, int n)
{
    if (n % 2 != 0) {
        throw error(errc::odd_n_unsupported, "odd n unsupported (n=" + std::to_string(n) + ")");
    }
    if (n < 4) {
        throw error(errc::invalid_argument, "build_advanced_system: n must be >= 4");
    }
    const double T = kernel.period();
    const double h = T / n;

    CollocationSystem sys;
    sys.method = approach::advanced;
    sys.lambda = lambda;
    sys.grid.resize(static_cast<std::size_t>(n));
    sys.matrix = Eigen::MatrixXd::Zero(n, n);
    sys.rhs.resize(n);
    for (int j = 0; j < n; ++j) {
        sys.grid[static_cast<std::size_t>(j)] = kernel.a + j * h;
    }
    // D_n^{(k)}(x_i - x_j) depends only on i - j
    std::array<std::vector<double>, 4> dn;
    for (int k = 1; k <= 3; ++k) {
        dn[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            dn[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] =
                dirichlet_kernel_deriv(k, n, d * h, T);
        }
    }
    for (int i = 0; i < n; ++i) {
        const double xi = sys.grid[static_cast<std::size_t>(i)];
        const auto A = ak_coefficients(kernel, xi, h);
        for (int j = 0; j < n; ++j) {
            const int diff = ((i - j) % n + n) % n;
            double entry = 0.0;
            if (i == j) {
                entry = lambda + A[0];
            } else {
                const std::int64_t k = detail::centered(j - i, n);
                entry = h * kernel.at_offset(xi, static_cast<double>(k) * h);
            }
            for (std::size_t k = 1; k <= 3; ++k) {
                entry += A[k] * dn[k][static_cast<std::size_t>(diff)];
            }
            sys.matrix(i, j) = entry;
        }
        sys.rhs(i) = detail::eval_checked(w, xi, "right-hand side");
    }
    return sys;
}

/// Dense LU solve with a reciprocal-condition estimate.
inline CollocationSolution solve_collocation(const CollocationSystem& sys)
{
    const auto N = sys.matrix.rows();
    if (N == 0 || sys.matrix.cols() != N || sys.rhs.size() != N) {
        throw error(errc::invalid_argument, "solve_collocation: malformed system");
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
        throw singular_system_error(cond, "collocation matrix is singular to working precision "
                                          "(condition estimate " + std::to_string(cond) + ")");
    }
    const Eigen::VectorXd phi = lu.solve(sys.rhs);
    CollocationSolution out;
    out.grid = sys.grid;
    out.phi.assign(phi.data(), phi.data() + phi.size());
    out.residual_max = (sys.matrix * phi - sys.rhs).cwiseAbs().maxCoeff();
    out.condition_estimate = cond;
    return out;
}

struct ManufacturedOptions {
    int start_n = 16;
    int max_n = 1024;
    double tolerance = 1e-12;
    // accepted difference once roundoff, which grows like n^2, takes over
    double roundoff_tolerance = 1e-10;
};

/// The inner integral HFP int K(t, x) phi(x) dx by T^(2)_{3,n} with n doubled.
/// Returns the coarser value of the first pair differing by at most
/// tolerance * max(1, |value|); if the differences start growing first, the
/// coarser value of the smallest difference is returned provided that
/// difference is within roundoff_tolerance * max(1, |value|).
inline double kernel_integral(const PeriodicKernel& kernel,
                              const std::function<double(double)>& phi, double t,
                              const ManufacturedOptions& opts = {})
{
    const double T = kernel.period();
    auto g = [&kernel, &phi, t](double x) { return kernel.U(t, x) * phi(x); };
    const PeriodicIntegrand f(3, t, t - T / 2.0, t + T / 2.0, g);
    double prev = t_hat({3, 2, opts.start_n, rule_path::compact}, f);
    double best_value = prev;
    double best_diff = std::numeric_limits<double>::infinity();
    for (int n = 2 * opts.start_n; n <= opts.max_n; n *= 2) {
        const double cur = t_hat({3, 2, n, rule_path::compact}, f);
        const double diff = std::abs(cur - prev);
        const double scale = std::max(1.0, std::abs(cur));
        if (diff <= opts.tolerance * scale) {
            return prev;
        }
        if (diff > best_diff) {
            if (best_diff <= opts.roundoff_tolerance * scale) {
                return best_value;
            }
        } else {
            best_diff = diff;
            best_value = prev;
        }
        prev = cur;
    }
    throw error(errc::not_converged, "manufactured right-hand side did not converge at t=" +
                                         std::to_string(t));
}

/// w(t) = lambda phi(t) + HFP int K(t, x) phi(x) dx, with the integral from
/// the derivative-free rule.
inline std::function<double(double)> manufactured_rhs(PeriodicKernel kernel,
                                                      std::function<double(double)> phi,
                                                      double lambda,
                                                      ManufacturedOptions opts = {})
{
    return [kernel = std::move(kernel), phi = std::move(phi), lambda, opts](double t) {
        return lambda * phi(t) + kernel_integral(kernel, phi, t, opts);
    };
}

/// U(t, x) = (x - t)^3 cos(pi (x-t)/T) / sin^3(pi (x-t)/T), i.e.
/// K(t, x) = cot(pi (x-t)/T) / sin^2(pi (x-t)/T). Its x-derivatives on the
/// diagonal are (T/pi)^3, 0, 0, 0.
inline PeriodicKernel theta3_kernel(double a, double b)
{
    const double T = b - a;
    PeriodicKernel k;
    k.a = a;
    k.b = b;
    k.U = [T](double t, double x) {
        const double y = x - t;
        const double z = std::numbers::pi * y / T;
        if (z == 0.0) {
            return std::pow(T / std::numbers::pi, 3);
        }
        const double r = y / std::sin(z);
        return std::cos(z) * r * r * r;
    };
    const double u0 = std::pow(T / std::numbers::pi, 3);
    k.diagonal = std::array<std::function<double(double)>, 4>{
        [u0](double) { return u0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; }};
    return k;
}

} // namespace hfpquad
