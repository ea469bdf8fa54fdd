#pragma once

// Exact Bernoulli numbers and the zeta values that appear in the
// Euler-Maclaurin corrections for periodic integrands with a pole of
// order m at an interior point.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hfpquad/error.hpp"

namespace hfpquad {

using rational = boost::multiprecision::cpp_rational;

/// Default largest k for which B_{2k} and zeta(2k) are tabulated. Supports
/// singularity orders up to m = 32.
inline constexpr int default_max_order = 16;

inline double to_double(const rational& q)
{
    return q.convert_to<double>();
}

inline rational binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return rational(0);
    }
    boost::multiprecision::cpp_int c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return rational(c);
}

namespace detail {

// B_0..B_n from sum_{j=0}^{n} C(n+1, j) B_j = 0.
inline std::vector<rational> bernoulli_all(int n)
{
    std::vector<rational> b(static_cast<std::size_t>(n) + 1);
    b[0] = 1;
    for (int k = 1; k <= n; ++k) {
        rational acc = 0;
        for (int j = 0; j < k; ++j) {
            acc += binomial(k + 1, j) * b[static_cast<std::size_t>(j)];
        }
        b[static_cast<std::size_t>(k)] = -acc / (k + 1);
    }
    return b;
}

inline boost::multiprecision::cpp_int factorial(int n)
{
    boost::multiprecision::cpp_int f = 1;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

} // namespace detail

/// B_{2k} as an exact rational. B_1 = -1/2 is the only nonzero odd one and
/// is exposed separately.
inline rational bernoulli_even(int k, int max_order = default_max_order)
{
    if (k < 0) {
        throw error(errc::invalid_argument, "bernoulli_even: k must be non-negative");
    }
    if (k > max_order) {
        throw error(errc::order_too_large,
                    "bernoulli_even: order too large (k=" + std::to_string(k) +
                        ", max=" + std::to_string(max_order) + ")");
    }
    return detail::bernoulli_all(2 * k)[static_cast<std::size_t>(2 * k)];
}

inline rational bernoulli_one()
{
    return rational(-1, 2);
}

/// zeta(2k) = (-1)^{k+1} (2 pi)^{2k} B_{2k} / (2 (2k)!), valid for k >= 0.
inline double zeta_even_from_bernoulli(int k, const rational& b2k)
{
    const rational scaled = b2k / (2 * rational(detail::factorial(2 * k)));
    long double two_pi_pow = 1.0L;
    for (int i = 0; i < 2 * k; ++i) {
        two_pi_pow *= 2.0L * std::numbers::pi_v<long double>;
    }
    const long double sign = (k % 2 == 0) ? -1.0L : 1.0L;
    return static_cast<double>(sign * two_pi_pow * scaled.convert_to<long double>());
}

/// Immutable table of the constants used by the correction sums and the
/// roundoff floor model.
class ZetaTable {
public:
    explicit ZetaTable(int max_order = default_max_order)
        : max_order_(max_order)
    {
        if (max_order < 1) {
            throw error(errc::invalid_argument, "ZetaTable: max_order must be >= 1");
        }
        const auto all = detail::bernoulli_all(2 * max_order + 2);
        bernoulli_.push_back(all[0]);
        bernoulli_.push_back(all[1]);
        for (int k = 1; k <= max_order; ++k) {
            bernoulli_.push_back(all[static_cast<std::size_t>(2 * k)]);
        }
        even_values_.reserve(static_cast<std::size_t>(max_order) + 1);
        even_values_.push_back(-0.5);
        for (int k = 1; k <= max_order; ++k) {
            even_values_.push_back(zeta_even_from_bernoulli(k, bernoulli_even_unchecked(k)));
        }
        zeta3_ = compute_zeta3();
    }

    int max_order() const noexcept { return max_order_; }

    /// [zeta(0), zeta(2), ..., zeta(2 max_order)].
    const std::vector<double>& even_values() const noexcept { return even_values_; }

    /// [B_0, B_1, B_2, B_4, ..., B_{2 max_order}].
    const std::vector<rational>& bernoulli() const noexcept { return bernoulli_; }

    double zeta3() const noexcept { return zeta3_; }

    const rational& bernoulli_even_unchecked(int k) const
    {
        return k == 0 ? bernoulli_[0] : bernoulli_[static_cast<std::size_t>(k) + 1];
    }

    /// zeta(j) for j in {0} U {2, 4, ...} U {-2, -4, ...} U {3}.
    double zeta_at(int j) const
    {
        if (j == 3) {
            return zeta3_;
        }
        if (j % 2 != 0) {
            throw error(errc::unsupported_zeta_argument,
                        "unsupported zeta argument " + std::to_string(j));
        }
        if (j < 0) {
            return 0.0;
        }
        if (j / 2 > max_order_) {
            throw error(errc::order_too_large,
                        "zeta_at: order too large (j=" + std::to_string(j) + ")");
        }
        return even_values_[static_cast<std::size_t>(j / 2)];
    }

private:
    // Direct sum to N plus the Euler-Maclaurin tail of x^{-3} at N.
    static double compute_zeta3()
    {
        const auto b = detail::bernoulli_all(10);
        constexpr int n_terms = 64;
        long double head = 0.0L;
        for (int k = n_terms; k >= 1; --k) {
            const long double kk = k;
            head += 1.0L / (kk * kk * kk);
        }
        const long double n = n_terms;
        long double tail = 1.0L / (2.0L * n * n) - 1.0L / (2.0L * n * n * n);
        // -sum_j B_{2j}/(2j)! f^{(2j-1)}(N), f^{(p)}(x) = (-1)^p (p+2)!/2 x^{-3-p}
        for (int j = 1; j <= 5; ++j) {
            const int p = 2 * j - 1;
            const long double coef =
                (b[static_cast<std::size_t>(2 * j)] /
                 rational(detail::factorial(2 * j)))
                    .convert_to<long double>();
            const long double deriv =
                -(detail::factorial(p + 2).convert_to<long double>() / 2.0L) *
                std::pow(n, -3.0L - p);
            tail -= coef * deriv;
        }
        return static_cast<double>(head + tail);
    }

    int max_order_;
    std::vector<double> even_values_;
    std::vector<rational> bernoulli_;
    double zeta3_ = 0.0;
};

inline const ZetaTable& default_zeta_table()
{
    static const ZetaTable table(default_max_order);
    return table;
}

inline double zeta_at(int j)
{
    return default_zeta_table().zeta_at(j);
}

} // namespace hfpquad
