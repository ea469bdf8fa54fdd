#pragma once

// Trapezoidal-type rules for Hadamard finite-part integrals of T-periodic
// integrands with a pole of order m at an interior point t:
//
//   I[f] = HFP int_a^b g(x) / (x - t)^m dx.
//
// The plain sum h * sum_{j=1}^{n-1} f(t + j h) has an asymptotic expansion
// with finitely many powers of h whose coefficients are known multiples of
// g^{(k)}(t). Subtracting them gives the s = 0 rule; s >= 1 rules are
// extrapolated combinations of s = 0 rules on n, 2n, ..., 2^s n panels that
// remove the low-order derivative terms one power of h at a time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "hfpquad/em_constants.hpp"
#include "hfpquad/error.hpp"
#include "hfpquad/integrand.hpp"

namespace hfpquad {

/// coefficient * g^{(derivative_order)}(t) * h^power
struct CorrectionTerm {
    int derivative_order = 0;
    double coefficient = 0.0;
    int power = 0;
};

/// h * sum_{j=1}^{n-1} f(t + j h), h = T / n.
inline double plain_trap_sum(const PeriodicIntegrand& integrand, int n)
{
    if (n < 2) {
        throw error(errc::invalid_argument, "plain_trap_sum: n must be >= 2");
    }
    compensated_sum acc;
    for (std::int64_t j = 1; j < n; ++j) {
        acc.add(integrand.at_grid_offset(j, n));
    }
    return integrand.period() / n * acc.value();
}

/// Offset trapezoidal sums.
/// level 1: h * sum_{j=1}^{n} f(t + j h - h/2)
/// level 2: (h/2) * sum_{j=1}^{2n} f(t + j h/2 - h/4)
inline double midpoint_sum(const PeriodicIntegrand& integrand, int n, int level)
{
    if (n < 1) {
        throw error(errc::invalid_argument, "midpoint_sum: n must be >= 1");
    }
    if (level != 1 && level != 2) {
        throw error(errc::invalid_argument, "midpoint_sum: level must be 1 or 2");
    }
    const std::int64_t count = static_cast<std::int64_t>(n) << (level - 1);
    const std::int64_t grid = 2 * count;
    compensated_sum acc;
    for (std::int64_t j = 1; j <= count; ++j) {
        acc.add(integrand.at_grid_offset(2 * j - 1, grid));
    }
    return integrand.period() / static_cast<double>(count) * acc.value();
}

/// Terms of the finite correction sum for order m:
///   m = 2r:   2 sum_{i=0}^{r} g^{(2i)}(t)/(2i)!     zeta(2r-2i) h^{-2r+2i+1}
///   m = 2r+1: 2 sum_{i=0}^{r} g^{(2i+1)}(t)/(2i+1)! zeta(2r-2i) h^{-2r+2i+1}
inline std::vector<CorrectionTerm> correction_terms(int m)
{
    if (m < 1) {
        throw error(errc::invalid_argument, "correction_terms: m must be >= 1");
    }
    const int r = m / 2;
    const int parity = m % 2;
    std::vector<CorrectionTerm> terms;
    double factorial = 1.0;
    int last = 0;
    for (int i = 0; i <= r; ++i) {
        const int order = 2 * i + parity;
        for (int q = last + 1; q <= order; ++q) {
            factorial *= q;
        }
        last = order;
        terms.push_back({order, 2.0 * zeta_at(2 * (r - i)) / factorial, -2 * r + 2 * i + 1});
    }
    return terms;
}

/// The correction sum of the plain trapezoidal expansion; subtracting it from
/// plain_trap_sum gives the s = 0 rule.
inline double correction_sum(const PeriodicIntegrand& integrand, int n)
{
    const double h = integrand.period() / n;
    double total = 0.0;
    for (const auto& term : correction_terms(integrand.order())) {
        total += term.coefficient * integrand.derivative_at_t(term.derivative_order) *
                 std::pow(h, term.power);
    }
    return total;
}

/// Exact weights alpha_0..alpha_s with T^(s)_n = sum_k alpha_k T^(0)_{2^k n}.
struct ExtrapolationWeights {
    std::vector<rational> alpha;

    int level() const noexcept { return static_cast<int>(alpha.size()) - 1; }

    std::vector<double> as_double() const
    {
        std::vector<double> out;
        out.reserve(alpha.size());
        for (const auto& a : alpha) {
            out.push_back(to_double(a));
        }
        return out;
    }
};

/// Power of h removed by extrapolation step j (1-based): h^1, h^-1, h^-3, ...
inline int eliminated_power(int step)
{
    return step == 1 ? 1 : -(2 * step - 3);
}

/// Successive elimination of h^1, h^-1, ..., h^{-2s+3} over the doubling
/// sequence n, 2n, ..., 2^s n. The weights do not depend on m.
inline ExtrapolationWeights extrapolation_weights(int s)
{
    if (s < 0) {
        throw error(errc::invalid_argument, "extrapolation_weights: s must be >= 0");
    }
    const std::size_t len = static_cast<std::size_t>(s) + 1;
    // row k: the current-level value built on panel counts 2^k n, expressed
    // over the s = 0 values
    std::vector<std::vector<rational>> rows(len, std::vector<rational>(len, rational(0)));
    for (std::size_t k = 0; k < len; ++k) {
        rows[k][k] = 1;
    }
    for (int step = 1; step <= s; ++step) {
        const int p = eliminated_power(step);
        // halving h multiplies the h^p term by 2^{-p}
        const rational c = p >= 0 ? rational(1, boost::multiprecision::cpp_int(1) << p)
                                  : rational(boost::multiprecision::cpp_int(1) << (-p));
        const std::size_t live = len - static_cast<std::size_t>(step);
        for (std::size_t k = 0; k < live; ++k) {
            for (std::size_t i = 0; i < len; ++i) {
                rows[k][i] = (rows[k + 1][i] - c * rows[k][i]) / (1 - c);
            }
        }
    }
    return ExtrapolationWeights{rows[0]};
}

enum class rule_path { compact, generic };

struct RuleSpec {
    int m = 3;
    int s = 0;
    int n = 10;
    rule_path path = rule_path::generic;
};

/// Whether (m, s) has a closed-form compact rule.
inline bool has_compact_rule(int m, int s) noexcept
{
    return m >= 1 && m <= 4 && s >= 0 && s <= (m == 1 ? 1 : (m == 4 ? 3 : 2));
}

/// Nodes t + (first + i*stride) * hhat for i < count_per_n * n, each with
/// weight * hhat, where hhat = h / refinement.
struct NodeFamily {
    std::int64_t first = 1;
    std::int64_t stride = 1;
    int count_per_n = 1;
    // the plain sum stops one node short of a full period
    int count_offset = 0;
    rational weight = 1;
};

struct ExpandedRule {
    std::int64_t grid_size = 0; // nodes on one period at spacing hhat
    std::vector<std::int64_t> offsets;
    std::vector<rational> weights;
};

struct CompactRule {
    int m = 0;
    int s = 0;
    int refinement = 1;
    std::vector<NodeFamily> families;
    std::vector<CorrectionTerm> deriv_corrections;

    ExpandedRule expand(int n) const
    {
        ExpandedRule out;
        out.grid_size = static_cast<std::int64_t>(refinement) * n;
        for (const auto& fam : families) {
            const std::int64_t count =
                static_cast<std::int64_t>(fam.count_per_n) * n + fam.count_offset;
            for (std::int64_t i = 0; i < count; ++i) {
                out.offsets.push_back(fam.first + i * fam.stride);
                out.weights.push_back(fam.weight);
            }
        }
        return out;
    }

    int highest_derivative() const noexcept
    {
        int top = -1;
        for (const auto& c : deriv_corrections) {
            top = std::max(top, c.derivative_order);
        }
        return top;
    }
};

/// Closed-form rules for m <= 4. Offsets and weights are in units of
/// hhat = h / refinement.
inline CompactRule compact_rule(int m, int s)
{
    if (!has_compact_rule(m, s)) {
        throw error(errc::unsupported_rule, "no compact rule for (m=" + std::to_string(m) +
                                                ", s=" + std::to_string(s) + ")");
    }
    constexpr double pi = std::numbers::pi;
    constexpr double pi2 = pi * pi;
    constexpr double pi4 = pi2 * pi2;

    CompactRule rule;
    rule.m = m;
    rule.s = s;
    rule.refinement = 1 << s;
    const std::int64_t r = rule.refinement;

    // h sum_{j=1}^{n-1} f(t + jh)
    const NodeFamily plain{1, 1, 1, -1, rational(1)};
    // w * sum_{j=1}^{c n} f(t + (2j-1) * hhat_level), hhat_level = h / (2c)
    auto offset_family = [r](int c, rational weight_in_h) {
        const std::int64_t unit = r / (2 * c);
        return NodeFamily{unit, 2 * unit, c, 0, weight_in_h * r};
    };

    if (s == 0) {
        rule.families = {plain};
        for (auto term : correction_terms(m)) {
            term.coefficient = -term.coefficient;
            rule.deriv_corrections.push_back(term);
        }
        return rule;
    }

    switch (m) {
    case 1:
        rule.families = {offset_family(1, rational(1))};
        break;
    case 2:
        if (s == 1) {
            rule.families = {offset_family(1, rational(1))};
            rule.deriv_corrections = {{0, -pi2, -1}};
        } else {
            rule.families = {offset_family(1, rational(2)), offset_family(2, rational(-1, 2))};
        }
        break;
    case 3:
        if (s == 1) {
            rule.families = {offset_family(1, rational(1))};
            rule.deriv_corrections = {{1, -pi2, -1}};
        } else {
            rule.families = {offset_family(1, rational(2)), offset_family(2, rational(-1, 2))};
        }
        break;
    case 4:
        if (s == 1) {
            rule.families = {offset_family(1, rational(1))};
            rule.deriv_corrections = {{0, -pi4 / 3.0, -3}, {2, -pi2 / 2.0, -1}};
        } else if (s == 2) {
            rule.families = {offset_family(1, rational(2)), offset_family(2, rational(-1, 2))};
            rule.deriv_corrections = {{0, 2.0 * pi4, -3}};
        } else {
            rule.families = {offset_family(1, rational(16, 7)),
                             offset_family(2, rational(-5, 7)),
                             offset_family(4, rational(1, 28))};
        }
        break;
    default:
        break;
    }
    return rule;
}

/// Value of a compact rule at n base panels.
inline double evaluate_compact(const CompactRule& rule, const PeriodicIntegrand& integrand, int n)
{
    if (rule.m != integrand.order()) {
        throw error(errc::invalid_argument, "compact rule order does not match integrand");
    }
    if (n < (rule.s == 0 ? 2 : 1)) {
        throw error(errc::invalid_argument, "rule needs more panels (n=" + std::to_string(n) + ")");
    }
    const std::int64_t grid = static_cast<std::int64_t>(rule.refinement) * n;
    const double hhat = integrand.period() / static_cast<double>(grid);
    compensated_sum total;
    for (const auto& fam : rule.families) {
        const std::int64_t count =
            static_cast<std::int64_t>(fam.count_per_n) * n + fam.count_offset;
        compensated_sum acc;
        for (std::int64_t i = 0; i < count; ++i) {
            acc.add(integrand.at_grid_offset(fam.first + i * fam.stride, grid));
        }
        total.add(to_double(fam.weight) * hhat * acc.value());
    }
    const double h = integrand.period() / n;
    for (const auto& c : rule.deriv_corrections) {
        total.add(c.coefficient * integrand.derivative_at_t(c.derivative_order) *
                  std::pow(h, c.power));
    }
    return total.value();
}

namespace detail {

// sum_k alpha_k T0(2^k n), with the derivative terms grouped by power. A
// term whose combined weight vanishes exactly does not need its derivative.
inline double generic_rule(const PeriodicIntegrand& integrand, int s, int n)
{
    const auto weights = extrapolation_weights(s);
    compensated_sum total;
    for (int k = 0; k <= s; ++k) {
        const double ak = to_double(weights.alpha[static_cast<std::size_t>(k)]);
        total.add(ak * plain_trap_sum(integrand, n << k));
    }
    const double h = integrand.period() / n;
    for (const auto& term : correction_terms(integrand.order())) {
        rational combined = 0;
        for (int k = 0; k <= s; ++k) {
            // (h / 2^k)^p = h^p * 2^{-kp}
            const int e = -k * term.power;
            const rational scale = e >= 0 ? rational(boost::multiprecision::cpp_int(1) << e)
                                          : rational(1, boost::multiprecision::cpp_int(1) << -e);
            combined += weights.alpha[static_cast<std::size_t>(k)] * scale;
        }
        if (combined == 0) {
            continue;
        }
        total.add(-to_double(combined) * term.coefficient *
                  integrand.derivative_at_t(term.derivative_order) * std::pow(h, term.power));
    }
    return total.value();
}

} // namespace detail

/// Rule value for the given specification. The generic path is
/// sum_k alpha_k T^(0)_{2^k n} and covers every (m, s); the compact path
/// evaluates the closed forms directly.
inline double t_hat(const RuleSpec& spec, const PeriodicIntegrand& integrand)
{
    if (spec.m != integrand.order()) {
        throw error(errc::invalid_argument, "RuleSpec.m does not match the integrand order");
    }
    if (spec.s < 0 || spec.n < 1) {
        throw error(errc::invalid_argument, "RuleSpec: need s >= 0 and n >= 1");
    }
    if (spec.path == rule_path::compact) {
        return evaluate_compact(compact_rule(spec.m, spec.s), integrand, spec.n);
    }
    if (spec.n < 2) {
        throw error(errc::invalid_argument, "generic rule needs n >= 2");
    }
    if (spec.s == 0) {
        return plain_trap_sum(integrand, spec.n) - correction_sum(integrand, spec.n);
    }
    return detail::generic_rule(integrand, spec.s, spec.n);
}

/// Sup norms of g, g' and g''' on [a, b].
struct FloorNorms {
    double g = 0.0;
    double gp = 0.0;
    double gppp = 0.0;
};

/// Roundoff bound K(n) u n^2 for the m = 3, s = 0 rule, with
/// K(n) = 2 zeta(3)/T^2 |g| + pi^2/(3 T n) |g'| + T/(6 n^3) |g'''|.
inline double roundoff_floor(const FloorNorms& norms, double T, double n, double u)
{
    if (norms.g < 0.0 || norms.gp < 0.0 || norms.gppp < 0.0 || !(u > 0.0) || !(T > 0.0) ||
        !(n > 0.0)) {
        throw error(errc::invalid_argument, "roundoff_floor: invalid arguments");
    }
    constexpr double pi = std::numbers::pi;
    const double K = 2.0 * zeta_at(3) / (T * T) * norms.g +
                     pi * pi / (3.0 * T * n) * norms.gp + T / (6.0 * n * n * n) * norms.gppp;
    return K * u * n * n;
}

} // namespace hfpquad
