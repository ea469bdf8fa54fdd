#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfpquad/error.hpp"

namespace hfpquad {

/// Neumaier-compensated accumulator for node sums.
class compensated_sum {
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// f(x) = g(x) / (x - t)^m on [a, b], extended T-periodically with T = b - a.
///
/// g only has to be valid on [a, b]. Every node is mapped back into [a, b)
/// before g is called, and the singular factor is formed from the node's
/// offset to t rather than from the wrapped abscissa, so nodes close to a
/// periodic image of t keep full relative accuracy.
class PeriodicIntegrand {
public:
    using function_type = std::function<double(double)>;

    PeriodicIntegrand(int m, double t, double a, double b, function_type g,
                      std::optional<std::vector<double>> g_derivs_at_t = std::nullopt)
        : m_(m), t_(t), a_(a), b_(b), g_(std::move(g)), derivs_(std::move(g_derivs_at_t))
    {
        if (m_ < 1) {
            throw error(errc::invalid_argument, "PeriodicIntegrand: m must be >= 1");
        }
        if (!(a_ < t_ && t_ < b_) || !std::isfinite(a_) || !std::isfinite(b_)) {
            throw error(errc::invalid_argument, "PeriodicIntegrand: requires a < t < b");
        }
        if (!g_) {
            throw error(errc::invalid_argument, "PeriodicIntegrand: empty evaluator");
        }
    }

    int order() const noexcept { return m_; }
    double singular_point() const noexcept { return t_; }
    double lower() const noexcept { return a_; }
    double upper() const noexcept { return b_; }
    double period() const noexcept { return b_ - a_; }
    const function_type& g() const noexcept { return g_; }
    const std::optional<std::vector<double>>& derivatives_at_t() const noexcept
    {
        return derivs_;
    }

    bool has_derivative(int k) const noexcept
    {
        return derivs_ && k >= 0 && static_cast<std::size_t>(k) < derivs_->size();
    }

    double derivative_at_t(int k) const
    {
        if (!has_derivative(k)) {
            throw error(errc::missing_derivatives,
                        "derivatives required for s=0 rule: g^(" + std::to_string(k) +
                            ")(t) not supplied");
        }
        return (*derivs_)[static_cast<std::size_t>(k)];
    }

    /// x - kT in [a, b).
    double wrap(double x) const noexcept
    {
        const double T = period();
        double y = x - std::floor((x - a_) / T) * T;
        if (y >= b_) {
            y -= T;
        }
        if (y < a_) {
            y = a_;
        }
        return y;
    }

    /// f at an arbitrary abscissa; x must not be congruent to t.
    double f(double x) const
    {
        const double xw = wrap(x);
        return evaluate(xw, xw - t_, -1);
    }

    /// f(t + k T / N) for k not divisible by N.
    double at_grid_offset(std::int64_t k, std::int64_t N) const
    {
        std::int64_t kk = k % N;
        if (kk < 0) {
            kk += N;
        }
        if (kk == 0) {
            throw error(errc::invalid_argument, "node coincides with the singular point");
        }
        const double T = period();
        const double step = T / static_cast<double>(N);
        // representative with t + kk*step in [a, b)
        if (t_ + static_cast<double>(kk) * step >= b_) {
            kk -= N;
        }
        if (t_ + static_cast<double>(kk) * step < a_) {
            kk += N;
        }
        const double d = static_cast<double>(kk) * T / static_cast<double>(N);
        return evaluate(t_ + d, d, k);
    }

private:
    double evaluate(double x, double d, std::int64_t node) const
    {
        double gx = 0.0;
        try {
            gx = g_(x);
        } catch (const std::exception& e) {
            throw evaluation_error(node, x,
                                   "evaluator failed at node " + std::to_string(node) +
                                       " (x=" + std::to_string(x) + "): " + e.what());
        }
        if (!std::isfinite(gx)) {
            throw evaluation_error(node, x,
                                   "evaluator returned a non-finite value at node " +
                                       std::to_string(node) + " (x=" + std::to_string(x) + ")");
        }
        double p = d;
        for (int i = 1; i < m_; ++i) {
            p *= d;
        }
        return gx / p;
    }

    int m_;
    double t_;
    double a_;
    double b_;
    function_type g_;
    std::optional<std::vector<double>> derivs_;
};

inline double wrap_to_fundamental(double x, const PeriodicIntegrand& integrand)
{
    return integrand.wrap(x);
}

} // namespace hfpquad
