#pragma once

// Truncated power series in one variable. Used to produce exact Taylor
// coefficients of the trigonometric kernels at their removable points.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hfpquad::series {

using coefficients = std::vector<double>;

inline coefficients multiply(const coefficients& lhs, const coefficients& rhs, std::size_t order)
{
    coefficients out(order + 1, 0.0);
    for (std::size_t i = 0; i < lhs.size() && i <= order; ++i) {
        for (std::size_t j = 0; j < rhs.size() && i + j <= order; ++j) {
            out[i + j] += lhs[i] * rhs[j];
        }
    }
    return out;
}

/// 1 / s for s[0] != 0.
inline coefficients reciprocal(const coefficients& s, std::size_t order)
{
    if (s.empty() || s[0] == 0.0) {
        throw std::invalid_argument("series::reciprocal: zero constant term");
    }
    coefficients out(order + 1, 0.0);
    out[0] = 1.0 / s[0];
    for (std::size_t k = 1; k <= order; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k && j < s.size(); ++j) {
            acc += s[j] * out[k - j];
        }
        out[k] = -acc / s[0];
    }
    return out;
}

inline coefficients power(const coefficients& s, int p, std::size_t order)
{
    coefficients out(order + 1, 0.0);
    out[0] = 1.0;
    for (int i = 0; i < p; ++i) {
        out = multiply(out, s, order);
    }
    return out;
}

/// cos(c y)
inline coefficients cos_scaled(double c, std::size_t order)
{
    coefficients out(order + 1, 0.0);
    double term = 1.0;
    for (std::size_t k = 0; k <= order; k += 2) {
        out[k] = term;
        term *= -c * c / static_cast<double>((k + 1) * (k + 2));
    }
    return out;
}

/// sin(c y) / (c y)
inline coefficients sinc_scaled(double c, std::size_t order)
{
    coefficients out(order + 1, 0.0);
    double term = 1.0;
    for (std::size_t k = 0; k <= order; k += 2) {
        out[k] = term;
        term *= -c * c / static_cast<double>((k + 2) * (k + 3));
    }
    return out;
}

/// Horner evaluation of the k-th derivative at y.
inline double evaluate_derivative(const coefficients& s, int k, double y)
{
    double acc = 0.0;
    for (std::size_t i = s.size(); i-- > static_cast<std::size_t>(k);) {
        double falling = 1.0;
        for (int q = 0; q < k; ++q) {
            falling *= static_cast<double>(i - static_cast<std::size_t>(q));
        }
        acc = acc * y + falling * s[i];
    }
    return acc;
}

} // namespace hfpquad::series
