#pragma once

// Convergence tables against closed-form or reference values, empirical
// rate fits and comparison of the observed plateau with the roundoff model.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hfpquad/error.hpp"
#include "hfpquad/integrand.hpp"
#include "hfpquad/oracles.hpp"
#include "hfpquad/quadrature.hpp"

namespace hfpquad {

/// Unit roundoff of IEEE double.
inline constexpr double double_unit_roundoff = 0x1p-53;

enum class integrand_family { eta_oracle, user_modes };
enum class oracle_kind { exact_supersingular, hfp_reference };

inline const char* to_string(integrand_family f) noexcept
{
    return f == integrand_family::eta_oracle ? "eta-oracle" : "user-modes";
}

inline const char* to_string(oracle_kind o) noexcept
{
    return o == oracle_kind::exact_supersingular ? "exact_supersingular" : "hfp_reference";
}

inline const char* to_string(rule_path p) noexcept
{
    return p == rule_path::compact ? "compact" : "generic";
}

/// f(x) = theta_m(x - t) u(x) on a 2 pi interval around t. For the eta
/// family m = 3 and u is the Poisson kernel; for user modes u is a
/// trigonometric polynomial and any m >= 1 is allowed.
struct ConvergenceCase {
    integrand_family family = integrand_family::eta_oracle;
    int m = 3;
    int s = 0;
    double eta = 0.5;
    double t = 1.0;
    TrigPolynomial modes;
    rule_path path = rule_path::compact;

    double period() const noexcept { return two_pi; }
};

struct ConvergenceRow {
    int n = 0;
    double value = 0.0;
    double error = 0.0;
    double floor = 0.0;
};

struct ConvergenceReport {
    ConvergenceCase config;
    oracle_kind oracle = oracle_kind::exact_supersingular;
    double oracle_value = 0.0;
    FloorNorms norms;
    std::vector<ConvergenceRow> rows;
    std::optional<double> fitted_rate;
    double floor_estimate = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    int rows_used = 0;
    bool floor_dominated = false;
};

struct FloorComparison {
    double plateau = 0.0;
    double floor = 0.0;
    double safety_factor = 100.0;
    bool within = true;
};

/// Worker count: HFPQUAD_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned thread_limit()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HFPQUAD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return hw;
}

/// Runs body(i) for i in [0, count) on up to thread_limit() threads. The
/// first exception thrown is rethrown after all workers finish.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(thread_limit(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(run);
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

/// Sup norms of g, g' and g''' sampled on the interior of [a, b]; the
/// derivatives are central differences.
inline FloorNorms sampled_norms(const std::function<double(double)>& g, double a, double b,
                                int samples = 2048)
{
    if (!(a < b) || samples < 2) {
        throw error(errc::invalid_argument, "sampled_norms: need a < b and samples >= 2");
    }
    const double d = (b - a) * 1e-3;
    const double lo = a + 2.0 * d;
    const double hi = b - 2.0 * d;
    FloorNorms out;
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        const double f0 = g(x);
        const double fp1 = g(x + d);
        const double fm1 = g(x - d);
        const double fp2 = g(x + 2.0 * d);
        const double fm2 = g(x - 2.0 * d);
        out.g = std::max(out.g, std::abs(f0));
        out.gp = std::max(out.gp, std::abs((fp1 - fm1) / (2.0 * d)));
        out.gppp =
            std::max(out.gppp, std::abs((fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * d * d * d)));
    }
    return out;
}

/// Rule-ready integrand and oracle value for a case.
struct PreparedCase {
    ThetaIntegrand integrand;
    oracle_kind oracle = oracle_kind::exact_supersingular;
    double oracle_value = 0.0;
};

inline PreparedCase prepare_case(const ConvergenceCase& c)
{
    if (c.m < 1) {
        throw error(errc::invalid_argument, "m must be >= 1");
    }
    if (c.s < 0) {
        throw error(errc::invalid_argument, "s must be >= 0");
    }
    if (c.path == rule_path::compact && !has_compact_rule(c.m, c.s)) {
        throw error(errc::unsupported_rule, "no compact rule for (m=" + std::to_string(c.m) +
                                                ", s=" + std::to_string(c.s) + ")");
    }
    if (c.family == integrand_family::eta_oracle) {
        if (c.m != 3) {
            throw error(errc::invalid_argument, "eta-oracle family requires m=3");
        }
        PreparedCase out{make_eta_integrand({c.eta, c.t}, 8), oracle_kind::exact_supersingular,
                         exact_supersingular(c.eta, c.t)};
        return out;
    }
    const auto [a, b] = eta_family_interval(c.t);
    const int order = c.m + 8;
    std::vector<double> ud;
    for (int i = 0; i <= order; ++i) {
        ud.push_back(c.modes.derivative(c.t, i));
    }
    auto ti = make_theta_integrand(c.m, c.t, a, b, c.modes, ud);
    const double ref = hfp_reference(ti.integrand.g(), ti.derivs, c.m, a, b, c.t);
    return PreparedCase{std::move(ti), oracle_kind::hfp_reference, ref};
}

/// One row per n (sorted, strictly increasing); error = |t_hat - oracle|.
/// floor is the roundoff model at the number of nodes actually used,
/// 2^s n, with unit roundoff u.
inline ConvergenceReport convergence_table(const ConvergenceCase& c, std::vector<int> n_list,
                                           double u = double_unit_roundoff)
{
    if (n_list.empty()) {
        throw error(errc::invalid_argument, "convergence_table: empty n list");
    }
    std::sort(n_list.begin(), n_list.end());
    if (std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) {
        throw error(errc::invalid_argument, "convergence_table: duplicate n");
    }
    const auto prepared = prepare_case(c);
    const auto& f = prepared.integrand.integrand;

    ConvergenceReport report;
    report.config = c;
    report.oracle = prepared.oracle;
    report.oracle_value = prepared.oracle_value;
    report.norms = sampled_norms(f.g(), f.lower(), f.upper());
    report.rows.resize(n_list.size());

    const double T = f.period();
    parallel_for(n_list.size(), [&](std::size_t i) {
        const int n = n_list[i];
        ConvergenceRow row;
        row.n = n;
        row.value = t_hat({c.m, c.s, n, c.path}, f);
        row.error = std::abs(row.value - prepared.oracle_value);
        row.floor = roundoff_floor(report.norms, T, std::ldexp(static_cast<double>(n), c.s), u);
        report.rows[i] = row;
    });
    report.floor_estimate = report.rows.back().floor;
    return report;
}

/// Least-squares slope of ln(error) against n over rows whose error exceeds
/// 100 x floor. A slope above -0.01 marks the data as floor-dominated.
inline RateFit empirical_rate(const std::vector<ConvergenceRow>& rows, int min_rows = 3)
{
    double sn = 0.0;
    double se = 0.0;
    double snn = 0.0;
    double sne = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (!(r.error > 100.0 * r.floor) || !(r.error > 0.0) || !std::isfinite(r.error)) {
            continue;
        }
        const double x = r.n;
        const double y = std::log(r.error);
        sn += x;
        se += y;
        snn += x * x;
        sne += x * y;
        ++count;
    }
    if (count < std::max(2, min_rows)) {
        throw error(errc::insufficient_data,
                    "insufficient pre-floor data (" + std::to_string(count) + " rows)");
    }
    const double denom = count * snn - sn * sn;
    if (!(denom > 0.0)) {
        throw error(errc::insufficient_data, "insufficient pre-floor data (single n value)");
    }
    RateFit fit;
    fit.slope = (count * sne - sn * se) / denom;
    fit.intercept = (se - fit.slope * sn) / count;
    fit.rows_used = count;
    fit.floor_dominated = fit.slope > -0.01;
    return fit;
}

inline RateFit empirical_rate(ConvergenceReport& report, int min_rows = 3)
{
    const auto fit = empirical_rate(report.rows, min_rows);
    report.fitted_rate = fit.slope;
    return fit;
}

/// Compares each row's error with safety_factor x roundoff_floor at 2^s n
/// nodes. plateau is the largest error seen, floor the largest model value.
inline FloorComparison floor_check(const ConvergenceReport& report, const FloorNorms& norms,
                                   double safety_factor = 100.0,
                                   double u = double_unit_roundoff)
{
    FloorComparison out;
    out.safety_factor = safety_factor;
    const double T = report.config.period();
    for (const auto& r : report.rows) {
        const double bound =
            roundoff_floor(norms, T, std::ldexp(static_cast<double>(r.n), report.config.s), u);
        out.plateau = std::max(out.plateau, r.error);
        out.floor = std::max(out.floor, bound);
        if (r.error > safety_factor * bound) {
            out.within = false;
        }
    }
    return out;
}

} // namespace hfpquad
