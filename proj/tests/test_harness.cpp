#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "hfpquad/harness.hpp"

using namespace hfpquad;

namespace {

ConvergenceCase eta_case(double eta, int s)
{
    ConvergenceCase c;
    c.eta = eta;
    c.s = s;
    return c;
}

std::vector<int> range(int start, int stop, int step)
{
    std::vector<int> out;
    for (int n = start; n <= stop; n += step) {
        out.push_back(n);
    }
    return out;
}

std::vector<ConvergenceRow> rows_from(const std::vector<int>& n, const std::vector<double>& err)
{
    std::vector<ConvergenceRow> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back({n[i], 0.0, err[i], 0.0});
    }
    return out;
}

} // namespace

TEST(ConvergenceTable, TabulatedErrors)
{
    const auto s0 = convergence_table(eta_case(0.5, 0), {20, 40});
    EXPECT_NEAR(s0.rows[0].error, 2.10e-5, 0.01 * 2.10e-5);
    EXPECT_NEAR(s0.rows[1].error, 2.27e-11, 0.01 * 2.27e-11);
    const auto s2 = convergence_table(eta_case(0.5, 2), {10});
    EXPECT_NEAR(s2.rows[0].error, 1.75e-2, 0.01 * 1.75e-2);
    EXPECT_EQ(s0.oracle, oracle_kind::exact_supersingular);
    EXPECT_DOUBLE_EQ(s0.oracle_value, exact_supersingular(0.5, 1.0));
}

TEST(ConvergenceTable, RowsSortedAndValidated)
{
    const auto r = convergence_table(eta_case(0.3, 1), {30, 10, 20});
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].n, 10);
    EXPECT_EQ(r.rows[2].n, 30);
    for (const auto& row : r.rows) {
        EXPECT_DOUBLE_EQ(row.error, std::abs(row.value - r.oracle_value));
        EXPECT_GT(row.floor, 0.0);
    }
    EXPECT_EQ(r.floor_estimate, r.rows.back().floor);
    EXPECT_THROW((void)convergence_table(eta_case(0.3, 1), {10, 10}), error);
    EXPECT_THROW((void)convergence_table(eta_case(0.3, 1), {}), error);
}

TEST(ConvergenceTable, OracleFailurePropagates)
{
    try {
        (void)convergence_table(eta_case(1.2, 0), {10});
        FAIL() << "expected an exception";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::domain_error);
    }
    ConvergenceCase bad = eta_case(0.5, 0);
    bad.m = 2;
    EXPECT_THROW((void)convergence_table(bad, {10}), error);
    bad = eta_case(0.5, 3);
    EXPECT_THROW((void)convergence_table(bad, {10}), error);
}

TEST(ConvergenceTable, UserModesUseReference)
{
    ConvergenceCase c;
    c.family = integrand_family::user_modes;
    c.m = 2;
    c.s = 2;
    c.t = 0.4;
    c.modes = TrigPolynomial{{0.5, -0.2, 0.1}, {0.0, 0.3}};
    const auto r = convergence_table(c, {16, 32});
    EXPECT_EQ(r.oracle, oracle_kind::hfp_reference);
    EXPECT_LT(r.rows[1].error, 1e-8 * std::max(1.0, std::abs(r.oracle_value)));
}

TEST(ConvergenceTable, ThreadCapDoesNotChangeResults)
{
    const auto before = convergence_table(eta_case(0.4, 2), range(10, 60, 10));
    ::setenv("HFPQUAD_THREADS", "1", 1);
    EXPECT_EQ(thread_limit(), 1u);
    const auto serial = convergence_table(eta_case(0.4, 2), range(10, 60, 10));
    ::unsetenv("HFPQUAD_THREADS");
    for (std::size_t i = 0; i < before.rows.size(); ++i) {
        EXPECT_EQ(before.rows[i].value, serial.rows[i].value);
    }
}

TEST(EmpiricalRate, HalfColumn)
{
    auto r = convergence_table(eta_case(0.5, 0), range(10, 40, 10));
    const auto fit = empirical_rate(r);
    EXPECT_NEAR(fit.slope, std::log(0.5), 0.1 * std::abs(std::log(0.5)));
    // n = 40 (2.27e-11) is within 100x of its floor estimate
    EXPECT_EQ(fit.rows_used, 3);
    EXPECT_FALSE(fit.floor_dominated);
    ASSERT_TRUE(r.fitted_rate.has_value());
    EXPECT_EQ(*r.fitted_rate, fit.slope);
}

TEST(EmpiricalRate, TwoTabulatedRowsAtTenth)
{
    // quadruple-precision errors at eta = 0.1, n = 10 and 20
    const auto rows = rows_from({10, 20}, {2.91e-10, 1.87e-20});
    EXPECT_THROW((void)empirical_rate(rows), error);
    const auto fit = empirical_rate(rows, 2);
    EXPECT_NEAR(fit.slope, std::log(0.1), 0.15 * std::abs(std::log(0.1)));
}

TEST(EmpiricalRate, FlatDataIsFloorDominated)
{
    const auto fit = empirical_rate(rows_from({10, 20, 30, 40}, {3e-14, 3e-14, 3e-14, 3e-14}));
    EXPECT_NEAR(fit.slope, 0.0, 1e-12);
    EXPECT_TRUE(fit.floor_dominated);
}

TEST(EmpiricalRate, InsufficientPreFloorData)
{
    auto rows = rows_from({10, 20, 30}, {1e-3, 1e-6, 1e-9});
    rows[1].floor = 1e-7;
    rows[2].floor = 1e-9;
    try {
        (void)empirical_rate(rows);
        FAIL() << "expected an exception";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::insufficient_data);
        EXPECT_NE(std::string(e.what()).find("insufficient pre-floor data"), std::string::npos);
    }
}

TEST(EmpiricalRate, MatchesLnEtaAcrossRules)
{
    for (double eta : {0.3, 0.4, 0.5}) {
        for (int s = 0; s <= 2; ++s) {
            auto r = convergence_table(eta_case(eta, s), range(4, 100, 2));
            const auto fit = empirical_rate(r);
            EXPECT_NEAR(fit.slope, std::log(eta), 0.1 * std::abs(std::log(eta)))
                << "eta=" << eta << " s=" << s;
        }
    }
}

TEST(FloorCheck, DoublePrecisionPlateau)
{
    const auto r = convergence_table(eta_case(0.1, 0), range(60, 100, 10));
    const auto cmp = floor_check(r, r.norms);
    EXPECT_TRUE(cmp.within);
    EXPECT_GT(cmp.plateau, 0.0);
    EXPECT_LT(cmp.plateau, 1e-12);
    EXPECT_EQ(cmp.safety_factor, 100.0);
}

TEST(FloorCheck, ZeroIntegrand)
{
    ConvergenceCase c;
    c.family = integrand_family::user_modes;
    c.modes = TrigPolynomial{{0.0}, {}};
    const auto r = convergence_table(c, {10, 20});
    const auto cmp = floor_check(r, r.norms);
    EXPECT_EQ(cmp.plateau, 0.0);
    EXPECT_TRUE(cmp.within);
}

TEST(FloorCheck, QuadruplePrecisionRows)
{
    // published quadruple-precision errors, eta = 0.1, n = 60..100
    ConvergenceReport r;
    r.config = eta_case(0.1, 0);
    r.rows = rows_from(range(60, 100, 10), {9.19e-32, 1.40e-29, 2.21e-29, 5.90e-29, 1.04e-30});
    const auto c = make_eta_integrand({0.1, 1.0});
    const auto norms = sampled_norms(c.integrand.g(), c.integrand.lower(), c.integrand.upper());
    const auto cmp = floor_check(r, norms, 100.0, 1.93e-34);
    EXPECT_TRUE(cmp.within);
    EXPECT_GT(cmp.floor, 1.18e-31);
}

TEST(SampledNorms, KnownFunction)
{
    const auto n = sampled_norms([](double x) { return std::sin(2.0 * x); }, 0.0, 2.0 * std::numbers::pi);
    EXPECT_NEAR(n.g, 1.0, 1e-5);
    EXPECT_NEAR(n.gp, 2.0, 1e-3);
    EXPECT_NEAR(n.gppp, 8.0, 1e-2);
}

TEST(Invariants, StrictDecreaseUntilFloor)
{
    for (double eta : {0.1, 0.3, 0.5}) {
        for (int s = 0; s <= 2; ++s) {
            // table grid; at finer spacing the sin(nt) factor makes the error oscillate
            const auto r = convergence_table(eta_case(eta, s), range(10, 100, 10));
            for (std::size_t i = 1; i < r.rows.size(); ++i) {
                if (r.rows[i].error <= 100.0 * r.rows[i].floor) {
                    break;
                }
                EXPECT_LT(r.rows[i].error, r.rows[i - 1].error)
                    << "eta=" << eta << " s=" << s << " n=" << r.rows[i].n;
            }
        }
    }
}

TEST(Invariants, RulesAgreeWithinFactorFour)
{
    for (double eta : {0.2, 0.3, 0.4, 0.5}) {
        std::vector<ConvergenceReport> reports;
        for (int s = 0; s <= 2; ++s) {
            reports.push_back(convergence_table(eta_case(eta, s), range(10, 60, 10)));
        }
        for (std::size_t i = 0; i < reports[0].rows.size(); ++i) {
            bool pre_floor = true;
            double lo = INFINITY;
            double hi = 0.0;
            for (const auto& r : reports) {
                pre_floor = pre_floor && r.rows[i].error > 100.0 * r.rows[i].floor;
                lo = std::min(lo, r.rows[i].error);
                hi = std::max(hi, r.rows[i].error);
            }
            if (pre_floor) {
                EXPECT_LE(hi, 4.0 * lo) << "eta=" << eta << " n=" << reports[0].rows[i].n;
            }
        }
    }
}
