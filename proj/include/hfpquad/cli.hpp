#pragma once

// Command runners behind the hfpquad executable. Argument parsing lives in
// tools/hfpquad.cpp; everything here takes a RunConfig and streams.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hfpquad/harness.hpp"
#include "hfpquad/ie_solver.hpp"
#include "hfpquad/oracles.hpp"
#include "hfpquad/quadrature.hpp"
#include "hfpquad/report_io.hpp"

namespace hfpquad::cli {

enum class command { quad, table, rate, solve_ie, floor };
enum class output_format { csv, json };

struct RunConfig {
    command cmd = command::quad;
    int m = 3;
    int s = 0;
    std::vector<int> n_list{20};
    integrand_family family = integrand_family::eta_oracle;
    std::vector<double> eta{0.5};
    double t = 1.0;
    bool oracle = false;
    rule_path path = rule_path::compact;
    TrigPolynomial modes;
    double lambda = 1.0;
    approach method = approach::simple;
    output_format format = output_format::csv;
    std::string output_path;
    FloorNorms norms{1.0, 0.0, 0.0};
    double period = two_pi;
    double unit_roundoff = double_unit_roundoff;
    int min_rows = 3;
};

/// "start:stop:step" (inclusive) or a comma list.
inline std::vector<int> parse_n_list(std::string_view text)
{
    auto to_int = [text](std::string_view piece) {
        int v = 0;
        const auto* end = piece.data() + piece.size();
        const auto [p, ec] = std::from_chars(piece.data(), end, v);
        if (ec != std::errc{} || p != end) {
            throw error(errc::invalid_argument, "bad n specification '" + std::string(text) + "'");
        }
        return v;
    };
    std::vector<int> out;
    if (text.find(':') != std::string_view::npos) {
        const auto c1 = text.find(':');
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
            throw error(errc::invalid_argument,
                        "n range must be start:stop:step (got '" + std::string(text) + "')");
        }
        const int start = to_int(text.substr(0, c1));
        const int stop = to_int(text.substr(c1 + 1, c2 - c1 - 1));
        const int step = to_int(text.substr(c2 + 1));
        if (step <= 0 || stop < start) {
            throw error(errc::invalid_argument,
                        "n range needs step > 0 and stop >= start (got '" + std::string(text) + "')");
        }
        for (int n = start; n <= stop; n += step) {
            out.push_back(n);
        }
        return out;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
        out.push_back(to_int(piece));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

inline ConvergenceCase make_case(const RunConfig& c, double eta)
{
    ConvergenceCase k;
    k.family = c.family;
    k.m = c.m;
    k.s = c.s;
    k.eta = eta;
    k.t = c.t;
    k.modes = c.modes;
    k.path = c.path;
    return k;
}

/// Rejects inconsistent parameter combinations before any computation.
inline void validate(const RunConfig& c)
{
    auto fail = [](const std::string& msg) { throw error(errc::invalid_argument, msg); };
    if (c.n_list.empty()) {
        fail("--n is required");
    }
    for (int n : c.n_list) {
        if (n < 1) {
            fail("n must be positive");
        }
    }
    switch (c.cmd) {
    case command::quad:
    case command::table:
    case command::rate:
        if (c.m < 1) {
            fail("--m must be >= 1");
        }
        if (c.s < 0) {
            fail("--s must be >= 0");
        }
        if (c.path == rule_path::compact && !has_compact_rule(c.m, c.s)) {
            throw error(errc::unsupported_rule, "no compact rule for (m=" + std::to_string(c.m) +
                                                    ", s=" + std::to_string(c.s) +
                                                    "); use --path generic");
        }
        if (c.family == integrand_family::eta_oracle) {
            if (c.m != 3) {
                fail("eta-oracle family requires --m 3");
            }
            if (c.eta.empty()) {
                fail("--eta is required for the eta-oracle family");
            }
            for (double e : c.eta) {
                detail::check_eta(e);
            }
        } else if (c.modes.cos_coeffs.empty() && c.modes.sin_coeffs.empty()) {
            fail("user-modes family needs --cos and/or --sin coefficients");
        }
        if (c.cmd == command::quad && c.n_list.size() != 1) {
            fail("quad takes a single --n");
        }
        if (c.cmd == command::quad && c.eta.size() != 1 &&
            c.family == integrand_family::eta_oracle) {
            fail("quad takes a single --eta");
        }
        break;
    case command::solve_ie:
        if (c.n_list.size() != 1) {
            fail("solve-ie takes a single --n");
        }
        if (c.eta.size() != 1) {
            fail("solve-ie takes a single --eta");
        }
        detail::check_eta(c.eta.front());
        if (c.method == approach::advanced && c.n_list.front() % 2 != 0) {
            throw error(errc::odd_n_unsupported,
                        "odd n unsupported (n=" + std::to_string(c.n_list.front()) + ")");
        }
        break;
    case command::floor:
        if (!(c.period > 0.0) || !(c.unit_roundoff > 0.0)) {
            fail("--T and --u must be positive");
        }
        if (c.norms.g < 0.0 || c.norms.gp < 0.0 || c.norms.gppp < 0.0) {
            fail("norms must be non-negative");
        }
        break;
    }
}

inline void cmd_quad(const RunConfig& c, std::ostream& os)
{
    const auto k = make_case(c, c.eta.front());
    const auto prepared = prepare_case(k);
    const int n = c.n_list.front();
    const double value = t_hat({c.m, c.s, n, c.path}, prepared.integrand.integrand);
    std::optional<double> err;
    if (c.oracle) {
        err = std::abs(value - prepared.oracle_value);
    }
    if (c.format == output_format::json) {
        json j = {{"m", c.m}, {"s", c.s}, {"n", n}, {"t", c.t}, {"value", value},
                  {"path", to_string(c.path)}, {"family", to_string(c.family)}};
        if (c.family == integrand_family::eta_oracle) {
            j["eta"] = k.eta;
        }
        if (err) {
            j["error"] = *err;
            j["oracle"] = to_string(prepared.oracle);
            j["oracle_value"] = prepared.oracle_value;
        }
        os << canonical_json(j);
        return;
    }
    write_csv(os, {"m", "s", "n", "t", "value", "error"},
              {{std::to_string(c.m), std::to_string(c.s), std::to_string(n), format_float(c.t),
                format_float(value), err ? format_float(*err) : std::string()}});
}

inline std::vector<ConvergenceReport> run_tables(const RunConfig& c)
{
    std::vector<ConvergenceReport> out;
    if (c.family == integrand_family::eta_oracle) {
        for (double e : c.eta) {
            out.push_back(convergence_table(make_case(c, e), c.n_list));
        }
    } else {
        out.push_back(convergence_table(make_case(c, 0.0), c.n_list));
    }
    return out;
}

inline void cmd_table(const RunConfig& c, std::ostream& os)
{
    const auto reports = run_tables(c);
    if (c.format == output_format::json) {
        json arr = json::array();
        for (const auto& r : reports) {
            arr.push_back(to_json(r));
        }
        os << canonical_json({{"command", "table"}, {"reports", arr}});
        return;
    }
    write_table_csv(os, reports);
}

inline void cmd_rate(const RunConfig& c, std::ostream& os)
{
    auto reports = run_tables(c);
    std::vector<RateFit> fits;
    for (auto& r : reports) {
        fits.push_back(empirical_rate(r, c.min_rows));
    }
    if (c.format == output_format::json) {
        json arr = json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            auto j = to_json(reports[i]);
            j["rows_used"] = fits[i].rows_used;
            j["floor_dominated"] = fits[i].floor_dominated;
            arr.push_back(j);
        }
        os << canonical_json({{"command", "rate"}, {"reports", arr}});
        return;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& k = reports[i].config;
        const bool eta_family = k.family == integrand_family::eta_oracle;
        rows.push_back({eta_family ? format_float(k.eta) : std::string(),
                        std::to_string(k.s), format_float(fits[i].slope),
                        eta_family && k.eta > 0.0 ? format_float(std::log(k.eta)) : std::string(),
                        std::to_string(fits[i].rows_used),
                        fits[i].floor_dominated ? "1" : "0"});
    }
    write_csv(os, {"eta", "s", "slope", "ln_eta", "rows_used", "floor_dominated"}, rows);
}

struct IeRun {
    CollocationSolution solution;
    std::vector<double> exact;
    double max_error = 0.0;
};

/// Manufactured problem: theta_3 kernel on [0, 2 pi], phi = poisson_u(eta).
inline IeRun solve_manufactured(approach method, int n, double lambda, double eta)
{
    const auto kernel = theta3_kernel(0.0, two_pi);
    auto phi = [eta](double x) { return poisson_u(eta, x); };
    const auto w = manufactured_rhs(kernel, phi, lambda);
    const auto sys = method == approach::simple ? build_simple_system(kernel, w, lambda, n)
                                                : build_advanced_system(kernel, w, lambda, n);
    IeRun run;
    run.solution = solve_collocation(sys);
    for (std::size_t i = 0; i < run.solution.grid.size(); ++i) {
        const double exact = phi(run.solution.grid[i]);
        run.exact.push_back(exact);
        run.max_error = std::max(run.max_error, std::abs(run.solution.phi[i] - exact));
    }
    return run;
}

inline void cmd_solve_ie(const RunConfig& c, std::ostream& os, std::ostream& log)
{
    const int n = c.n_list.front();
    const auto run = solve_manufactured(c.method, n, c.lambda, c.eta.front());
    const auto& sol = run.solution;
    const char* name = c.method == approach::simple ? "simple" : "advanced";
    if (c.format == output_format::json) {
        json nodes = json::array();
        for (std::size_t i = 0; i < sol.grid.size(); ++i) {
            nodes.push_back({{"x", sol.grid[i]}, {"phi", sol.phi[i]}, {"exact", run.exact[i]}});
        }
        os << canonical_json({{"command", "solve-ie"},
                              {"approach", name},
                              {"n", n},
                              {"lambda", c.lambda},
                              {"eta", c.eta.front()},
                              {"nodes", nodes},
                              {"max_error", run.max_error},
                              {"residual_max", sol.residual_max},
                              {"condition_estimate", optional_float(sol.condition_estimate)}});
        return;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        rows.push_back({format_float(sol.grid[i]), format_float(sol.phi[i]),
                        format_float(run.exact[i]),
                        format_float(std::abs(sol.phi[i] - run.exact[i]))});
    }
    write_csv(os, {"x", "phi", "exact", "error"}, rows);
    log << "max_error " << format_float(run.max_error) << '\n';
}

inline void cmd_floor(const RunConfig& c, std::ostream& os)
{
    std::vector<std::vector<std::string>> rows;
    json arr = json::array();
    for (int n : c.n_list) {
        const double f = roundoff_floor(c.norms, c.period, n, c.unit_roundoff);
        rows.push_back({std::to_string(n), format_float(f)});
        arr.push_back({{"n", n}, {"floor", f}});
    }
    if (c.format == output_format::json) {
        os << canonical_json({{"command", "floor"},
                              {"T", c.period},
                              {"u", c.unit_roundoff},
                              {"gnorm", c.norms.g},
                              {"gpnorm", c.norms.gp},
                              {"gpppnorm", c.norms.gppp},
                              {"rows", arr}});
        return;
    }
    write_csv(os, {"n", "floor"}, rows);
}

/// Validates and runs one command. Returns 0 on success; any module error
/// is reported as a single line on err and yields 1.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    try {
        validate(c);
        std::ostringstream buffer;
        switch (c.cmd) {
        case command::quad:
            cmd_quad(c, buffer);
            break;
        case command::table:
            cmd_table(c, buffer);
            break;
        case command::rate:
            cmd_rate(c, buffer);
            break;
        case command::solve_ie:
            cmd_solve_ie(c, buffer, err);
            break;
        case command::floor:
            cmd_floor(c, buffer);
            break;
        }
        if (c.output_path.empty()) {
            out << buffer.str();
            out.flush();
        } else {
            std::ofstream file(c.output_path, std::ios::binary);
            if (!file) {
                throw error(errc::io_error, "cannot open '" + c.output_path + "' for writing");
            }
            file << buffer.str();
            file.close();
            if (!file) {
                throw error(errc::io_error, "failed writing '" + c.output_path + "'");
            }
        }
        return 0;
    } catch (const error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return 1;
}

} // namespace hfpquad::cli
