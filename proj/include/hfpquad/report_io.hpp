#pragma once

// Canonical JSON and CSV output. Keys are sorted, floats use %.16e,
// non-finite floats become null; CSV has a header row, commas and LF.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfpquad/harness.hpp"

namespace hfpquad {

using json = nlohmann::json;

inline std::string format_float(double v)
{
    if (!std::isfinite(v)) {
        return "null";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace detail {

inline void emit_canonical(const json& j, std::string& out)
{
    switch (j.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        // nlohmann::json objects are std::map backed: keys iterate sorted
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ',';
            }
            first = false;
            out += json(it.key()).dump();
            out += ':';
            emit_canonical(it.value(), out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            emit_canonical(j[i], out);
        }
        out += ']';
        break;
    }
    case json::value_t::number_float:
        out += format_float(j.get<double>());
        break;
    default:
        out += j.dump();
        break;
    }
}

} // namespace detail

inline std::string canonical_json(const json& j)
{
    std::string out;
    detail::emit_canonical(j, out);
    out += '\n';
    return out;
}

inline json optional_float(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

inline json to_json(const ConvergenceReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"value", optional_float(row.value)},
                        {"error", optional_float(row.error)},
                        {"floor", optional_float(row.floor)}});
    }
    json c = {{"family", to_string(r.config.family)},
              {"m", r.config.m},
              {"s", r.config.s},
              {"t", r.config.t},
              {"T", r.config.period()},
              {"path", to_string(r.config.path)}};
    if (r.config.family == integrand_family::eta_oracle) {
        c["eta"] = r.config.eta;
    } else {
        c["cos"] = r.config.modes.cos_coeffs;
        c["sin"] = r.config.modes.sin_coeffs;
    }
    json out = {{"case", c},
                {"oracle", to_string(r.oracle)},
                {"oracle_value", optional_float(r.oracle_value)},
                {"rows", rows},
                {"floor_estimate", optional_float(r.floor_estimate)}};
    out["fitted_rate"] = r.fitted_rate ? json(*r.fitted_rate) : json(nullptr);
    return out;
}

/// Writes rows of cells with a header; cells are written verbatim.
inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows)
{
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                os << ',';
            }
            os << cells[i];
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
}

inline std::string csv_float(double v)
{
    return std::isfinite(v) ? format_float(v) : std::string();
}

inline std::string short_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Wide layout: one line per n, value and error columns per report. All
/// reports must share the same n list.
inline void write_table_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports)
{
    if (reports.empty()) {
        throw error(errc::invalid_argument, "write_table_csv: no reports");
    }
    std::vector<std::string> header{"n"};
    for (const auto& r : reports) {
        const std::string tag = r.config.family == integrand_family::eta_oracle
                                    ? "eta=" + short_label(r.config.eta)
                                    : "m=" + short_label(r.config.m);
        header.push_back("value(" + tag + ")");
        header.push_back("error(" + tag + ")");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < reports.front().rows.size(); ++i) {
        std::vector<std::string> cells{std::to_string(reports.front().rows[i].n)};
        for (const auto& r : reports) {
            if (r.rows.size() != reports.front().rows.size() ||
                r.rows[i].n != reports.front().rows[i].n) {
                throw error(errc::invalid_argument, "write_table_csv: mismatched n lists");
            }
            cells.push_back(csv_float(r.rows[i].value));
            cells.push_back(csv_float(r.rows[i].error));
        }
        rows.push_back(std::move(cells));
    }
    write_csv(os, header, rows);
}

} // namespace hfpquad
