#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hfpquad/cli.hpp"

namespace {

using hfpquad::cli::RunConfig;

struct RawFlags {
    std::string n = "20";
    std::vector<double> eta{0.5};
    std::string family = "eta-oracle";
    std::string path = "compact";
    std::string approach = "simple";
    std::string format = "csv";
};

void add_rule_flags(CLI::App* sub, RunConfig& c, RawFlags& raw)
{
    sub->add_option("--m", c.m, "singularity order");
    sub->add_option("--s", c.s, "extrapolation level");
    sub->add_option("--t", c.t, "singular point");
    sub->add_option("--path", raw.path, "compact or generic")
        ->check(CLI::IsMember({"compact", "generic"}));
    sub->add_option("--family", raw.family, "eta-oracle or user-modes")
        ->check(CLI::IsMember({"eta-oracle", "user-modes"}));
    sub->add_option("--cos", c.modes.cos_coeffs, "cosine coefficients a_0, a_1, ...")
        ->delimiter(',');
    sub->add_option("--sin", c.modes.sin_coeffs, "sine coefficients b_0, b_1, ... (b_0 unused)")
        ->delimiter(',');
}

void add_output_flags(CLI::App* sub, RunConfig& c, RawFlags& raw)
{
    sub->add_option("--format", raw.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", c.output_path, "output file (default stdout)");
}

} // namespace

int main(int argc, char** argv)
{
    using namespace hfpquad::cli;
    RunConfig c;
    RawFlags raw;

    CLI::App app{"Finite-part quadrature for periodic singular integrands"};
    app.require_subcommand(1);

    auto* quad = app.add_subcommand("quad", "single rule value");
    add_rule_flags(quad, c, raw);
    quad->add_option("--n", raw.n, "number of nodes");
    quad->add_option("--eta", raw.eta, "eta of the closed-form family")->delimiter(',');
    quad->add_flag("--oracle", c.oracle, "also print |error| against the oracle");
    add_output_flags(quad, c, raw);

    auto* table = app.add_subcommand("table", "convergence table");
    auto* rate = app.add_subcommand("rate", "fitted ln-error slope");
    for (auto* sub : {table, rate}) {
        add_rule_flags(sub, c, raw);
        sub->add_option("--n", raw.n, "start:stop:step or a comma list")->required();
        sub->add_option("--eta", raw.eta, "comma list of eta values")->delimiter(',');
        add_output_flags(sub, c, raw);
    }
    rate->add_option("--min-rows", c.min_rows, "minimum pre-floor rows");

    auto* ie = app.add_subcommand("solve-ie", "manufactured integral equation");
    ie->add_option("--approach", raw.approach, "simple or advanced")
        ->check(CLI::IsMember({"simple", "advanced"}));
    ie->add_option("--n", raw.n, "n (simple uses 4n nodes, advanced n)");
    ie->add_option("--lambda", c.lambda, "coefficient of phi");
    ie->add_option("--eta", raw.eta, "eta of the manufactured solution")->delimiter(',');
    add_output_flags(ie, c, raw);

    auto* floor = app.add_subcommand("floor", "roundoff floor K(n) u n^2");
    floor->add_option("--n", raw.n, "n or start:stop:step");
    floor->add_option("--gnorm", c.norms.g, "sup |g|");
    floor->add_option("--gpnorm", c.norms.gp, "sup |g'|");
    floor->add_option("--gpppnorm", c.norms.gppp, "sup |g'''|");
    floor->add_option("--T", c.period, "period");
    floor->add_option("--u", c.unit_roundoff, "unit roundoff");
    add_output_flags(floor, c, raw);

    // solve-ie defaults to the manufactured eta
    ie->preparse_callback([&raw](std::size_t) { raw.eta = {0.3}; raw.n = "16"; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (quad->parsed()) {
            c.cmd = command::quad;
        } else if (table->parsed()) {
            c.cmd = command::table;
        } else if (rate->parsed()) {
            c.cmd = command::rate;
        } else if (ie->parsed()) {
            c.cmd = command::solve_ie;
        } else {
            c.cmd = command::floor;
        }
        c.n_list = parse_n_list(raw.n);
        c.eta = raw.eta;
        c.family = raw.family == "user-modes" ? hfpquad::integrand_family::user_modes
                                              : hfpquad::integrand_family::eta_oracle;
        c.path = raw.path == "generic" ? hfpquad::rule_path::generic : hfpquad::rule_path::compact;
        c.method = raw.approach == "advanced" ? hfpquad::approach::advanced
                                              : hfpquad::approach::simple;
        c.format = raw.format == "json" ? output_format::json : output_format::csv;
    } catch (const hfpquad::error& e) {
        std::cerr << "error: " << hfpquad::to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    }
    return run(c, std::cout, std::cerr);
}
