// riskattr: risk attribution and CVaR optimization over scenario data.
//
// Subcommands: attribute, bam, optimize-cvar, check-axioms, bsm-scenario.
// Machine-readable JSON goes to stdout, diagnostics to stderr.
// Exit codes: 0 ok, 1 input error, 2 numeric/guard error, 3 axiom failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riskattr/cli.hpp"

namespace {

void add_game_flags(CLI::App* cmd, riskattr::cli::GameOptions& game) {
    cmd->add_option("--model", game.model_path, "model JSON file")->required();
    cmd->add_option("--input", game.input_path, "scenario CSV file")->required();
    cmd->add_option("--risk", game.risk, "risk measure: std|var|varq|cvar")
        ->default_str("std");
    cmd->add_option("--alpha", game.alpha, "tail level for varq/cvar")->default_str("0.05");
    cmd->add_flag("--bessel", game.bessel, "use the n-1 denominator for std/var");
    cmd->add_option("--baseline", game.baseline, "zeros|current|<csv path>")
        ->default_str("zeros");
    cmd->add_option("--transform", game.transform, "input transform: none|log-return")
        ->default_str("none");
    cmd->add_option("--date-column", game.date_column, "label column to strip from the CSV");
    cmd->add_option("--residuals", game.residuals_path,
                    "outcome CSV; appends the idiosyncratic residual feature");
    cmd->add_option("--threads", game.threads, "worker threads")->default_str("1");
    cmd->add_option("--max-exact", game.max_exact, "exact-enumeration feature guard")
        ->default_str("25");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk attribution via baseline Shapley over risk measures"};
    // 0 allows a config file section to trigger the subcommand instead
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "INI config file; [subcommand] sections mirror the flags");
    app.get_formatter()->column_width(34);

    riskattr::cli::AttributeOptions attribute;
    auto* cmd_attribute =
        app.add_subcommand("attribute", "allocate scenario risk across model features");
    cmd_attribute->configurable();
    add_game_flags(cmd_attribute, attribute.game);
    cmd_attribute->add_option("--method", attribute.method, "exact|sampled")
        ->default_str("exact");
    cmd_attribute->add_option("--permutations", attribute.permutations,
                              "permutation count for --method sampled")
        ->default_str("1000");
    cmd_attribute->add_option("--seed", attribute.seed, "RNG seed for --method sampled")
        ->default_str("0");
    cmd_attribute->add_flag("--euler", attribute.euler,
                            "also report the Euler allocation (linear models)");
    cmd_attribute->add_option("--csv", attribute.csv_path, "write the report as CSV");
    cmd_attribute->add_option("--svg", attribute.svg_path, "write a bar chart SVG");

    riskattr::cli::BamOptions bam;
    auto* cmd_bam = app.add_subcommand("bam", "explain one prediction against a baseline");
    cmd_bam->configurable();
    cmd_bam->add_option("--model", bam.model_path, "model JSON file")->required();
    cmd_bam->add_option("--explicand", bam.explicand, "point to explain: 'a,b,c' or CSV path")
        ->required();
    cmd_bam->add_option("--baseline", bam.baseline, "zeros|'a,b,c'|<csv path>")
        ->default_str("zeros");
    cmd_bam->add_option("--method", bam.method, "exact|sampled")->default_str("exact");
    cmd_bam->add_option("--permutations", bam.permutations, "permutation count")
        ->default_str("1000");
    cmd_bam->add_option("--seed", bam.seed, "RNG seed")->default_str("0");
    cmd_bam->add_option("--threads", bam.threads, "worker threads")->default_str("1");
    cmd_bam->add_option("--max-exact", bam.max_exact, "exact-enumeration feature guard")
        ->default_str("25");
    cmd_bam->add_option("--csv", bam.csv_path, "write the report as CSV");
    cmd_bam->add_option("--svg", bam.svg_path, "write a bar chart SVG");

    riskattr::cli::OptimizeOptions optimize;
    auto* cmd_optimize =
        app.add_subcommand("optimize-cvar", "long-only minimum-CVaR portfolio weights");
    cmd_optimize->configurable();
    cmd_optimize->add_option("--input", optimize.input_path, "return scenario CSV")->required();
    cmd_optimize->add_option("--alpha", optimize.alpha, "CVaR tail level")->default_str("0.05");
    cmd_optimize->add_option("--transform", optimize.transform, "none|log-return")
        ->default_str("none");
    cmd_optimize->add_option("--date-column", optimize.date_column,
                             "label column to strip from the CSV");

    riskattr::cli::AxiomOptions axioms;
    auto* cmd_axioms =
        app.add_subcommand("check-axioms", "verify allocation axioms on a scenario game");
    cmd_axioms->configurable();
    add_game_flags(cmd_axioms, axioms.game);
    cmd_axioms->add_flag("--demos", axioms.demos,
                         "run the built-in incompatibility demonstrations instead");
    cmd_axioms->add_option("--sigma1", axioms.sigma1, "demo volatility 1")->default_str("1");
    cmd_axioms->add_option("--sigma2", axioms.sigma2, "demo volatility 2")->default_str("1");
    cmd_axioms->add_option("--rho", axioms.rho, "demo correlation")->default_str("0");
    // --demos needs neither a model nor an input file
    cmd_axioms->get_option("--model")->required(false);
    cmd_axioms->get_option("--input")->required(false);

    riskattr::cli::BsmScenarioOptions bsm;
    auto* cmd_bsm = app.add_subcommand(
        "bsm-scenario", "build option repricing scenarios from market history");
    cmd_bsm->configurable();
    cmd_bsm->add_option("--input", bsm.input_path, "market CSV with price/vol/rate columns")
        ->required();
    cmd_bsm->add_option("--strike", bsm.strike, "option strike")->required();
    cmd_bsm->add_option("--maturity", bsm.maturity, "option maturity in years")->required();
    cmd_bsm->add_option("--output", bsm.output_path, "scenario CSV to write")->required();
    cmd_bsm->add_option("--baseline-output", bsm.baseline_output_path,
                        "one-row baseline CSV to write");
    cmd_bsm->add_option("--model-output", bsm.model_output_path, "model JSON to write");
    cmd_bsm->add_option("--price-column", bsm.price_column, "price column name")
        ->default_str("price");
    cmd_bsm->add_option("--vol-column", bsm.vol_column, "volatility column name")
        ->default_str("vol");
    cmd_bsm->add_option("--rate-column", bsm.rate_column, "rate column name")
        ->default_str("rate");
    cmd_bsm->add_option("--date-column", bsm.date_column, "label column to strip");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return riskattr::cli::exit_input_error;
    }

    if (cmd_attribute->parsed())
        return riskattr::cli::run_attribute(attribute, std::cout, std::cerr);
    if (cmd_bam->parsed()) return riskattr::cli::run_bam(bam, std::cout, std::cerr);
    if (cmd_optimize->parsed())
        return riskattr::cli::run_optimize_cvar(optimize, std::cout, std::cerr);
    if (cmd_axioms->parsed())
        return riskattr::cli::run_check_axioms(axioms, std::cout, std::cerr);
    if (cmd_bsm->parsed()) return riskattr::cli::run_bsm_scenario(bsm, std::cout, std::cerr);
    std::cerr << "error: expected a subcommand (see --help)\n";
    return riskattr::cli::exit_input_error;
}
