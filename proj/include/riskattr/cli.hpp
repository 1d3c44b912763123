#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "riskattr/axioms.hpp"
#include "riskattr/bsm_scenarios.hpp"
#include "riskattr/csv.hpp"
#include "riskattr/errors.hpp"
#include "riskattr/euler.hpp"
#include "riskattr/game.hpp"
#include "riskattr/model_io.hpp"
#include "riskattr/models.hpp"
#include "riskattr/portfolio_opt.hpp"
#include "riskattr/report_io.hpp"
#include "riskattr/residuals.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/scenario_matrix.hpp"
#include "riskattr/shapley.hpp"

namespace riskattr::cli {

/// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_numeric_error = 2;
inline constexpr int exit_axiom_failure = 3;

struct GameOptions {
    std::string model_path;
    std::string input_path;
    std::string risk = "std"; // std | var | varq | cvar
    double alpha = 0.05;
    bool bessel = false;
    std::string baseline = "zeros"; // zeros | current | <csv path>
    std::string transform = "none"; // none | log-return
    std::string date_column;
    std::string residuals_path; // outcome CSV; enables residual augmentation
    unsigned threads = 1;
    std::size_t max_exact = 25;
};

struct AttributeOptions {
    GameOptions game;
    std::string method = "exact"; // exact | sampled
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    bool euler = false; // add the comparative Euler allocation to the report
    std::string csv_path;
    std::string svg_path;
};

struct BamOptions {
    std::string model_path;
    std::string explicand;          // inline "a,b,c" or CSV path (first row)
    std::string baseline = "zeros"; // zeros | inline | CSV path
    std::string method = "exact";
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t max_exact = 25;
    std::string csv_path;
    std::string svg_path;
};

struct OptimizeOptions {
    std::string input_path;
    double alpha = 0.05;
    std::string transform = "none";
    std::string date_column;
};

struct AxiomOptions {
    GameOptions game;
    bool demos = false; // run the built-in incompatibility demonstrations
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
};

struct BsmScenarioOptions {
    std::string input_path;
    std::string price_column = "price";
    std::string vol_column = "vol";
    std::string rate_column = "rate";
    std::string date_column;
    double strike = 0.0;
    double maturity = 0.0;
    std::string output_path;
    std::string baseline_output_path;
    std::string model_output_path;
};

namespace detail {

inline RiskMeasureSpec risk_from_flags(const std::string& name, double alpha, bool bessel) {
    RiskMeasureSpec spec;
    if (name == "std")
        spec = RiskMeasureSpec::std_dev();
    else if (name == "var")
        spec = RiskMeasureSpec::variance();
    else if (name == "varq")
        spec = RiskMeasureSpec::value_at_risk(alpha);
    else if (name == "cvar")
        spec = RiskMeasureSpec::cvar(alpha);
    else
        throw InputError("unknown risk measure '" + name + "' (use std|var|varq|cvar)");
    spec.bessel = bessel;
    spec.validate();
    return spec;
}

inline CsvOptions csv_options(const std::string& transform, const std::string& date_column) {
    CsvOptions options;
    options.date_column = date_column;
    if (transform == "log-return" || transform == "log_return")
        options.transform = CsvTransform::LogReturn;
    else if (transform != "none")
        throw InputError("unknown transform '" + transform + "' (use none|log-return)");
    return options;
}

/// "a,b,c" -> vector of doubles; returns false if any field fails to parse
/// (the caller then treats the string as a file path).
inline bool parse_inline_vector(const std::string& text, std::vector<double>& out) {
    out.clear();
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const char* first = text.data() + pos;
        const char* last = text.data() + comma;
        while (first < last && (*first == ' ' || *first == '\t')) ++first;
        while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
        if (first == last) return false;
        double value = 0.0;
        if (*first == '+') ++first;
        const auto result = std::from_chars(first, last, value);
        if (result.ec != std::errc{} || result.ptr != last || !std::isfinite(value))
            return false;
        out.push_back(value);
        if (comma == text.size()) break;
        pos = comma + 1;
    }
    return !out.empty();
}

inline std::vector<double> first_csv_row(const std::string& path) {
    const ScenarioMatrix matrix = load_csv(path, {});
    const auto row = matrix.values.row(0);
    return {row.begin(), row.end()};
}

/// Baseline flag for scenario games: "zeros", "current" (last input row),
/// or a CSV path whose first data row supplies the vector.
inline std::vector<double> resolve_baseline(const std::string& flag,
                                            const ScenarioMatrix& input) {
    const std::size_t m = input.n_cols();
    if (flag == "zeros") return std::vector<double>(m, 0.0);
    if (flag == "current") {
        const auto row = input.values.row(input.n_rows() - 1);
        return {row.begin(), row.end()};
    }
    auto baseline = first_csv_row(flag);
    if (baseline.size() != m)
        throw InputError("baseline file '" + flag + "' has " + std::to_string(baseline.size()) +
                         " columns, input has " + std::to_string(m));
    return baseline;
}

/// Point flag for BAM games: "zeros", inline comma list, or CSV path.
inline std::vector<double> resolve_point(const std::string& flag, std::size_t m,
                                         const char* what) {
    if (flag.empty()) throw InputError(std::string(what) + " is required");
    if (flag == "zeros") return std::vector<double>(m, 0.0);
    std::vector<double> values;
    if (!parse_inline_vector(flag, values)) values = first_csv_row(flag);
    if (values.size() != m)
        throw InputError(std::string(what) + " has " + std::to_string(values.size()) +
                         " values, model expects " + std::to_string(m));
    return values;
}

inline std::vector<double> outcome_column(const std::string& path,
                                          const std::string& date_column) {
    CsvOptions options;
    options.date_column = date_column;
    const ScenarioMatrix matrix = load_csv(path, options);
    return matrix.values.column(0);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw InputError("failed writing '" + path + "'");
}

struct BuiltGame {
    CharacteristicGame game;
    ShapleyOptions options;
};

/// Shared pipeline: load data + model, optionally fold residuals in as an
/// extra feature, resolve the baseline, assemble the SRAM game.
inline BuiltGame build_scenario_game(const GameOptions& options) {
    if (options.model_path.empty()) throw InputError("--model is required");
    if (options.input_path.empty()) throw InputError("--input is required");
    ScenarioMatrix scenarios =
        load_csv(options.input_path, csv_options(options.transform, options.date_column));
    ModelSpec model = load_model(options.model_path);
    std::vector<double> baseline = resolve_baseline(options.baseline, scenarios);

    if (!options.residuals_path.empty()) {
        const auto outcomes = outcome_column(options.residuals_path, options.date_column);
        scenarios = compute_residuals(scenarios, outcomes, model);
        model = ModelSpec(ResidualAugmented{model});
        baseline = augment_baseline(std::move(baseline));
    }

    const RiskMeasureSpec risk =
        risk_from_flags(options.risk, options.alpha, options.bessel);
    ShapleyOptions engine;
    engine.threads = options.threads;
    engine.max_exact_features = options.max_exact;
    return BuiltGame{
        CharacteristicGame(SramGame{std::move(model), std::move(baseline),
                                    std::move(scenarios), risk}),
        engine};
}

template <class Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return exit_numeric_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numeric_error;
    }
}

inline void side_outputs(const AttributionReport& report, const std::string& csv_path,
                         const std::string& svg_path) {
    if (!csv_path.empty()) {
        std::ostringstream buffer;
        report_to_csv(report, buffer);
        write_text_file(csv_path, buffer.str());
    }
    if (!svg_path.empty()) {
        std::ostringstream buffer;
        report_to_svg(report, buffer);
        write_text_file(svg_path, buffer.str());
    }
}

} // namespace detail

inline int run_attribute(const AttributeOptions& options, std::ostream& out,
                         std::ostream& err) {
    return detail::guarded(err, [&] {
        auto built = detail::build_scenario_game(options.game);
        AttributionReport report;
        if (options.method == "exact")
            report = shapley_exact(built.game, built.options);
        else if (options.method == "sampled")
            report = shapley_sampled(built.game, options.permutations, options.seed,
                                     built.options);
        else
            throw InputError("unknown method '" + options.method + "' (use exact|sampled)");

        OrderedJson j = report_to_json(report);
        if (options.euler) {
            const auto& game = built.game.as<SramGame>();
            if (!game.model.is<LinearPortfolio>())
                throw InputError("--euler requires a linear portfolio model");
            const auto euler = euler_allocation(
                game.scenarios, game.model.as<LinearPortfolio>().weights, game.risk);
            j["euler"] = euler_to_json(euler);
        }
        out << j.dump(2) << "\n";
        detail::side_outputs(report, options.csv_path, options.svg_path);
        return exit_ok;
    });
}

inline int run_bam(const BamOptions& options, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        if (options.model_path.empty()) throw InputError("--model is required");
        ModelSpec model = load_model(options.model_path);
        const std::size_t m = model.feature_count();
        auto baseline = detail::resolve_point(options.baseline, m, "--baseline");
        auto explicand = detail::resolve_point(options.explicand, m, "--explicand");

        ShapleyOptions engine;
        engine.threads = options.threads;
        engine.max_exact_features = options.max_exact;
        CharacteristicGame game(
            BamGame{std::move(model), std::move(baseline), std::move(explicand)});

        AttributionReport report;
        if (options.method == "exact")
            report = shapley_exact(game, engine);
        else if (options.method == "sampled")
            report = shapley_sampled(game, options.permutations, options.seed, engine);
        else
            throw InputError("unknown method '" + options.method + "' (use exact|sampled)");

        out << report_to_json(report).dump(2) << "\n";
        detail::side_outputs(report, options.csv_path, options.svg_path);
        return exit_ok;
    });
}

inline int run_optimize_cvar(const OptimizeOptions& options, std::ostream& out,
                             std::ostream& err) {
    return detail::guarded(err, [&] {
        if (options.input_path.empty()) throw InputError("--input is required");
        const ScenarioMatrix returns = load_csv(
            options.input_path, detail::csv_options(options.transform, options.date_column));
        const auto spec = RiskMeasureSpec::cvar(options.alpha);

        std::vector<double> before(returns.n_cols());
        for (std::size_t j = 0; j < returns.n_cols(); ++j)
            before[j] = evaluate(spec, returns.values.column(j));

        const CvarOptimum optimum = min_cvar_weights(returns, options.alpha);
        if (optimum.status == LpStatus::IterationLimit)
            err << "warning: simplex hit the iteration cap; reporting best feasible point\n";

        OrderedJson j;
        j["assets"] = returns.columns;
        j["weights"] = optimum.weights;
        j["cvar_before"] = before;
        j["cvar_after"] = optimum.cvar;
        j["lp_objective"] = optimum.lp_objective;
        j["status"] = lp_status_name(optimum.status);
        j["iterations"] = optimum.iterations;
        out << j.dump(2) << "\n";
        return exit_ok;
    });
}

inline int run_check_axioms(const AxiomOptions& options, std::ostream& out,
                            std::ostream& err) {
    return detail::guarded(err, [&] {
        if (options.demos) {
            const auto demo =
                demonstrate_incompatibilities(options.sigma1, options.sigma2, options.rho);
            OrderedJson j;
            j["linearity"] = {{"attr_f", demo.attr_f},
                              {"attr_g", demo.attr_g},
                              {"attr_sum", demo.attr_sum},
                              {"gap", demo.linearity_gap},
                              {"expected_gap", demo.expected_linearity_gap},
                              {"degenerate", demo.degenerate}};
            j["symmetric_monotonicity"] = {{"attr_f", demo.sm_attr_f},
                                           {"attr_g", demo.sm_attr_g},
                                           {"attr_h", demo.sm_attr_h},
                                           {"gap", demo.sm_gap},
                                           {"sigma_sq", demo.sm_sigma_sq},
                                           {"rho", demo.sm_rho}};
            j["lines"] = demo.lines();
            out << j.dump(2) << "\n";
            return exit_ok;
        }

        auto built = detail::build_scenario_game(options.game);
        const std::size_t m = built.game.feature_count();
        const auto table = enumerate_char_values(built.game, built.options.threads,
                                                 built.options.max_exact_features);
        const auto report = shapley_exact_from_table(table, built.game.feature_names());

        std::vector<AxiomVerdict> verdicts;
        verdicts.push_back(check_completeness(report, table.back(), table.front()));
        for (std::size_t i = 0; i < m; ++i) verdicts.push_back(check_dummy(table, report, i));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                verdicts.push_back(check_symmetry(table, report, i, j));
        for (std::size_t i = 0; i < m; ++i)
            verdicts.push_back(check_monotonicity_individual(table, report, i));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (i != j)
                    verdicts.push_back(check_monotonicity_pairwise(table, report, i, j));
        verdicts.push_back(check_subadditivity_bound(built.game, report));

        bool all_passed = true;
        OrderedJson list = OrderedJson::array();
        for (const auto& verdict : verdicts) {
            list.push_back(verdict_to_json(verdict));
            all_passed = all_passed && verdict.assertion_held;
        }
        OrderedJson j;
        j["verdicts"] = std::move(list);
        j["all_passed"] = all_passed;
        j["attributions"] = report.attributions;
        out << j.dump(2) << "\n";
        return all_passed ? exit_ok : exit_axiom_failure;
    });
}

inline int run_bsm_scenario(const BsmScenarioOptions& options, std::ostream& out,
                            std::ostream& err) {
    return detail::guarded(err, [&] {
        if (options.input_path.empty()) throw InputError("--input is required");
        if (options.output_path.empty()) throw InputError("--output is required");
        CsvOptions csv;
        csv.date_column = options.date_column;
        const ScenarioMatrix market = load_csv(options.input_path, csv);

        auto column = [&](const std::string& name) {
            return market.values.column(market.column_index(name));
        };
        const auto set = build_bsm_scenarios(column(options.price_column),
                                             column(options.vol_column),
                                             column(options.rate_column), options.strike,
                                             options.maturity, market.row_labels);
        save_csv(set.scenarios, options.output_path);

        if (!options.baseline_output_path.empty()) {
            ScenarioMatrix baseline_row;
            baseline_row.columns = set.scenarios.columns;
            baseline_row.values = Matrix(1, set.baseline.size());
            for (std::size_t j = 0; j < set.baseline.size(); ++j)
                baseline_row.values(0, j) = set.baseline[j];
            save_csv(baseline_row, options.baseline_output_path);
        }
        if (!options.model_output_path.empty())
            detail::write_text_file(options.model_output_path,
                                    model_to_json(set.model).dump(2) + "\n");

        OrderedJson j;
        j["scenarios"] = options.output_path;
        j["rows"] = set.scenarios.n_rows();
        j["columns"] = set.scenarios.columns;
        j["baseline"] = set.baseline;
        j["strike"] = options.strike;
        j["maturity"] = options.maturity;
        out << j.dump(2) << "\n";
        return exit_ok;
    });
}

} // namespace riskattr::cli
