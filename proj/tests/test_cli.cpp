#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "support/common.hpp"
#include "support/oracles.hpp"

using nlohmann::json;
using testsup::run_cli;

namespace {

std::string demo_model() {
    return (testsup::data_dir() / "linear_demo_model.json").string();
}

std::string demo_returns() {
    return (testsup::data_dir() / "linear_demo_returns.csv").string();
}

} // namespace

TEST_CASE("attribute splits the demo portfolio risk", "[cli]") {
    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    demo_returns() + " --risk std --euler",
                                "attr_demo");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["features"] == std::vector<std::string>{"a1", "a2"});
    REQUIRE_THAT(double(j["attributions"][0]), Catch::Matchers::WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(double(j["attributions"][1]), Catch::Matchers::WithinAbs(3.0, 1e-12));
    REQUIRE_THAT(double(j["v_full"]), Catch::Matchers::WithinAbs(5.0, 1e-12));
    REQUIRE(j["method"] == "exact");
    REQUIRE(std::abs(double(j["completeness_residual"])) <= 1e-12);
    // marginal (Euler) split of the same 5.0: covariance shares, not Shapley
    REQUIRE_THAT(double(j["euler"]["allocations"][0]), Catch::Matchers::WithinAbs(1.8, 1e-12));
    REQUIRE_THAT(double(j["euler"]["allocations"][1]), Catch::Matchers::WithinAbs(3.2, 1e-12));
}

TEST_CASE("sampled runs with one seed are byte-identical", "[cli]") {
    const std::string args = "attribute --model " + demo_model() + " --input " + demo_returns() +
                             " --risk cvar --alpha 0.5 --method sampled --permutations 200" +
                             " --seed 7";
    const auto first = run_cli(args, "sampled_a");
    const auto second = run_cli(args, "sampled_b");
    REQUIRE(first.exit_code == 0);
    REQUIRE(first.out == second.out);
    const json j = json::parse(first.out);
    REQUIRE(j["method"] == "sampled");
    REQUIRE(j["permutations"] == 200);
    REQUIRE(j["seed"] == 7);
    REQUIRE(j["stderr"].size() == 2);
}

TEST_CASE("attribute writes csv and svg side outputs", "[cli]") {
    const auto csv_path = (testsup::tmp_dir() / "cli_report.csv").string();
    const auto svg_path = (testsup::tmp_dir() / "cli_report.svg").string();
    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    demo_returns() + " --csv " + csv_path + " --svg " + svg_path,
                                "attr_side");
    REQUIRE(result.exit_code == 0);
    const std::string csv = testsup::read_file(csv_path);
    REQUIRE(csv.rfind("feature,attribution\n", 0) == 0);
    REQUIRE(csv.find("a1,2\n") != std::string::npos);
    const std::string svg = testsup::read_file(svg_path);
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("a2") != std::string::npos);
}

TEST_CASE("input problems exit 1 with a diagnostic", "[cli]") {
    const auto missing = run_cli("attribute --model " + demo_model() +
                                     " --input /nonexistent/returns.csv",
                                 "missing_input");
    REQUIRE(missing.exit_code == 1);
    REQUIRE(missing.err.find("error:") != std::string::npos);
    REQUIRE(missing.out.empty());

    const auto bad_risk = run_cli("attribute --model " + demo_model() + " --input " +
                                      demo_returns() + " --risk downside",
                                  "bad_risk");
    REQUIRE(bad_risk.exit_code == 1);
    REQUIRE(bad_risk.err.find("std|var|varq|cvar") != std::string::npos);

    const auto bad_alpha = run_cli("attribute --model " + demo_model() + " --input " +
                                       demo_returns() + " --risk cvar --alpha 1.5",
                                   "bad_alpha");
    REQUIRE(bad_alpha.exit_code == 1);

    const auto bad_flag = run_cli("attribute --frobnicate", "bad_flag");
    REQUIRE(bad_flag.exit_code == 1);

    const auto no_subcommand = run_cli("", "no_subcommand");
    REQUIRE(no_subcommand.exit_code == 1);
    REQUIRE(no_subcommand.err.find("subcommand") != std::string::npos);
}

TEST_CASE("enumeration guard surfaces as exit 2", "[cli]") {
    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    demo_returns() + " --max-exact 1",
                                "guard");
    REQUIRE(result.exit_code == 2);
    REQUIRE(result.err.find("shapley_sampled") != std::string::npos);
}

TEST_CASE("bam explains a linear prediction move", "[cli]") {
    const auto result = run_cli("bam --model " + demo_model() +
                                    " --explicand=10,100 --baseline=1,1",
                                "bam_linear");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE_THAT(double(j["attributions"][0]), Catch::Matchers::WithinAbs(9.0, 1e-12));
    REQUIRE_THAT(double(j["attributions"][1]), Catch::Matchers::WithinAbs(99.0, 1e-12));
    REQUIRE_THAT(double(j["v_full"]), Catch::Matchers::WithinAbs(110.0, 1e-12));

    const auto at_base = run_cli("bam --model " + demo_model() +
                                     " --explicand=1,1 --baseline=1,1",
                                 "bam_zero");
    const json jz = json::parse(at_base.out);
    REQUIRE(double(jz["attributions"][0]) == 0.0);
    REQUIRE(double(jz["attributions"][1]) == 0.0);
}

TEST_CASE("bam on the option model telescopes to the price move", "[cli]") {
    const auto model = (testsup::data_dir() / "bsm_call_900.json").string();
    const auto result = run_cli("bam --model " + model +
                                    " --explicand=6.8,-1.3,-3.0 --baseline=6.9,-1.35,-3.05",
                                "bam_bsm");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["features"].size() == 3);
    const double total = double(j["attributions"][0]) + double(j["attributions"][1]) +
                         double(j["attributions"][2]);
    REQUIRE_THAT(total, Catch::Matchers::WithinAbs(
                            double(j["v_full"]) - double(j["v_empty"]), 1e-9));
    // spot fell from e^6.9 to e^6.8, so the price leg must hurt the call
    REQUIRE(double(j["attributions"][0]) < 0.0);
}

TEST_CASE("optimize-cvar flees to the risk-free asset", "[cli]") {
    std::string csv = "cash,risky\n";
    const double risky[10] = {0.05, -0.04, 0.02, -0.03, 0.01,
                              0.04, -0.05, 0.03, -0.01, 0.02};
    for (int rep = 0; rep < 3; ++rep)
        for (double r : risky) {
            char line[64];
            std::snprintf(line, sizeof(line), "0.001,%g\n", r);
            csv += line;
        }
    const auto path = testsup::tmp_dir() / "opt_returns.csv";
    testsup::write_file(path, csv);

    const auto result = run_cli("optimize-cvar --input " + path.string() + " --alpha 0.1",
                                "optimize");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["assets"] == std::vector<std::string>{"cash", "risky"});
    REQUIRE(j["status"] == "optimal");
    REQUIRE_THAT(double(j["weights"][0]), Catch::Matchers::WithinAbs(1.0, 1e-9));
    const double wsum = double(j["weights"][0]) + double(j["weights"][1]);
    REQUIRE_THAT(wsum, Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(double(j["cvar_after"]), Catch::Matchers::WithinAbs(-0.001, 1e-9));
    REQUIRE(j["cvar_before"].size() == 2);
    REQUIRE_THAT(double(j["cvar_after"]),
                 Catch::Matchers::WithinAbs(double(j["lp_objective"]), 1e-8));
}

TEST_CASE("check-axioms passes on the demo game", "[cli]") {
    const auto result = run_cli("check-axioms --model " + demo_model() + " --input " +
                                    demo_returns() + " --risk std",
                                "axioms_demo");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["all_passed"] == true);
    REQUIRE(j["verdicts"].size() >= 6);
    REQUIRE_THAT(double(j["attributions"][0]), Catch::Matchers::WithinAbs(2.0, 1e-12));
    bool saw_subadditivity = false;
    for (const auto& verdict : j["verdicts"]) {
        REQUIRE(verdict["assertion_held"] == true);
        if (verdict["check"] == "subadditivity_bound") saw_subadditivity = true;
    }
    REQUIRE(saw_subadditivity);
}

TEST_CASE("check-axioms demos expose the linearity gap", "[cli]") {
    const auto result = run_cli("check-axioms --demos", "axioms_demos");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE_THAT(double(j["linearity"]["expected_gap"]),
                 Catch::Matchers::WithinAbs(2.0 - std::sqrt(2.0), 1e-12));
    REQUIRE_THAT(double(j["linearity"]["gap"]),
                 Catch::Matchers::WithinAbs(2.0 - std::sqrt(2.0), 1e-10));
    REQUIRE(j["linearity"]["degenerate"] == false);
    REQUIRE_THAT(double(j["symmetric_monotonicity"]["gap"]),
                 Catch::Matchers::WithinAbs(5.4, 1e-10));
    REQUIRE(j["lines"].size() == 2);

    const auto collapsed = run_cli("check-axioms --demos --rho 1", "axioms_demos_rho1");
    const json jc = json::parse(collapsed.out);
    REQUIRE(jc["linearity"]["degenerate"] == true);
}

TEST_CASE("bsm-scenario output feeds straight back into attribute", "[cli]") {
    const auto market = (testsup::data_dir() / "synthetic_market.csv").string();
    const auto scen = (testsup::tmp_dir() / "bsm_scenarios.csv").string();
    const auto base = (testsup::tmp_dir() / "bsm_baseline.csv").string();
    const auto model = (testsup::tmp_dir() / "bsm_model.json").string();
    const auto built = run_cli("bsm-scenario --input " + market +
                                   " --date-column date --strike 900" +
                                   " --maturity 0.0821917808219178 --output " + scen +
                                   " --baseline-output " + base + " --model-output " + model,
                               "bsm_build");
    CAPTURE(built.err);
    REQUIRE(built.exit_code == 0);
    const json meta = json::parse(built.out);
    REQUIRE(meta["rows"] == 252);
    REQUIRE(meta["columns"] ==
            std::vector<std::string>{"log_price", "log_vol", "log_rate"});
    REQUIRE(meta["baseline"].size() == 3);

    const auto attributed = run_cli("attribute --model " + model + " --input " + scen +
                                        " --date-column date --baseline " + base +
                                        " --risk std",
                                    "bsm_attr");
    CAPTURE(attributed.err);
    REQUIRE(attributed.exit_code == 0);
    const json j = json::parse(attributed.out);
    const double price = j["attributions"][0];
    const double vol = j["attributions"][1];
    const double rate = j["attributions"][2];
    REQUIRE(rate < vol);
    REQUIRE(vol < price);
    REQUIRE(std::abs(double(j["completeness_residual"])) <=
            1e-9 * std::max(1.0, double(j["v_full"])));
}

TEST_CASE("log-return transform runs end to end", "[cli]") {
    std::string csv = "p1,p2\n100,100\n110,90\n121,81\n";
    const auto path = testsup::tmp_dir() / "prices.csv";
    testsup::write_file(path, csv);
    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    path.string() + " --transform log-return --risk std",
                                "logret");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    // both return columns are constant, so the portfolio has zero risk
    REQUIRE_THAT(double(j["v_full"]), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("residual augmentation adds an inert constant-error feature", "[cli]") {
    // outcomes = model output + 1: the residual column is constant, and a
    // constant shift is invisible to std, so the new feature earns zero
    std::string outcomes = "y\n8\n2\n0\n-6\n";
    const auto path = testsup::tmp_dir() / "outcomes.csv";
    testsup::write_file(path, outcomes);
    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    demo_returns() + " --residuals " + path.string() +
                                    " --risk std",
                                "residuals");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE(j["features"] ==
            std::vector<std::string>{"a1", "a2", "idiosyncratic"});
    REQUIRE(std::abs(double(j["attributions"][2])) <= 1e-12);
}

TEST_CASE("config file drives a full attribute run", "[cli]") {
    std::string ini = "[attribute]\n";
    ini += "model=\"" + demo_model() + "\"\n";
    ini += "input=\"" + demo_returns() + "\"\n";
    ini += "risk=std\n";
    const auto path = testsup::tmp_dir() / "run.ini";
    testsup::write_file(path, ini);
    const auto result = run_cli("--config " + path.string(), "config");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    REQUIRE_THAT(double(j["attributions"][0]), Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("large gaussian sample recovers the analytic split", "[cli]") {
    const std::size_t n = 200000;
    oracles::NormalSource source(987654321);
    std::string csv;
    csv.reserve(n * 24 + 16);
    csv += "g1,g2\n";
    char line[64];
    for (std::size_t t = 0; t < n; ++t) {
        std::snprintf(line, sizeof(line), "%.10g,%.10g\n", 3.0 * source.normal(),
                      4.0 * source.normal());
        csv += line;
    }
    const auto path = testsup::tmp_dir() / "gaussian_34.csv";
    testsup::write_file(path, csv);

    const auto result = run_cli("attribute --model " + demo_model() + " --input " +
                                    path.string() + " --risk std",
                                "gaussian34");
    CAPTURE(result.err);
    REQUIRE(result.exit_code == 0);
    const json j = json::parse(result.out);
    // independent sigma (3, 4) splits as (2, 3); 200k draws pin it within 2%
    REQUIRE_THAT(double(j["attributions"][0]), Catch::Matchers::WithinRel(2.0, 0.02));
    REQUIRE_THAT(double(j["attributions"][1]), Catch::Matchers::WithinRel(3.0, 0.02));
}
