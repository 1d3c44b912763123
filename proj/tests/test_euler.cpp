#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "riskattr/euler.hpp"
#include "riskattr/game.hpp"
#include "riskattr/shapley.hpp"

using namespace riskattr;
using Catch::Matchers::WithinAbs;

namespace {

ScenarioMatrix exact_moment_scenarios() {
    // var(x1) = 9, var(x2) = 16, cov = 0; portfolio std at unit weights is 5
    ScenarioMatrix s;
    s.columns = {"x1", "x2"};
    s.values = Matrix(4, 2);
    const double a[4] = {3.0, -3.0, 3.0, -3.0};
    const double b[4] = {4.0, 4.0, -4.0, -4.0};
    for (std::size_t t = 0; t < 4; ++t) {
        s.values(t, 0) = a[t];
        s.values(t, 1) = b[t];
    }
    return s;
}

} // namespace

TEST_CASE("std allocation is covariance over portfolio std", "[euler]") {
    const auto s = exact_moment_scenarios();
    const auto report = euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::std_dev());
    REQUIRE_THAT(report.portfolio_risk, WithinAbs(5.0, 1e-12));
    REQUIRE_THAT(report.allocations[0], WithinAbs(1.8, 1e-12)); // 9 / 5
    REQUIRE_THAT(report.allocations[1], WithinAbs(3.2, 1e-12)); // 16 / 5
    REQUIRE_THAT(report.total(), WithinAbs(report.portfolio_risk, 1e-12));
}

TEST_CASE("euler and shapley allocate the same total differently", "[euler]") {
    const auto s = exact_moment_scenarios();
    const auto euler = euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::std_dev());
    const auto shap = shapley_exact(CharacteristicGame(
        SramGame{ModelSpec(LinearPortfolio{{1.0, 1.0}}), {0.0, 0.0}, s,
                 RiskMeasureSpec::std_dev()}));
    REQUIRE_THAT(euler.total(), WithinAbs(shap.total(), 1e-12));
    // marginal-covariance split vs coalition split: (1.8, 3.2) vs (2, 3)
    REQUIRE_THAT(shap.attributions[0], WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(shap.attributions[1], WithinAbs(3.0, 1e-12));
    REQUIRE(euler.allocations[0] < shap.attributions[0]);
}

TEST_CASE("single asset receives its whole standalone risk", "[euler]") {
    ScenarioMatrix s;
    s.columns = {"x"};
    s.values = Matrix(4, 1);
    s.values(0, 0) = 2.0;
    s.values(1, 0) = -2.0;
    s.values(2, 0) = 2.0;
    s.values(3, 0) = -2.0;
    const auto std_report = euler_allocation(s, {3.0}, RiskMeasureSpec::std_dev());
    REQUIRE_THAT(std_report.allocations[0], WithinAbs(6.0, 1e-12));
    const auto cvar_report = euler_allocation(s, {3.0}, RiskMeasureSpec::cvar(0.5));
    REQUIRE_THAT(cvar_report.allocations[0], WithinAbs(6.0, 1e-12)); // tail = the two -6 rows
    REQUIRE_THAT(cvar_report.portfolio_risk, WithinAbs(6.0, 1e-12));
}

TEST_CASE("cvar allocation averages the worst scenarios per asset", "[euler]") {
    ScenarioMatrix s;
    s.columns = {"a", "b"};
    s.values = Matrix(5, 2);
    const double a[5] = {-3.0, 1.0, 0.0, -1.0, 2.0};
    const double b[5] = {-1.0, -4.0, 0.5, 0.0, 1.0};
    for (std::size_t t = 0; t < 5; ++t) {
        s.values(t, 0) = a[t];
        s.values(t, 1) = b[t];
    }
    // portfolio outcomes: -4, -3, 0.5, -1, 3; worst two rows are t=0 and t=1
    const auto report = euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::cvar(0.4));
    REQUIRE_THAT(report.allocations[0], WithinAbs(-(-3.0 + 1.0) / 2.0, 1e-12));
    REQUIRE_THAT(report.allocations[1], WithinAbs(-(-1.0 - 4.0) / 2.0, 1e-12));
    REQUIRE_THAT(report.portfolio_risk, WithinAbs(3.5, 1e-12));
    REQUIRE_THAT(report.total(), WithinAbs(report.portfolio_risk, 1e-12));
}

TEST_CASE("portfolio-outcome ties break by scenario index", "[euler]") {
    ScenarioMatrix s;
    s.columns = {"a", "b"};
    s.values = Matrix(3, 2);
    // rows 0 and 2 tie on the portfolio outcome -1 with different compositions
    s.values(0, 0) = -2.0; s.values(0, 1) = 1.0;
    s.values(1, 0) = 5.0;  s.values(1, 1) = 5.0;
    s.values(2, 0) = 1.0;  s.values(2, 1) = -2.0;
    const auto report = euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::cvar(1.0 / 3.0));
    // k = 1: row 0 wins the tie, so asset a carries the loss
    REQUIRE_THAT(report.allocations[0], WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(report.allocations[1], WithinAbs(-1.0, 1e-12));
}

TEST_CASE("allocation sums match portfolio risk on random data", "[euler]") {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> draw(0.0, 1.0);
    ScenarioMatrix s;
    s.columns = {"a", "b", "c", "d"};
    s.values = Matrix(200, 4);
    for (std::size_t t = 0; t < 200; ++t)
        for (std::size_t j = 0; j < 4; ++j) s.values(t, j) = draw(rng);
    const std::vector<double> w{0.4, 0.1, 0.3, 0.2};
    for (const auto& risk : {RiskMeasureSpec::std_dev(), RiskMeasureSpec::cvar(0.05)}) {
        const auto report = euler_allocation(s, w, risk);
        REQUIRE_THAT(report.total(), WithinAbs(report.portfolio_risk, 1e-10));
    }
}

TEST_CASE("degenerate portfolio allocates zero", "[euler]") {
    ScenarioMatrix s;
    s.columns = {"a"};
    s.values = Matrix(3, 1);
    s.values(0, 0) = s.values(1, 0) = s.values(2, 0) = 4.0;
    const auto report = euler_allocation(s, {1.0}, RiskMeasureSpec::std_dev());
    REQUIRE(report.portfolio_risk == 0.0);
    REQUIRE(report.allocations[0] == 0.0);
}

TEST_CASE("bessel flag rescales the std allocation", "[euler]") {
    const auto s = exact_moment_scenarios();
    RiskMeasureSpec sample = RiskMeasureSpec::std_dev();
    sample.bessel = true;
    const auto report = euler_allocation(s, {1.0, 1.0}, sample);
    // sample variance scales population variance by n/(n-1) = 4/3
    REQUIRE_THAT(report.portfolio_risk, WithinAbs(5.0 * std::sqrt(4.0 / 3.0), 1e-12));
    REQUIRE_THAT(report.total(), WithinAbs(report.portfolio_risk, 1e-12));
}

TEST_CASE("euler rejects unsupported measures and bad weights", "[euler]") {
    const auto s = exact_moment_scenarios();
    REQUIRE_THROWS_WITH(euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::variance()),
                        Catch::Matchers::ContainsSubstring("std and cvar only"));
    REQUIRE_THROWS_AS(euler_allocation(s, {1.0, 1.0}, RiskMeasureSpec::value_at_risk(0.25)),
                      InputError);
    REQUIRE_THROWS_AS(euler_allocation(s, {1.0}, RiskMeasureSpec::std_dev()), InputError);
}
