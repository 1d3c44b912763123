#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/game.hpp"
#include "riskattr/matrix.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/shapley.hpp"

namespace riskattr {

/// Uniform result record for every axiom checker. `hypothesis_held` reports
/// whether the axiom's precondition holds for this game (checked by
/// enumeration); when it does not, the assertion is vacuous and
/// `assertion_held` stays true with a note. A failed assertion always
/// carries a witness (subset mask or feature index).
struct AxiomVerdict {
    std::string check;
    bool hypothesis_held = true;
    bool assertion_held = true;
    double max_hypothesis_violation = 0.0;
    double assertion_residual = 0.0;
    std::string witness;
    std::string note;
    std::vector<double> values; // per-feature payload (e.g. margins)

    bool passed() const { return assertion_held; }
};

namespace detail {

inline std::string mask_witness(std::size_t mask) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "subset 0x%zx", mask);
    return std::string(buf);
}

inline void require_table(const std::vector<double>& table, std::size_t m,
                          const char* who) {
    if (m == 0 || table.size() != (std::size_t{1} << m))
        throw InputError(std::string(who) + ": characteristic table size " +
                         std::to_string(table.size()) + " does not match " +
                         std::to_string(m) + " features");
}

} // namespace detail

/// |sum of attributions - (v(M) - v(empty))| with v recomputed from the
/// table. Pass: 1e-9 relative for the exact engine; for sampled reports the
/// telescoping construction makes the residual exact as well, so the bound
/// is max(3 * aggregate stderr, exact tolerance).
inline AxiomVerdict check_completeness(const AttributionReport& report, double v_full,
                                       double v_empty) {
    AxiomVerdict verdict;
    verdict.check = "completeness";
    if (report.attributions.empty()) throw InputError("completeness: empty report");
    const double residual = std::abs(report.total() - (v_full - v_empty));
    const double exact_tol = 1e-9 * std::max(1.0, std::abs(v_full));
    double tol = exact_tol;
    if (report.method == "sampled") tol = std::max(3.0 * aggregate_stderr(report), exact_tol);
    verdict.assertion_residual = residual;
    verdict.assertion_held = residual <= tol;
    if (!verdict.assertion_held) verdict.witness = "attribution sum";
    return verdict;
}

inline AxiomVerdict check_completeness(const AttributionReport& report,
                                       const CharacteristicGame& game) {
    if (report.attributions.size() != game.feature_count())
        throw InputError("completeness: report has " +
                         std::to_string(report.attributions.size()) + " features, game has " +
                         std::to_string(game.feature_count()));
    return check_completeness(report, game.value_of(game.full_mask()), game.value_of(0));
}

/// Dummy: if v(S u i) = v(S) for every S (to 1e-10), attribution i must be 0
/// to 1e-10.
inline AxiomVerdict check_dummy(const std::vector<double>& table,
                                const AttributionReport& report, std::size_t i) {
    const std::size_t m = report.attributions.size();
    detail::require_table(table, m, "dummy");
    if (i >= m) throw InputError("dummy: feature index out of range");

    AxiomVerdict verdict;
    verdict.check = "dummy(f" + std::to_string(i) + ")";
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        if (mask & bit) continue;
        const double margin = std::abs(table[mask | bit] - table[mask]);
        if (margin > verdict.max_hypothesis_violation) {
            verdict.max_hypothesis_violation = margin;
            verdict.witness = detail::mask_witness(mask);
        }
    }
    verdict.hypothesis_held = verdict.max_hypothesis_violation <= 1e-10;
    if (!verdict.hypothesis_held) {
        verdict.note = "feature is not a dummy; nothing to assert";
        verdict.witness.clear();
        return verdict;
    }
    verdict.assertion_residual = std::abs(report.attributions[i]);
    verdict.assertion_held = verdict.assertion_residual <= 1e-10;
    verdict.witness = verdict.assertion_held ? "" : "feature " + std::to_string(i);
    return verdict;
}

inline AxiomVerdict check_dummy(const CharacteristicGame& game, std::size_t i,
                                const ShapleyOptions& options = {}) {
    const auto table = enumerate_char_values(game, options.threads, options.max_exact_features);
    return check_dummy(table, shapley_exact_from_table(table, game.feature_names()), i);
}

/// Symmetry: if v(S u i) = v(S u j) for every S excluding both (to 1e-10),
/// attributions i and j must agree to 1e-10.
inline AxiomVerdict check_symmetry(const std::vector<double>& table,
                                   const AttributionReport& report, std::size_t i,
                                   std::size_t j) {
    const std::size_t m = report.attributions.size();
    detail::require_table(table, m, "symmetry");
    if (i >= m || j >= m || i == j)
        throw InputError("symmetry: need two distinct in-range feature indices");

    AxiomVerdict verdict;
    verdict.check = "symmetry(f" + std::to_string(i) + ",f" + std::to_string(j) + ")";
    const std::size_t bi = std::size_t{1} << i;
    const std::size_t bj = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        if (mask & (bi | bj)) continue;
        const double gap = std::abs(table[mask | bi] - table[mask | bj]);
        if (gap > verdict.max_hypothesis_violation) {
            verdict.max_hypothesis_violation = gap;
            verdict.witness = detail::mask_witness(mask);
        }
    }
    verdict.hypothesis_held = verdict.max_hypothesis_violation <= 1e-10;
    if (!verdict.hypothesis_held) {
        verdict.note = "features are not symmetric; nothing to assert";
        verdict.witness.clear();
        return verdict;
    }
    verdict.assertion_residual = std::abs(report.attributions[i] - report.attributions[j]);
    verdict.assertion_held = verdict.assertion_residual <= 1e-10;
    verdict.witness =
        verdict.assertion_held ? "" : "features " + std::to_string(i) + "," + std::to_string(j);
    return verdict;
}

inline AxiomVerdict check_symmetry(const CharacteristicGame& game, std::size_t i, std::size_t j,
                                   const ShapleyOptions& options = {}) {
    const auto table = enumerate_char_values(game, options.threads, options.max_exact_features);
    return check_symmetry(table, shapley_exact_from_table(table, game.feature_names()), i, j);
}

/// Diversification bound for linear SRAM portfolios under a sub-additive
/// measure: attribution_i <= risk(c_i (X_i - baseline_i)). Margins are the
/// slack; all must be >= -1e-12. The baseline shift keeps the bound exact
/// for nonzero baselines (it vanishes for StdDev and for zero baselines).
inline AxiomVerdict check_subadditivity_bound(const CharacteristicGame& game,
                                              const AttributionReport& report) {
    AxiomVerdict verdict;
    verdict.check = "subadditivity_bound";
    if (!game.is<SramGame>() || !game.as<SramGame>().model.is<LinearPortfolio>()) {
        verdict.hypothesis_held = false;
        verdict.note = "requires a linear portfolio over scenarios";
        return verdict;
    }
    const auto& g = game.as<SramGame>();
    if (!g.risk.subadditive()) {
        verdict.hypothesis_held = false;
        verdict.note = "measure not sub-additive";
        return verdict;
    }
    const std::size_t m = g.baseline.size();
    if (report.attributions.size() != m)
        throw InputError("subadditivity: report does not match game dimension");

    const auto& weights = g.model.as<LinearPortfolio>().weights;
    const std::size_t n = g.scenarios.n_rows();
    std::vector<double> column(n);
    verdict.values.resize(m);
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < n; ++t)
            column[t] = weights[i] * (g.scenarios.values(t, i) - g.baseline[i]);
        const double bound = evaluate(g.risk, column);
        const double margin = bound - report.attributions[i];
        verdict.values[i] = margin;
        if (margin < worst) {
            worst = margin;
            verdict.witness = "feature " + std::to_string(i);
        }
    }
    verdict.assertion_residual = -worst;
    verdict.assertion_held = worst >= -1e-12;
    if (verdict.assertion_held) verdict.witness.clear();
    return verdict;
}

enum class MonotonicityKind { Individual, Pairwise };

/// Individual: if v(S) <= v(S u i) for every S, attribution i >= -1e-12.
inline AxiomVerdict check_monotonicity_individual(const std::vector<double>& table,
                                                  const AttributionReport& report,
                                                  std::size_t i) {
    const std::size_t m = report.attributions.size();
    detail::require_table(table, m, "monotonicity");
    if (i >= m) throw InputError("monotonicity: feature index out of range");

    AxiomVerdict verdict;
    verdict.check = "individual_monotonicity(f" + std::to_string(i) + ")";
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        if (mask & bit) continue;
        const double decrease = table[mask] - table[mask | bit];
        if (decrease > verdict.max_hypothesis_violation) {
            verdict.max_hypothesis_violation = decrease;
            verdict.witness = detail::mask_witness(mask);
        }
    }
    verdict.hypothesis_held = verdict.max_hypothesis_violation <= 1e-10;
    if (!verdict.hypothesis_held) {
        verdict.note = "adding the feature can decrease v; not applicable";
        verdict.witness.clear();
        return verdict;
    }
    verdict.assertion_residual = std::max(0.0, -report.attributions[i]);
    verdict.assertion_held = report.attributions[i] >= -1e-12;
    verdict.witness = verdict.assertion_held ? "" : "feature " + std::to_string(i);
    return verdict;
}

/// Pairwise within one game: if v(S u i) <= v(S u j) for every S excluding
/// both, attribution i <= attribution j + 1e-12.
inline AxiomVerdict check_monotonicity_pairwise(const std::vector<double>& table,
                                                const AttributionReport& report, std::size_t i,
                                                std::size_t j) {
    const std::size_t m = report.attributions.size();
    detail::require_table(table, m, "monotonicity");
    if (i >= m || j >= m || i == j)
        throw InputError("monotonicity: need two distinct in-range feature indices");

    AxiomVerdict verdict;
    verdict.check = "pairwise_monotonicity(f" + std::to_string(i) + "<=f" + std::to_string(j) + ")";
    const std::size_t bi = std::size_t{1} << i;
    const std::size_t bj = std::size_t{1} << j;
    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        if (mask & (bi | bj)) continue;
        const double excess = table[mask | bi] - table[mask | bj];
        if (excess > verdict.max_hypothesis_violation) {
            verdict.max_hypothesis_violation = excess;
            verdict.witness = detail::mask_witness(mask);
        }
    }
    verdict.hypothesis_held = verdict.max_hypothesis_violation <= 1e-10;
    if (!verdict.hypothesis_held) {
        verdict.note = "v(S+i) can exceed v(S+j); not applicable";
        verdict.witness.clear();
        return verdict;
    }
    verdict.assertion_residual =
        std::max(0.0, report.attributions[i] - report.attributions[j]);
    verdict.assertion_held = report.attributions[i] <= report.attributions[j] + 1e-12;
    verdict.witness =
        verdict.assertion_held ? "" : "features " + std::to_string(i) + "," + std::to_string(j);
    return verdict;
}

inline AxiomVerdict check_monotonicity(const CharacteristicGame& game, std::size_t i,
                                       std::size_t j, MonotonicityKind kind,
                                       const ShapleyOptions& options = {}) {
    const auto table = enumerate_char_values(game, options.threads, options.max_exact_features);
    const auto report = shapley_exact_from_table(table, game.feature_names());
    if (kind == MonotonicityKind::Individual)
        return check_monotonicity_individual(table, report, i);
    return check_monotonicity_pairwise(table, report, i, j);
}

/// Two built-in counterexamples showing which Shapley axioms cannot carry
/// over to risk attributions.
struct IncompatibilityDemo {
    // Linearity: attributions of f = X1 and g = X2 do not add up to the
    // attributions of f + g unless the assets are perfectly correlated.
    double sigma1 = 0.0, sigma2 = 0.0, rho = 0.0;
    std::vector<double> attr_f, attr_g, attr_sum; // StdDev analytic games
    double linearity_gap = 0.0;          // (sum A(f) + sum A(g)) - sum A(f+g)
    double expected_linearity_gap = 0.0; // sigma1 + sigma2 - sqrt(...)
    bool degenerate = false;             // rho = 1: gap collapses to 0

    // Symmetric monotonicity across models: with Var(X1) = Var(X2) and
    // rho > 0, X2 has the same distribution under f = X1 + X2 and g = X2,
    // yet BShap must give it different risk (else completeness breaks).
    double sm_sigma_sq = 0.0, sm_rho = 0.0;
    std::vector<double> sm_attr_f, sm_attr_g, sm_attr_h;
    double sm_gap = 0.0; // A_2(f) - A_2(g) = rho * sigma^2 > 0

    std::vector<std::string> lines() const;
};

inline IncompatibilityDemo demonstrate_incompatibilities(double sigma1 = 1.0,
                                                         double sigma2 = 1.0,
                                                         double rho = 0.0) {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw InputError("incompatibility demo: volatilities must be positive");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw InputError("incompatibility demo: correlation must lie in [-1, 1]");

    IncompatibilityDemo demo;
    demo.sigma1 = sigma1;
    demo.sigma2 = sigma2;
    demo.rho = rho;

    Matrix cov(2, 2);
    cov(0, 0) = sigma1 * sigma1;
    cov(1, 1) = sigma2 * sigma2;
    cov(0, 1) = cov(1, 0) = rho * sigma1 * sigma2;

    auto analytic = [&](double c1, double c2) {
        return shapley_exact(
            CharacteristicGame(GaussianAnalyticGame{cov, {c1, c2}, RiskKind::StdDev}));
    };
    demo.attr_f = analytic(1.0, 0.0).attributions;
    demo.attr_g = analytic(0.0, 1.0).attributions;
    auto sum_report = analytic(1.0, 1.0);
    demo.attr_sum = sum_report.attributions;
    demo.linearity_gap = (demo.attr_f[0] + demo.attr_f[1] + demo.attr_g[0] + demo.attr_g[1]) -
                         sum_report.total();
    demo.expected_linearity_gap =
        sigma1 + sigma2 - std::sqrt(sigma1 * sigma1 + sigma2 * sigma2 + 2.0 * rho * sigma1 * sigma2);
    demo.degenerate = demo.expected_linearity_gap <= 1e-12;

    // Exact-moment sample: both columns have mean 0 and variance 9, with
    // correlation 0.6 (3-4-5 construction keeps the products representable).
    demo.sm_sigma_sq = 9.0;
    demo.sm_rho = 0.6;
    ScenarioMatrix sample;
    sample.columns = {"x1", "x2"};
    sample.values = Matrix(4, 2);
    const double x1[4] = {3.0, 3.0, -3.0, -3.0};
    const double x2[4] = {4.2, -0.6, 0.6, -4.2};
    for (std::size_t t = 0; t < 4; ++t) {
        sample.values(t, 0) = x1[t];
        sample.values(t, 1) = x2[t];
    }
    auto variance_game = [&](double c1, double c2) {
        return shapley_exact(CharacteristicGame(
            SramGame{ModelSpec(LinearPortfolio{{c1, c2}}), {0.0, 0.0}, sample,
                     RiskMeasureSpec::variance()}));
    };
    demo.sm_attr_f = variance_game(1.0, 1.0).attributions;
    demo.sm_attr_g = variance_game(0.0, 1.0).attributions;
    demo.sm_attr_h = variance_game(1.0, 0.0).attributions;
    demo.sm_gap = demo.sm_attr_f[1] - demo.sm_attr_g[1];
    return demo;
}

inline std::vector<std::string> IncompatibilityDemo::lines() const {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    std::vector<std::string> out;
    out.push_back("linearity: A(X1)+A(X2) totals " + fmt(sigma1 + sigma2) +
                  " but A(X1+X2) totals " + fmt(attr_sum[0] + attr_sum[1]) + "; gap " +
                  fmt(linearity_gap) + (degenerate ? " (degenerate: perfectly correlated)" : ""));
    out.push_back("symmetric monotonicity: A(f=X1+X2) = [" + fmt(sm_attr_f[0]) + ", " +
                  fmt(sm_attr_f[1]) + "], A(g=X2) = [" + fmt(sm_attr_g[0]) + ", " +
                  fmt(sm_attr_g[1]) + "]; X2 carries " + fmt(sm_gap) +
                  " more risk inside f than alone, so equal-distribution features cannot be " +
                  "compared across models");
    return out;
}

} // namespace riskattr
