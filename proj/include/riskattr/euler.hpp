#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/matrix.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/scenario_matrix.hpp"

namespace riskattr {

struct EulerReport {
    std::vector<std::string> features;
    std::vector<double> allocations;
    double portfolio_risk = 0.0;

    double total() const {
        return std::accumulate(allocations.begin(), allocations.end(), 0.0);
    }
};

/// Euler risk allocation for a linear portfolio over realized scenarios.
/// StdDev: A_i = c_i * Cov(X_i, X c) / Std(X c), which sums exactly to the
/// portfolio standard deviation. CVaR: A_i = -mean of c_i X_i over the
/// worst ceil(alpha n) scenarios ranked by portfolio outcome (ties broken
/// by scenario index); sums exactly to the tail-average CVaR.
inline EulerReport euler_allocation(const ScenarioMatrix& scenarios,
                                    const std::vector<double>& weights,
                                    const RiskMeasureSpec& risk) {
    scenarios.validate();
    risk.validate();
    const std::size_t m = scenarios.n_cols();
    const std::size_t n = scenarios.n_rows();
    if (weights.size() != m)
        throw InputError("euler: weight length " + std::to_string(weights.size()) +
                         " does not match scenario feature count " + std::to_string(m));
    for (double w : weights)
        if (!std::isfinite(w)) throw InputError("euler: non-finite weight");
    if (risk.kind != RiskKind::StdDev && risk.kind != RiskKind::CVaR)
        throw InputError("euler allocation is defined here for std and cvar only");

    std::vector<double> portfolio(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto row = scenarios.values.row(t);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += weights[j] * row[j];
        portfolio[t] = acc;
    }

    EulerReport report;
    report.features = scenarios.columns;
    report.allocations.assign(m, 0.0);

    if (risk.kind == RiskKind::StdDev) {
        const double divisor = risk.bessel ? static_cast<double>(n - 1) : static_cast<double>(n);
        if (risk.bessel && n < 2)
            throw InputError("euler: sample std of a single scenario is undefined");
        double pmean = 0.0;
        for (double v : portfolio) pmean += v;
        pmean /= static_cast<double>(n);
        double pvar = 0.0;
        for (double v : portfolio) pvar += (v - pmean) * (v - pmean);
        pvar /= divisor;
        const double pstd = std::sqrt(std::max(pvar, 0.0));
        report.portfolio_risk = pstd;
        if (pstd == 0.0) return report; // degenerate portfolio owes nothing to anyone

        std::vector<double> col_mean(m, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const auto row = scenarios.values.row(t);
            for (std::size_t j = 0; j < m; ++j) col_mean[j] += row[j];
        }
        for (auto& v : col_mean) v /= static_cast<double>(n);
        for (std::size_t j = 0; j < m; ++j) {
            double cov = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                cov += (scenarios.values(t, j) - col_mean[j]) * (portfolio[t] - pmean);
            cov /= divisor;
            report.allocations[j] = weights[j] * cov / pstd;
        }
        return report;
    }

    // CVaR
    const std::size_t k = detail::tail_rank(*risk.alpha, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (portfolio[a] != portfolio[b]) return portfolio[a] < portfolio[b];
        return a < b;
    });
    const double kd = static_cast<double>(k);
    for (std::size_t j = 0; j < m; ++j) {
        double tail = 0.0;
        for (std::size_t r = 0; r < k; ++r) tail += scenarios.values(order[r], j);
        report.allocations[j] = -weights[j] * tail / kd;
    }
    double ptail = 0.0;
    for (std::size_t r = 0; r < k; ++r) ptail += portfolio[order[r]];
    report.portfolio_risk = -ptail / kd;
    return report;
}

} // namespace riskattr
