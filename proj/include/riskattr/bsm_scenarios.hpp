#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/matrix.hpp"
#include "riskattr/models.hpp"
#include "riskattr/scenario_matrix.hpp"

namespace riskattr {

struct BsmScenarioSet {
    ScenarioMatrix scenarios;     // columns log_price, log_vol, log_rate
    std::vector<double> baseline; // (ln S_N, ln sigma_N, ln r_N)
    ModelSpec model;              // BsmCall{strike, maturity}
};

/// Historical-simulation scenario set for a European call. Scenario i
/// (i = 1..N-1) reprices the option at spot S_N * S_{i+1}/S_i with the
/// volatility and rate observed on day i+1; the baseline is the current
/// market condition (S_N, sigma_N, r_N), so coalition members are the
/// market variables allowed to move away from today. All three features
/// live in log space to match the BsmCall model input convention.
inline BsmScenarioSet build_bsm_scenarios(const std::vector<double>& prices,
                                          const std::vector<double>& vols,
                                          const std::vector<double>& rates, double strike,
                                          double maturity,
                                          const std::vector<std::string>& labels = {}) {
    const std::size_t n = prices.size();
    if (n < 2) throw InputError("bsm scenarios: need at least 2 observations");
    if (vols.size() != n || rates.size() != n)
        throw InputError("bsm scenarios: price, vol and rate series must have equal length");
    if (!labels.empty() && labels.size() != n)
        throw InputError("bsm scenarios: label series length does not match observations");
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw InputError("bsm scenarios: strike must be positive");
    if (!(maturity > 0.0) || !std::isfinite(maturity))
        throw InputError("bsm scenarios: maturity must be positive");
    for (std::size_t t = 0; t < n; ++t) {
        if (!(prices[t] > 0.0) || !std::isfinite(prices[t]))
            throw InputError("bsm scenarios: non-positive price at observation " +
                             std::to_string(t + 1));
        if (!(vols[t] > 0.0) || !std::isfinite(vols[t]))
            throw InputError("bsm scenarios: non-positive volatility at observation " +
                             std::to_string(t + 1));
        if (!(rates[t] > 0.0) || !std::isfinite(rates[t]))
            throw InputError("bsm scenarios: non-positive rate at observation " +
                             std::to_string(t + 1));
    }

    BsmScenarioSet out;
    out.scenarios.columns = {"log_price", "log_vol", "log_rate"};
    out.scenarios.values = Matrix(n - 1, 3);
    const double log_spot = std::log(prices[n - 1]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out.scenarios.values(i, 0) = log_spot + std::log(prices[i + 1] / prices[i]);
        out.scenarios.values(i, 1) = std::log(vols[i + 1]);
        out.scenarios.values(i, 2) = std::log(rates[i + 1]);
    }
    if (!labels.empty()) {
        out.scenarios.label_column = "date";
        out.scenarios.row_labels.assign(labels.begin() + 1, labels.end());
    }
    out.scenarios.validate();

    out.baseline = {log_spot, std::log(vols[n - 1]), std::log(rates[n - 1])};
    out.model = ModelSpec(BsmCall{strike, maturity});
    return out;
}

} // namespace riskattr
