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

/// Appends an "idiosyncratic" feature column holding the fitted model's
/// in-sample residuals e_t = y_t - f(x_t). Attributing through the wrapped
/// model f~(x, e) = f(x) + e then reproduces y exactly on the augmented
/// scenarios, so model error shows up as its own feature instead of
/// contaminating the others.
inline ScenarioMatrix compute_residuals(const ScenarioMatrix& scenarios,
                                        const std::vector<double>& outcomes,
                                        const ModelSpec& model,
                                        const std::string& residual_name = "idiosyncratic") {
    scenarios.validate();
    model.validate();
    const std::size_t n = scenarios.n_rows();
    const std::size_t m = scenarios.n_cols();
    if (outcomes.size() != n)
        throw InputError("residuals: " + std::to_string(outcomes.size()) +
                         " outcomes for " + std::to_string(n) + " scenarios");
    if (model.feature_count() != m)
        throw InputError("residuals: model expects " + std::to_string(model.feature_count()) +
                         " features, scenarios have " + std::to_string(m));
    for (const auto& name : scenarios.columns)
        if (name == residual_name)
            throw InputError("residuals: column '" + residual_name + "' already exists");

    ScenarioMatrix out;
    out.columns = scenarios.columns;
    out.columns.push_back(residual_name);
    out.label_column = scenarios.label_column;
    out.row_labels = scenarios.row_labels;
    out.values = Matrix(n, m + 1);

    std::vector<double> x(m);
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(outcomes[t]))
            throw InputError("residuals: non-finite outcome at row " + std::to_string(t + 1));
        const auto row = scenarios.values.row(t);
        for (std::size_t j = 0; j < m; ++j) {
            x[j] = row[j];
            out.values(t, j) = row[j];
        }
        out.values(t, m) = outcomes[t] - evaluate_model(model, x);
    }
    out.validate();
    return out;
}

/// Baseline for the augmented game: original baseline plus 0 for the
/// residual feature (the fitted model is the no-error reference).
inline std::vector<double> augment_baseline(std::vector<double> baseline) {
    baseline.push_back(0.0);
    return baseline;
}

} // namespace riskattr
