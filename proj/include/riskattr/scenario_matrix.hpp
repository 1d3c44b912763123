#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/matrix.hpp"

namespace riskattr {

/// n scenarios by m features of model inputs (daily returns, log prices and
/// so on). Row labels are opaque strings, typically dates; no calendar
/// logic is applied anywhere.
struct ScenarioMatrix {
    std::vector<std::string> columns;
    Matrix values; // n x m
    std::string label_column;            // empty when rows are unlabeled
    std::vector<std::string> row_labels; // empty or size n

    std::size_t n_rows() const { return values.rows(); }
    std::size_t n_cols() const { return values.cols(); }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (columns[j] == name) return j;
        throw InputError("no column named \"" + name + "\"");
    }

    void validate() const {
        if (values.rows() == 0) throw InputError("scenario matrix: needs at least one row");
        if (values.cols() == 0) throw InputError("scenario matrix: needs at least one column");
        if (columns.size() != values.cols())
            throw InputError("scenario matrix: header has " + std::to_string(columns.size()) +
                             " names for " + std::to_string(values.cols()) + " columns");
        std::unordered_set<std::string> seen;
        for (const auto& name : columns)
            if (!seen.insert(name).second)
                throw InputError("scenario matrix: duplicate column name \"" + name + "\"");
        if (!row_labels.empty() && row_labels.size() != values.rows())
            throw InputError("scenario matrix: row label count mismatch");
        if (!values.all_finite())
            throw InputError("scenario matrix: non-finite value");
    }
};

} // namespace riskattr
