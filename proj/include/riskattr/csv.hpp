#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/scenario_matrix.hpp"

namespace riskattr {

enum class CsvTransform { None, LogReturn };

struct CsvOptions {
    /// Name of a column holding row labels (dates); parsed as text.
    std::string date_column;
    /// LogReturn maps prices p_t to ln(p_{t+1}/p_t), dropping the first row.
    CsvTransform transform = CsvTransform::None;
};

namespace detail {

/// RFC-4180 record parser: quoted fields, "" escapes, CRLF or LF endings.
/// Returns one vector of fields per record; the trailing newline is optional.
inline std::vector<std::vector<std::string>> parse_csv_records(const std::string& text,
                                                               const std::string& where) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;

    auto end_field = [&]() {
        fields.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(fields);
        fields.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            if (!field.empty() || field_was_quoted)
                throw InputError(where + ": stray quote in record " +
                                 std::to_string(records.size() + 1));
            in_quotes = true;
            field_was_quoted = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                end_record();
                ++i;
            } else {
                field += c;
            }
        } else if (c == '\n') {
            end_record();
        } else {
            field += c;
        }
    }
    if (in_quotes) throw InputError(where + ": unterminated quoted field");
    if (!field.empty() || !fields.empty() || field_was_quoted) end_record();
    return records;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col,
                         const std::string& where) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first; // from_chars rejects a leading '+'
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw InputError(where + ": cannot parse \"" + cell + "\" as a number at row " +
                         std::to_string(row) + ", column " + std::to_string(col));
    if (!std::isfinite(value))
        throw InputError(where + ": non-finite value at row " + std::to_string(row) +
                         ", column " + std::to_string(col));
    return value;
}

} // namespace detail

/// Parses an RFC-4180 CSV with a header row into a ScenarioMatrix.
/// Row/column coordinates in error messages are 1-based and count the
/// header as row 1.
inline ScenarioMatrix load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open CSV file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();

    const auto records = detail::parse_csv_records(buf.str(), path);
    if (records.empty()) throw InputError(path + ": empty file");
    const auto& header = records.front();

    std::size_t label_index = header.size(); // sentinel: none
    std::vector<std::size_t> value_cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!options.date_column.empty() && header[j] == options.date_column) {
            if (label_index != header.size())
                throw InputError(path + ": duplicate date column \"" + options.date_column + "\"");
            label_index = j;
        } else {
            value_cols.push_back(j);
            names.push_back(header[j]);
        }
    }
    if (!options.date_column.empty() && label_index == header.size())
        throw InputError(path + ": date column \"" + options.date_column + "\" not found");
    if (value_cols.empty()) throw InputError(path + ": no numeric columns");
    if (records.size() < 2) throw InputError(path + ": no data rows");

    const std::size_t n = records.size() - 1;
    ScenarioMatrix out;
    out.columns = names;
    out.label_column = label_index == header.size() ? "" : options.date_column;
    out.values = Matrix(n, value_cols.size());
    if (label_index != header.size()) out.row_labels.reserve(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = records[r + 1];
        if (rec.size() != header.size())
            throw InputError(path + ": ragged row " + std::to_string(r + 2) + " has " +
                             std::to_string(rec.size()) + " fields, header has " +
                             std::to_string(header.size()));
        for (std::size_t k = 0; k < value_cols.size(); ++k)
            out.values(r, k) = detail::parse_cell(rec[value_cols[k]], r + 2, value_cols[k] + 1,
                                                  path);
        if (label_index != header.size()) out.row_labels.push_back(rec[label_index]);
    }

    if (options.transform == CsvTransform::LogReturn) {
        if (n < 2) throw InputError(path + ": log-return transform needs at least two rows");
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < out.values.cols(); ++k)
                if (!(out.values(r, k) > 0.0))
                    throw InputError(path + ": log-return transform needs positive prices, got " +
                                     std::to_string(out.values(r, k)) + " at row " +
                                     std::to_string(r + 2) + ", column " +
                                     std::to_string(value_cols[k] + 1));
        Matrix returns(n - 1, out.values.cols());
        for (std::size_t r = 0; r + 1 < n; ++r)
            for (std::size_t k = 0; k < out.values.cols(); ++k)
                returns(r, k) = std::log(out.values(r + 1, k) / out.values(r, k));
        out.values = std::move(returns);
        if (!out.row_labels.empty())
            // a return is labeled by the date it realizes
            out.row_labels.erase(out.row_labels.begin());
    }

    out.validate();
    return out;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

/// Writes a ScenarioMatrix back to CSV. Values are rendered with 17
/// significant digits so a load/save round trip preserves every double.
inline void save_csv(const ScenarioMatrix& matrix, const std::string& path) {
    matrix.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write CSV file: " + path);

    const bool labeled = !matrix.row_labels.empty();
    if (labeled) out << detail::csv_escape(matrix.label_column.empty() ? "label"
                                                                       : matrix.label_column);
    for (std::size_t j = 0; j < matrix.columns.size(); ++j) {
        if (labeled || j > 0) out << ',';
        out << detail::csv_escape(matrix.columns[j]);
    }
    out << '\n';
    for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
        if (labeled) out << detail::csv_escape(matrix.row_labels[i]);
        for (std::size_t j = 0; j < matrix.n_cols(); ++j) {
            if (labeled || j > 0) out << ',';
            out << detail::format_double(matrix.values(i, j));
        }
        out << '\n';
    }
    if (!out) throw InputError("write failed: " + path);
}

} // namespace riskattr
