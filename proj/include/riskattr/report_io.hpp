#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskattr/axioms.hpp"
#include "riskattr/csv.hpp"
#include "riskattr/euler.hpp"
#include "riskattr/shapley.hpp"

namespace riskattr {

/// Stable field order so identical runs serialize to identical bytes.
using OrderedJson = nlohmann::ordered_json;

inline OrderedJson report_to_json(const AttributionReport& report) {
    OrderedJson j;
    j["features"] = report.features;
    j["attributions"] = report.attributions;
    j["v_full"] = report.v_full;
    j["v_empty"] = report.v_empty;
    j["method"] = report.method;
    if (report.method == "sampled") {
        j["permutations"] = report.permutations;
        j["seed"] = report.seed;
        j["stderr"] = report.stderrs;
    }
    j["completeness_residual"] = report.completeness_residual;
    return j;
}

inline OrderedJson verdict_to_json(const AxiomVerdict& verdict) {
    OrderedJson j;
    j["check"] = verdict.check;
    j["hypothesis_held"] = verdict.hypothesis_held;
    j["assertion_held"] = verdict.assertion_held;
    j["max_hypothesis_violation"] = verdict.max_hypothesis_violation;
    j["assertion_residual"] = verdict.assertion_residual;
    if (!verdict.witness.empty()) j["witness"] = verdict.witness;
    if (!verdict.note.empty()) j["note"] = verdict.note;
    if (!verdict.values.empty()) j["margins"] = verdict.values;
    return j;
}

inline void report_to_csv(const AttributionReport& report, std::ostream& out) {
    const bool sampled = report.method == "sampled";
    out << "feature,attribution" << (sampled ? ",stderr" : "") << "\n";
    for (std::size_t i = 0; i < report.features.size(); ++i) {
        out << detail::csv_escape(report.features[i]) << ','
            << detail::format_double(report.attributions[i]);
        if (sampled) out << ',' << detail::format_double(report.stderrs[i]);
        out << "\n";
    }
}

/// Horizontal bar chart of attributions, one bar per feature, with a zero
/// axis. Pure text output; no rendering dependencies.
inline void report_to_svg(const AttributionReport& report, std::ostream& out) {
    const std::size_t m = report.features.size();
    const double bar_h = 26.0, gap = 8.0, label_w = 150.0, value_w = 90.0;
    const double plot_w = 420.0;
    const double height = 20.0 + static_cast<double>(m) * (bar_h + gap);
    const double width = label_w + plot_w + value_w;

    double lo = 0.0, hi = 0.0;
    for (double a : report.attributions) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    if (hi == lo) hi = lo + 1.0;
    const double span = hi - lo;
    auto xpos = [&](double v) { return label_w + (v - lo) / span * plot_w; };
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "  <line x1=\"" << num(xpos(0.0)) << "\" y1=\"10\" x2=\"" << num(xpos(0.0))
        << "\" y2=\"" << num(height - 10.0) << "\" stroke=\"#666\"/>\n";
    for (std::size_t i = 0; i < m; ++i) {
        const double a = report.attributions[i];
        const double y = 14.0 + static_cast<double>(i) * (bar_h + gap);
        const double x0 = xpos(std::min(a, 0.0));
        const double w = std::abs(xpos(a) - xpos(0.0));
        out << "  <text x=\"" << num(label_w - 8.0) << "\" y=\"" << num(y + bar_h * 0.7)
            << "\" text-anchor=\"end\">" << report.features[i] << "</text>\n";
        out << "  <rect x=\"" << num(x0) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
            << "\" height=\"" << num(bar_h) << "\" fill=\"" << (a < 0.0 ? "#b23b3b" : "#3b6fb2")
            << "\"/>\n";
        out << "  <text x=\"" << num(xpos(std::max(a, 0.0)) + 6.0) << "\" y=\""
            << num(y + bar_h * 0.7) << "\">" << num(a) << "</text>\n";
    }
    out << "</svg>\n";
}

inline OrderedJson euler_to_json(const EulerReport& report) {
    OrderedJson j;
    j["features"] = report.features;
    j["allocations"] = report.allocations;
    j["portfolio_risk"] = report.portfolio_risk;
    return j;
}

} // namespace riskattr
