#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"

namespace riskattr {

enum class RiskKind { StdDev, Variance, VaR, CVaR };

inline std::string risk_kind_name(RiskKind kind) {
    switch (kind) {
    case RiskKind::StdDev: return "std";
    case RiskKind::Variance: return "var";
    case RiskKind::VaR: return "varq";
    case RiskKind::CVaR: return "cvar";
    }
    return "?";
}

/// Which risk functional to apply to a vector of realized outcomes.
///
/// Sign convention: outcomes are returns, larger losses give a larger
/// positive risk value. VaR/CVaR of an all-positive return vector is
/// negative; that is intentional.
struct RiskMeasureSpec {
    RiskKind kind = RiskKind::StdDev;
    /// Tail level in (0,1). Required for VaR/CVaR, must be absent otherwise.
    std::optional<double> alpha;
    /// Divide by n-1 instead of n for StdDev/Variance.
    bool bessel = false;

    static RiskMeasureSpec std_dev() { return {RiskKind::StdDev, std::nullopt, false}; }
    static RiskMeasureSpec variance() { return {RiskKind::Variance, std::nullopt, false}; }
    static RiskMeasureSpec value_at_risk(double a) { return {RiskKind::VaR, a, false}; }
    static RiskMeasureSpec cvar(double a) { return {RiskKind::CVaR, a, false}; }

    bool tail_measure() const { return kind == RiskKind::VaR || kind == RiskKind::CVaR; }

    /// StdDev and CVaR are sub-additive; Variance and VaR are not.
    bool subadditive() const { return kind == RiskKind::StdDev || kind == RiskKind::CVaR; }

    void validate() const {
        if (tail_measure()) {
            if (!alpha)
                throw InputError("risk measure " + risk_kind_name(kind) + " requires alpha");
            if (!(*alpha > 0.0 && *alpha < 1.0))
                throw InputError("alpha must lie strictly in (0,1), got " + std::to_string(*alpha));
        } else if (alpha) {
            throw InputError("alpha is only meaningful for varq/cvar");
        }
    }
};

namespace detail {

/// Tail rank k = ceil(alpha*n), snapped so that alpha*n values a hair above
/// an integer (float noise in alpha*n) do not bump the rank.
inline std::size_t tail_rank(double alpha, std::size_t n) {
    const double an = alpha * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(an - 1e-9));
    if (k < 1) k = 1;
    if (k > n) k = n;
    return k;
}

/// Sorts the k smallest outcomes to the front and returns (k-th order
/// statistic, sum of the k smallest). Deterministic under permutation of
/// the input: the selected multiset and the ascending summation order are
/// both permutation-invariant.
inline std::pair<double, double> smallest_tail(std::vector<double>& ys, std::size_t k) {
    std::nth_element(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(k - 1), ys.end());
    std::sort(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(k));
    const double kth = ys[k - 1];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += ys[i];
    return {kth, sum};
}

} // namespace detail

/// Applies the risk functional in `spec` to a sample of outcomes.
///
/// StdDev/Variance use the population estimator unless spec.bessel is set.
/// VaR_a = -y_(k) with k = ceil(a*n) on the ascending sort; CVaR_a is the
/// Rockafellar-Uryasev tail objective evaluated in closed form at its
/// minimizer zeta = VaR_a.
inline double evaluate(const RiskMeasureSpec& spec, std::span<const double> outcomes) {
    spec.validate();
    const std::size_t n = outcomes.size();
    if (n == 0) throw InputError("risk measure: empty outcome vector");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(outcomes[i]))
            throw InputError("risk measure: non-finite outcome at index " + std::to_string(i));

    switch (spec.kind) {
    case RiskKind::StdDev:
    case RiskKind::Variance: {
        if (spec.bessel && n < 2)
            throw InputError("risk measure: Bessel correction needs n >= 2");
        double mean = 0.0;
        for (double y : outcomes) mean += y;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double y : outcomes) ss += (y - mean) * (y - mean);
        const double var = ss / static_cast<double>(spec.bessel ? n - 1 : n);
        return spec.kind == RiskKind::Variance ? var : std::sqrt(var);
    }
    case RiskKind::VaR: {
        const std::size_t k = detail::tail_rank(*spec.alpha, n);
        std::vector<double> ys(outcomes.begin(), outcomes.end());
        return -detail::smallest_tail(ys, k).first;
    }
    case RiskKind::CVaR: {
        const std::size_t k = detail::tail_rank(*spec.alpha, n);
        std::vector<double> ys(outcomes.begin(), outcomes.end());
        const auto [kth, sum] = detail::smallest_tail(ys, k);
        const double an = *spec.alpha * static_cast<double>(n);
        // zeta + (1/(an)) * sum_i max(-y_i - zeta, 0) at zeta = -y_(k)
        return -kth + (static_cast<double>(k) * kth - sum) / an;
    }
    }
    throw InputError("risk measure: unknown kind");
}

} // namespace riskattr
