#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/scenario_matrix.hpp"
#include "riskattr/simplex.hpp"

namespace riskattr {

struct CvarOptimum {
    std::vector<double> weights;
    double cvar = 0.0;         // empirical CVaR of the returned weights
    double lp_objective = 0.0; // Rockafellar-Uryasev optimum; equals cvar to ~1e-8
    LpStatus status = LpStatus::Optimal;
    std::size_t iterations = 0;
};

namespace detail {

inline std::vector<double> portfolio_outcomes(const ScenarioMatrix& returns,
                                              const std::vector<double>& weights) {
    const std::size_t n = returns.n_rows();
    const std::size_t m = returns.n_cols();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto row = returns.values.row(t);
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += weights[j] * row[j];
        out[t] = acc;
    }
    return out;
}

} // namespace detail

/// Long-only minimum-CVaR weights via the Rockafellar-Uryasev LP
///
///   min  zeta + (1/(alpha n)) sum_i u_i
///   s.t. u_i >= -x_i.c - zeta,  u_i >= 0,  sum_j c_j = 1,  c_j >= 0
///
/// solved in standard form with variables [c, zeta+, zeta-, u, slacks].
/// Exactly duplicated asset columns get their optimal weight averaged,
/// which leaves the objective unchanged and resolves ties toward equal
/// weights deterministically.
inline CvarOptimum min_cvar_weights(const ScenarioMatrix& returns, double alpha) {
    returns.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("optimize: alpha must lie in (0,1)");
    const std::size_t n = returns.n_rows();
    const std::size_t m = returns.n_cols();
    if (static_cast<double>(n) * alpha < 1.0 - 1e-9)
        throw InputError("optimize: alpha " + std::to_string(alpha) + " with " +
                         std::to_string(n) + " scenarios leaves an empty tail");

    const double an = alpha * static_cast<double>(n);
    const std::size_t zp = m, zm = m + 1, u0 = m + 2, s0 = u0 + n;
    LpProblem lp;
    lp.n_vars = s0 + n;
    lp.a.assign(n + 1, std::vector<double>(lp.n_vars, 0.0));
    lp.b.assign(n + 1, 0.0);
    lp.c.assign(lp.n_vars, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        auto& row = lp.a[i];
        const auto x = returns.values.row(i);
        for (std::size_t j = 0; j < m; ++j) row[j] = -x[j];
        row[zp] = -1.0;
        row[zm] = 1.0;
        row[u0 + i] = -1.0;
        row[s0 + i] = 1.0;
    }
    for (std::size_t j = 0; j < m; ++j) lp.a[n][j] = 1.0;
    lp.b[n] = 1.0;
    lp.c[zp] = 1.0;
    lp.c[zm] = -1.0;
    for (std::size_t i = 0; i < n; ++i) lp.c[u0 + i] = 1.0 / an;

    const std::size_t cap = 50 * (n + m + 2);
    LpSolution sol = solve_lp(lp, cap);

    CvarOptimum out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    if (sol.status == LpStatus::Infeasible || sol.status == LpStatus::Unbounded || sol.x.empty())
        throw NumericError(std::string("optimize: simplex returned ") +
                           lp_status_name(sol.status));

    out.weights.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(m));
    for (auto& w : out.weights) w = std::max(w, 0.0);

    // average weights over bitwise-identical return columns
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::size_t> group{j};
        for (std::size_t l = j + 1; l < m; ++l) {
            bool same = true;
            for (std::size_t t = 0; t < n && same; ++t)
                same = returns.values(t, j) == returns.values(t, l);
            if (same) group.push_back(l);
        }
        if (group.size() > 1) {
            double total = 0.0;
            for (std::size_t g : group) total += out.weights[g];
            for (std::size_t g : group) out.weights[g] = total / static_cast<double>(group.size());
        }
    }

    double total = 0.0;
    for (double w : out.weights) total += w;
    if (!(total > 0.0)) throw NumericError("optimize: degenerate weight vector from simplex");
    for (auto& w : out.weights) w /= total;

    out.lp_objective = sol.objective;
    out.cvar = evaluate(RiskMeasureSpec::cvar(alpha),
                        detail::portfolio_outcomes(returns, out.weights));
    return out;
}

/// Exhaustive simplex-lattice search, the acceptance oracle for small m.
/// Ties go to the lexicographically first lattice point visited.
inline CvarOptimum grid_oracle(const ScenarioMatrix& returns, double alpha, double step) {
    returns.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("oracle: alpha must lie in (0,1)");
    if (!(step > 0.0 && step <= 1.0)) throw InputError("oracle: step must lie in (0, 1]");
    const std::size_t m = returns.n_cols();
    if (m > 3) throw InputError("oracle: supports at most 3 assets");
    const std::size_t n = returns.n_rows();
    if (static_cast<double>(n) * alpha < 1.0 - 1e-9)
        throw InputError("oracle: alpha leaves an empty tail");

    const auto steps = static_cast<std::size_t>(std::llround(1.0 / step));
    const double k = static_cast<double>(std::max<std::size_t>(steps, 1));
    const auto spec = RiskMeasureSpec::cvar(alpha);

    CvarOptimum best;
    best.cvar = std::numeric_limits<double>::infinity();
    std::vector<double> w(m, 0.0);
    auto consider = [&] {
        const double c = evaluate(spec, detail::portfolio_outcomes(returns, w));
        if (c < best.cvar) {
            best.cvar = c;
            best.weights = w;
        }
    };
    if (m == 1) {
        w[0] = 1.0;
        consider();
    } else if (m == 2) {
        for (std::size_t i = 0; i <= steps; ++i) {
            w[0] = static_cast<double>(i) / k;
            w[1] = 1.0 - w[0];
            consider();
        }
    } else {
        for (std::size_t i = 0; i <= steps; ++i)
            for (std::size_t j = 0; i + j <= steps; ++j) {
                w[0] = static_cast<double>(i) / k;
                w[1] = static_cast<double>(j) / k;
                w[2] = 1.0 - w[0] - w[1];
                if (w[2] < 0.0) w[2] = 0.0;
                consider();
            }
    }
    best.lp_objective = best.cvar;
    best.status = LpStatus::Optimal;
    return best;
}

} // namespace riskattr
