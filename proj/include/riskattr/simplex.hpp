#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "riskattr/errors.hpp"

namespace riskattr {

/// min c.x subject to A x = b, x >= 0  (standard form; b may be any sign,
/// rows are flipped internally).
struct LpProblem {
    std::size_t n_vars = 0;
    std::vector<std::vector<double>> a; // k rows of n_vars coefficients
    std::vector<double> b;              // k
    std::vector<double> c;              // n_vars
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* lp_status_name(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x; // best basic feasible point found (empty if none)
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
};

namespace detail {

/// Dense tableau simplex core. Rows 0..k-1 hold constraints reduced so each
/// basic column is a unit vector; row k is the reduced-cost row. Pivoting
/// uses Dantzig's rule until the objective stalls, then switches to Bland's
/// rule, which cannot cycle.
class SimplexTableau {
public:
    SimplexTableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return data_[r * (cols_ + 1) + cols_]; }
    double& cost(std::size_t c) { return at(rows_, c); }
    double& cost_rhs() { return rhs(rows_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = &data_[pr * (cols_ + 1)];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
        prow[pc] = 1.0; // kill roundoff on the pivot itself
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            double* row = &data_[r * (cols_ + 1)];
            const double factor = row[pc];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) row[c] -= factor * prow[c];
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    /// Runs simplex iterations on the current cost row until optimal or a
    /// stop condition; `allowed(c)` gates which columns may enter.
    template <class Allowed>
    LpStatus iterate(std::size_t& iterations, std::size_t max_iterations, Allowed allowed) {
        const double cost_tol = 1e-9;
        const double pivot_tol = 1e-9;
        bool bland = false;
        std::size_t stalled = 0;
        const std::size_t stall_limit = 2 * (rows_ + cols_) + 16;
        double last_objective = -cost_rhs();

        for (;;) {
            // entering column
            std::size_t enter = cols_;
            if (!bland) {
                double best = -cost_tol;
                for (std::size_t c = 0; c < cols_; ++c) {
                    if (!allowed(c)) continue;
                    const double rc = cost(c);
                    if (rc < best) {
                        best = rc;
                        enter = c;
                    }
                }
            } else {
                for (std::size_t c = 0; c < cols_; ++c) {
                    if (!allowed(c)) continue;
                    if (cost(c) < -cost_tol) {
                        enter = c;
                        break;
                    }
                }
            }
            if (enter == cols_) return LpStatus::Optimal;
            if (iterations >= max_iterations) return LpStatus::IterationLimit;

            // leaving row: min ratio, ties to the smallest basis index
            std::size_t leave = rows_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double a = at(r, enter);
                if (a <= pivot_tol) continue;
                const double ratio = rhs(r) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (leave == rows_ || basis_[r] < basis_[leave]))) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave == rows_) return LpStatus::Unbounded;

            pivot(leave, enter);
            ++iterations;

            const double objective = -cost_rhs();
            if (objective < last_objective - 1e-12) {
                stalled = 0;
                last_objective = objective;
            } else if (!bland && ++stalled > stall_limit) {
                bland = true; // degenerate streak: switch to Bland's rule
            }
        }
    }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

inline LpSolution solve_lp(const LpProblem& lp, std::size_t max_iterations) {
    const std::size_t k = lp.a.size();
    const std::size_t nv = lp.n_vars;
    if (lp.b.size() != k) throw InputError("lp: rhs length does not match row count");
    if (lp.c.size() != nv) throw InputError("lp: cost length does not match variable count");
    for (const auto& row : lp.a)
        if (row.size() != nv) throw InputError("lp: ragged constraint row");
    for (double v : lp.b)
        if (!std::isfinite(v)) throw InputError("lp: non-finite rhs");
    for (double v : lp.c)
        if (!std::isfinite(v)) throw InputError("lp: non-finite cost");

    // Flip rows so b >= 0, then crash a basis from exact unit columns and
    // add artificials where none exists.
    std::vector<std::vector<double>> a = lp.a;
    std::vector<double> b = lp.b;
    for (std::size_t r = 0; r < k; ++r) {
        if (b[r] < 0.0) {
            b[r] = -b[r];
            for (auto& v : a[r]) v = -v;
        }
        for (double v : a[r])
            if (!std::isfinite(v)) throw InputError("lp: non-finite coefficient");
    }

    std::vector<std::size_t> crash(k, nv); // column basic in each row, nv = none
    std::vector<bool> used(nv, false);
    for (std::size_t c = 0; c < nv; ++c) {
        std::size_t hit = k;
        bool unit = true;
        for (std::size_t r = 0; r < k && unit; ++r) {
            const double v = a[r][c];
            if (v == 0.0) continue;
            if (v == 1.0 && hit == k)
                hit = r;
            else
                unit = false;
        }
        if (unit && hit != k && crash[hit] == nv && !used[c]) {
            crash[hit] = c;
            used[c] = true;
        }
    }
    std::size_t n_art = 0;
    for (std::size_t r = 0; r < k; ++r)
        if (crash[r] == nv) ++n_art;

    const std::size_t cols = nv + n_art;
    detail::SimplexTableau t(k, cols);
    std::size_t next_art = nv;
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < nv; ++c) t.at(r, c) = a[r][c];
        t.rhs(r) = b[r];
        if (crash[r] != nv) {
            t.basis()[r] = crash[r];
        } else {
            t.at(r, next_art) = 1.0;
            t.basis()[r] = next_art;
            ++next_art;
        }
    }

    LpSolution solution;
    auto any_column = [](std::size_t) { return true; };
    auto real_column = [nv](std::size_t c) { return c < nv; };

    if (n_art > 0) {
        // Phase 1: minimize the artificial sum. Price artificials at 1,
        // then subtract the rows they are basic in so every basic column
        // ends with reduced cost 0.
        for (std::size_t c = nv; c < cols; ++c) t.cost(c) = 1.0;
        for (std::size_t r = 0; r < k; ++r) {
            if (t.basis()[r] < nv) continue;
            for (std::size_t c = 0; c <= cols; ++c)
                t.at(k, c) -= t.at(r, c);
        }
        const LpStatus phase1 = t.iterate(solution.iterations, max_iterations, any_column);
        if (phase1 == LpStatus::Unbounded)
            throw NumericError("lp: phase-1 unbounded (internal inconsistency)");
        if (phase1 == LpStatus::IterationLimit) {
            solution.status = LpStatus::IterationLimit;
            return solution;
        }
        if (-t.cost_rhs() > 1e-7) {
            solution.status = LpStatus::Infeasible;
            return solution;
        }
        // Drive remaining artificials out of the basis; a row with no real
        // pivot is redundant and can be zeroed in place.
        for (std::size_t r = 0; r < k; ++r) {
            if (t.basis()[r] < nv) continue;
            std::size_t pc = cols;
            for (std::size_t c = 0; c < nv; ++c) {
                if (std::abs(t.at(r, c)) > 1e-9) {
                    pc = c;
                    break;
                }
            }
            if (pc != cols) {
                t.pivot(r, pc);
            } else {
                for (std::size_t c = 0; c <= cols; ++c) t.at(r, c) = 0.0;
                t.at(r, t.basis()[r]) = 1.0; // keep the unit structure; row is 0 = 0
            }
        }
    }

    // Phase 2: rebuild the cost row for the real objective.
    for (std::size_t c = 0; c <= cols; ++c) t.at(k, c) = 0.0;
    for (std::size_t c = 0; c < nv; ++c) t.cost(c) = lp.c[c];
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t bc = t.basis()[r];
        if (bc >= nv) continue; // zeroed redundant row
        const double cb = lp.c[bc];
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= cols; ++c) t.at(k, c) -= cb * t.at(r, c);
        t.cost(bc) = 0.0;
    }

    solution.status = t.iterate(solution.iterations, max_iterations, real_column);
    if (solution.status == LpStatus::Unbounded) return solution;

    solution.x.assign(nv, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t bc = t.basis()[r];
        if (bc < nv) solution.x[bc] = t.rhs(r);
    }
    for (auto& v : solution.x)
        if (std::abs(v) < 1e-11) v = 0.0;
    double obj = 0.0;
    for (std::size_t c = 0; c < nv; ++c) obj += lp.c[c] * solution.x[c];
    solution.objective = obj;
    return solution;
}

} // namespace riskattr
