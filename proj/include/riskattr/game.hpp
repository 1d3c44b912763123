#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/matrix.hpp"
#include "riskattr/models.hpp"
#include "riskattr/risk_measures.hpp"
#include "riskattr/scenario_matrix.hpp"

namespace riskattr {

/// Coalitions are bitmasks over feature indices 0..m-1.
using CoalitionMask = std::uint32_t;

/// v(S) = f(explicand_S; baseline_{M\S}): allocation of a single prediction.
struct BamGame {
    ModelSpec model;
    std::vector<double> baseline;
    std::vector<double> explicand;
};

/// v(S) = risk( { f((x_S)_t; baseline_{M\S}) }_t ) over realized scenarios:
/// out-of-coalition features are frozen at their baseline constants, the
/// model is evaluated per scenario and the risk functional is applied to
/// the resulting outcome sample.
struct SramGame {
    ModelSpec model;
    std::vector<double> baseline;
    ScenarioMatrix scenarios;
    RiskMeasureSpec risk;
};

/// Closed-form game for a linear combination of jointly Gaussian features:
/// v(S) = g(sum_{i,j in S} c_i c_j Sigma_ij) with g = sqrt for StdDev and
/// the identity for Variance. The implicit baseline is "no randomness", so
/// v(empty) = 0.
struct GaussianAnalyticGame {
    Matrix covariance;
    std::vector<double> weights;
    RiskKind measure = RiskKind::StdDev; // StdDev or Variance
};

class CharacteristicGame {
public:
    using Variant = std::variant<BamGame, SramGame, GaussianAnalyticGame>;

    CharacteristicGame(BamGame g) : value_(std::move(g)) { validate(); }
    CharacteristicGame(SramGame g) : value_(std::move(g)) { validate(); }
    CharacteristicGame(GaussianAnalyticGame g) : value_(std::move(g)) { validate(); }

    const Variant& value() const { return value_; }
    template <class T> bool is() const { return std::holds_alternative<T>(value_); }
    template <class T> const T& as() const { return std::get<T>(value_); }

    std::size_t feature_count() const {
        struct Counter {
            std::size_t operator()(const BamGame& g) const { return g.baseline.size(); }
            std::size_t operator()(const SramGame& g) const { return g.baseline.size(); }
            std::size_t operator()(const GaussianAnalyticGame& g) const {
                return g.weights.size();
            }
        };
        return std::visit(Counter{}, value_);
    }

    std::vector<std::string> feature_names() const {
        if (is<SramGame>()) return as<SramGame>().scenarios.columns;
        std::vector<std::string> names(feature_count());
        for (std::size_t i = 0; i < names.size(); ++i) names[i] = "f" + std::to_string(i);
        return names;
    }

    CoalitionMask full_mask() const {
        return static_cast<CoalitionMask>((std::uint64_t{1} << feature_count()) - 1);
    }

    /// v(S) for the coalition encoded in `mask`. Pure; safe to call
    /// concurrently.
    double value_of(CoalitionMask mask) const;

private:
    void validate() const;

    Variant value_;
};

inline void CharacteristicGame::validate() const {
    struct Validator {
        void operator()(const BamGame& g) const {
            g.model.validate();
            if (g.baseline.size() != g.model.feature_count())
                throw InputError("game: baseline length " + std::to_string(g.baseline.size()) +
                                 " does not match model feature count " +
                                 std::to_string(g.model.feature_count()));
            if (g.explicand.size() != g.baseline.size())
                throw InputError("game: explicand length does not match baseline length");
            for (double v : g.baseline)
                if (!std::isfinite(v)) throw InputError("game: non-finite baseline entry");
            for (double v : g.explicand)
                if (!std::isfinite(v)) throw InputError("game: non-finite explicand entry");
        }
        void operator()(const SramGame& g) const {
            g.model.validate();
            g.scenarios.validate();
            g.risk.validate();
            if (g.baseline.size() != g.model.feature_count())
                throw InputError("game: baseline length " + std::to_string(g.baseline.size()) +
                                 " does not match model feature count " +
                                 std::to_string(g.model.feature_count()));
            if (g.scenarios.n_cols() != g.baseline.size())
                throw InputError("game: scenario matrix has " +
                                 std::to_string(g.scenarios.n_cols()) +
                                 " features, baseline has " + std::to_string(g.baseline.size()));
            for (double v : g.baseline)
                if (!std::isfinite(v)) throw InputError("game: non-finite baseline entry");
        }
        void operator()(const GaussianAnalyticGame& g) const {
            if (g.measure != RiskKind::StdDev && g.measure != RiskKind::Variance)
                throw InputError("analytic Gaussian game supports only std or var measures");
            const std::size_t m = g.weights.size();
            if (m == 0) throw InputError("game: empty weight vector");
            if (g.covariance.rows() != m || g.covariance.cols() != m)
                throw InputError("game: covariance must be " + std::to_string(m) + "x" +
                                 std::to_string(m));
            if (!g.covariance.all_finite())
                throw InputError("game: non-finite covariance entry");
            double scale = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    scale = std::max(scale, std::abs(g.covariance(i, j)));
            if (!is_symmetric(g.covariance, 1e-12 * std::max(1.0, scale)))
                throw InputError("game: covariance matrix is not symmetric");
            for (std::size_t i = 0; i < m; ++i)
                if (g.covariance(i, i) < 0.0)
                    throw InputError("game: negative variance on covariance diagonal");
            const auto eig = symmetric_eigenvalues(g.covariance);
            if (!eig.empty() && eig.front() < -1e-10 * std::max(1.0, scale))
                throw InputError("game: covariance matrix is not PSD (min eigenvalue " +
                                 std::to_string(eig.front()) + ")");
        }
    };
    std::visit(Validator{}, value_);
}

inline double CharacteristicGame::value_of(CoalitionMask mask) const {
    struct Evaluator {
        CoalitionMask mask;

        double operator()(const BamGame& g) const {
            const std::size_t m = g.baseline.size();
            std::vector<double> x(m);
            for (std::size_t j = 0; j < m; ++j)
                x[j] = (mask >> j & 1u) ? g.explicand[j] : g.baseline[j];
            return evaluate_model(g.model, x);
        }
        double operator()(const SramGame& g) const {
            const std::size_t m = g.baseline.size();
            const std::size_t n = g.scenarios.n_rows();
            std::vector<double> x(m);
            std::vector<double> outcomes(n);
            for (std::size_t t = 0; t < n; ++t) {
                const auto row = g.scenarios.values.row(t);
                for (std::size_t j = 0; j < m; ++j)
                    x[j] = (mask >> j & 1u) ? row[j] : g.baseline[j];
                outcomes[t] = evaluate_model(g.model, x);
            }
            return evaluate(g.risk, outcomes);
        }
        double operator()(const GaussianAnalyticGame& g) const {
            double q = 0.0;
            const std::size_t m = g.weights.size();
            for (std::size_t i = 0; i < m; ++i) {
                if (!(mask >> i & 1u)) continue;
                for (std::size_t j = 0; j < m; ++j)
                    if (mask >> j & 1u) q += g.weights[i] * g.weights[j] * g.covariance(i, j);
            }
            if (g.measure == RiskKind::Variance) return q;
            return std::sqrt(std::max(q, 0.0)); // clamp PSD rounding noise
        }
    };

    try {
        return std::visit(Evaluator{mask}, value_);
    } catch (const InputError& e) {
        throw InputError("coalition 0x" + [&] {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%x", mask);
            return std::string(buf);
        }() + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("coalition 0x" + [&] {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%x", mask);
            return std::string(buf);
        }() + ": " + e.what());
    }
}

/// Evaluates v(S) for every one of the 2^m coalitions, indexed by bitmask.
/// `threads` > 1 splits the mask range; results do not depend on the
/// split because each evaluation is pure.
inline std::vector<double> enumerate_char_values(const CharacteristicGame& game,
                                                 unsigned threads = 1,
                                                 std::size_t max_features = 25) {
    const std::size_t m = game.feature_count();
    if (m > max_features)
        throw NumericError("exact enumeration guard: " + std::to_string(m) + " features exceeds " +
                           std::to_string(max_features) + "; use shapley_sampled");
    const std::size_t count = std::size_t{1} << m;
    std::vector<double> table(count);

    if (threads <= 1 || count < 64) {
        for (std::size_t mask = 0; mask < count; ++mask)
            table[mask] = game.value_of(static_cast<CoalitionMask>(mask));
        return table;
    }

    const unsigned workers = std::min<unsigned>(threads, std::thread::hardware_concurrency() > 0
                                                             ? 4 * std::thread::hardware_concurrency()
                                                             : threads);
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t mask = begin; mask < end; ++mask)
                    table[mask] = game.value_of(static_cast<CoalitionMask>(mask));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return table;
}

} // namespace riskattr
