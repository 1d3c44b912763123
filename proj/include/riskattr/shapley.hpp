#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/game.hpp"

namespace riskattr {

struct AttributionReport {
    std::vector<std::string> features;
    std::vector<double> attributions;
    double v_full = 0.0;
    double v_empty = 0.0;
    std::string method; // "exact" or "sampled"
    std::size_t permutations = 0; // sampled only
    std::uint64_t seed = 0;       // sampled only
    std::vector<double> stderrs;  // sampled only, per feature
    double completeness_residual = 0.0;

    double total() const {
        return std::accumulate(attributions.begin(), attributions.end(), 0.0);
    }
};

struct ShapleyOptions {
    std::size_t max_exact_features = 25;
    unsigned threads = 1;
};

namespace detail {

/// Shapley coalition weights |S|!(m-|S|-1)!/m! by coalition size, built with
/// the recurrence w(0) = 1/m, w(s) = w(s-1) * s / (m-s) to avoid factorial
/// overflow.
inline std::vector<double> coalition_weights(std::size_t m) {
    std::vector<double> w(m);
    w[0] = 1.0 / static_cast<double>(m);
    for (std::size_t s = 1; s < m; ++s)
        w[s] = w[s - 1] * static_cast<double>(s) / static_cast<double>(m - s);
    return w;
}

/// Uniform draw from [0, bound) by rejection so results are identical across
/// standard libraries; std::uniform_int_distribution is not portable bit-wise.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

inline void fisher_yates(std::vector<std::size_t>& perm, std::mt19937_64& rng) {
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[bounded_rand(rng, i)]);
}

} // namespace detail

/// Exact Shapley values from a precomputed characteristic table indexed by
/// coalition bitmask (size 2^m).
inline AttributionReport shapley_exact_from_table(const std::vector<double>& table,
                                                  std::vector<std::string> features) {
    const std::size_t m = features.size();
    if (m == 0) throw InputError("shapley: no features");
    if (table.size() != (std::size_t{1} << m))
        throw InputError("shapley: characteristic table has " + std::to_string(table.size()) +
                         " entries, expected 2^" + std::to_string(m));
    const auto weights = detail::coalition_weights(m);
    const std::size_t full = table.size() - 1;

    AttributionReport report;
    report.features = std::move(features);
    report.attributions.assign(m, 0.0);
    report.v_full = table[full];
    report.v_empty = table[0];
    report.method = "exact";

    for (std::size_t mask = 0; mask < table.size(); ++mask) {
        const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
        for (std::size_t i = 0; i < m; ++i) {
            if (mask >> i & 1u) continue;
            const double marginal = table[mask | (std::size_t{1} << i)] - table[mask];
            report.attributions[i] += weights[size] * marginal;
        }
    }
    report.completeness_residual = report.total() - (report.v_full - report.v_empty);
    return report;
}

inline AttributionReport shapley_exact(const CharacteristicGame& game,
                                       const ShapleyOptions& options = {}) {
    const std::size_t m = game.feature_count();
    if (m > options.max_exact_features)
        throw NumericError("exact Shapley guard: " + std::to_string(m) + " features exceeds " +
                           std::to_string(options.max_exact_features) + "; use shapley_sampled");
    const auto table = enumerate_char_values(game, options.threads, options.max_exact_features);
    return shapley_exact_from_table(table, game.feature_names());
}

/// Permutation-sampled Shapley. Each permutation p gets its own generator
/// seeded with {seed, p}, so the marginals of permutation p are identical no
/// matter how permutations are distributed over threads; the reduction runs
/// in fixed index order. Completeness holds exactly per permutation because
/// the marginals telescope from v(empty) to v(full).
inline AttributionReport shapley_sampled(const CharacteristicGame& game,
                                         std::size_t permutations, std::uint64_t seed,
                                         const ShapleyOptions& options = {}) {
    const std::size_t m = game.feature_count();
    if (m == 0) throw InputError("shapley: no features");
    if (permutations < 2)
        throw InputError("shapley: need at least 2 permutations for a standard error");

    const double v_empty = game.value_of(0);
    const double v_full = game.value_of(game.full_mask());

    // Linear SRAM games admit an O(n) incremental outcome update per
    // permutation step instead of re-evaluating the model over all entered
    // features; the endpoints stay pinned to the generic values, so
    // completeness still telescopes exactly.
    struct LinearFastPath {
        double base = 0.0;
        std::vector<std::vector<double>> deltas; // [feature][scenario]
        const RiskMeasureSpec* risk = nullptr;
    };
    std::optional<LinearFastPath> fast;
    if (game.is<SramGame>()) {
        const auto& g = game.as<SramGame>();
        if (g.model.is<LinearPortfolio>()) {
            const auto& w = g.model.as<LinearPortfolio>().weights;
            LinearFastPath fp;
            fp.risk = &g.risk;
            double base = 0.0;
            for (std::size_t j = 0; j < m; ++j) base += w[j] * g.baseline[j];
            fp.base = base;
            fp.deltas.assign(m, std::vector<double>(g.scenarios.n_rows()));
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t t = 0; t < g.scenarios.n_rows(); ++t)
                    fp.deltas[j][t] = w[j] * (g.scenarios.values(t, j) - g.baseline[j]);
            fast.emplace(std::move(fp));
        }
    }

    // marginals[p * m + i] = marginal contribution of feature i in permutation p
    std::vector<double> marginals(permutations * m);

    auto run_permutation = [&](std::size_t p) {
        std::seed_seq sseq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                           static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(p & 0xffffffffu),
                           static_cast<std::uint32_t>(p >> 32)};
        std::mt19937_64 rng(sseq);
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        detail::fisher_yates(order, rng);

        if (fast) {
            std::vector<double> outcomes(fast->deltas[0].size(), fast->base);
            double prev = v_empty;
            for (std::size_t step = 0; step < m; ++step) {
                const std::size_t i = order[step];
                const auto& delta = fast->deltas[i];
                for (std::size_t t = 0; t < outcomes.size(); ++t) outcomes[t] += delta[t];
                const double next = step + 1 == m ? v_full : evaluate(*fast->risk, outcomes);
                marginals[p * m + i] = next - prev;
                prev = next;
            }
            return;
        }

        CoalitionMask mask = 0;
        double prev = v_empty;
        for (std::size_t step = 0; step < m; ++step) {
            const std::size_t i = order[step];
            mask |= CoalitionMask{1} << i;
            const double next = step + 1 == m ? v_full : game.value_of(mask);
            marginals[p * m + i] = next - prev;
            prev = next;
        }
    };

    if (options.threads <= 1 || permutations < 8) {
        for (std::size_t p = 0; p < permutations; ++p) run_permutation(p);
    } else {
        const unsigned workers = std::min<std::size_t>(options.threads, permutations);
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mutex;
        const std::size_t chunk = (permutations + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(permutations, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    for (std::size_t p = begin; p < end; ++p) run_permutation(p);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    AttributionReport report;
    report.features = game.feature_names();
    report.attributions.assign(m, 0.0);
    report.stderrs.assign(m, 0.0);
    report.v_full = v_full;
    report.v_empty = v_empty;
    report.method = "sampled";
    report.permutations = permutations;
    report.seed = seed;

    const double np = static_cast<double>(permutations);
    for (std::size_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (std::size_t p = 0; p < permutations; ++p) mean += marginals[p * m + i];
        mean /= np;
        double ss = 0.0;
        for (std::size_t p = 0; p < permutations; ++p) {
            const double d = marginals[p * m + i] - mean;
            ss += d * d;
        }
        report.attributions[i] = mean;
        report.stderrs[i] = std::sqrt(ss / (np - 1.0) / np);
    }
    report.completeness_residual = report.total() - (v_full - v_empty);
    return report;
}

/// sqrt of summed per-feature sampling variances; the scale against which
/// sampled completeness is judged.
inline double aggregate_stderr(const AttributionReport& report) {
    double s = 0.0;
    for (double e : report.stderrs) s += e * e;
    return std::sqrt(s);
}

} // namespace riskattr
