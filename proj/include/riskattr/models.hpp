#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "riskattr/errors.hpp"
#include "riskattr/matrix.hpp"

namespace riskattr {

/// Standard normal CDF via the complementary error function; absolute
/// error well below 1e-12 across the real line.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// Black-Scholes-Merton European call price.
///
/// Degenerate cases are the deterministic limits: sigma == 0 gives
/// max(S - K e^{-r tau}, 0) and S == 0 gives 0.
inline double bsm_price(double spot, double strike, double maturity, double sigma, double rate) {
    if (!(std::isfinite(spot) && std::isfinite(strike) && std::isfinite(maturity) &&
          std::isfinite(sigma) && std::isfinite(rate)))
        throw InputError("bsm_price: non-finite argument");
    if (spot < 0.0) throw InputError("bsm_price: spot must be >= 0");
    if (strike <= 0.0) throw InputError("bsm_price: strike must be > 0");
    if (maturity <= 0.0) throw InputError("bsm_price: maturity must be > 0");
    if (sigma < 0.0) throw InputError("bsm_price: volatility must be >= 0");

    if (spot == 0.0) return 0.0;
    const double discounted_strike = strike * std::exp(-rate * maturity);
    if (sigma == 0.0) return std::max(spot - discounted_strike, 0.0);

    const double vol = sigma * std::sqrt(maturity);
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * maturity) / vol;
    const double d2 = d1 - vol;
    return spot * norm_cdf(d1) - discounted_strike * norm_cdf(d2);
}

class ModelSpec;

/// f(x) = c . x
struct LinearPortfolio {
    std::vector<double> weights;
};

/// Call price as a function of (ln spot, ln volatility, ln rate); the
/// three inputs are exponentiated before pricing so that attributions are
/// on the log scale.
struct BsmCall {
    double strike = 0.0;
    double maturity = 0.0; // years
};

/// One affine layer: y = x W + b with W of shape (in x out), row-major.
struct FeedForwardLayer {
    Matrix weights;
    std::vector<double> bias;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

/// ReLU between layers, linear output, scalar output dimension. A network
/// with a single layer is purely affine.
struct FeedForward {
    std::vector<FeedForwardLayer> layers;
};

/// f~(x, e) = inner(x) + e: the last feature is passed through additively.
struct ResidualAugmented {
    std::unique_ptr<ModelSpec> inner;

    ResidualAugmented() = default;
    explicit ResidualAugmented(ModelSpec inner_model);
    ResidualAugmented(const ResidualAugmented& other);
    ResidualAugmented& operator=(const ResidualAugmented& other);
    ResidualAugmented(ResidualAugmented&&) noexcept = default;
    ResidualAugmented& operator=(ResidualAugmented&&) noexcept = default;
};

/// Tagged union over every model family the attribution engine can explain.
class ModelSpec {
public:
    using Variant = std::variant<LinearPortfolio, BsmCall, FeedForward, ResidualAugmented>;

    ModelSpec() : value_(LinearPortfolio{}) {}
    ModelSpec(LinearPortfolio m) : value_(std::move(m)) {}
    ModelSpec(BsmCall m) : value_(std::move(m)) {}
    ModelSpec(FeedForward m) : value_(std::move(m)) {}
    ModelSpec(ResidualAugmented m) : value_(std::move(m)) {}

    const Variant& value() const { return value_; }

    template <class T> bool is() const { return std::holds_alternative<T>(value_); }
    template <class T> const T& as() const { return std::get<T>(value_); }

    std::string variant_name() const {
        struct Namer {
            std::string operator()(const LinearPortfolio&) const { return "linear"; }
            std::string operator()(const BsmCall&) const { return "bsm_call"; }
            std::string operator()(const FeedForward&) const { return "mlp"; }
            std::string operator()(const ResidualAugmented&) const { return "residual_augmented"; }
        };
        return std::visit(Namer{}, value_);
    }

    std::size_t feature_count() const {
        struct Counter {
            std::size_t operator()(const LinearPortfolio& m) const { return m.weights.size(); }
            std::size_t operator()(const BsmCall&) const { return 3; }
            std::size_t operator()(const FeedForward& m) const {
                return m.layers.empty() ? 0 : m.layers.front().in_dim();
            }
            std::size_t operator()(const ResidualAugmented& m) const {
                return m.inner->feature_count() + 1;
            }
        };
        return std::visit(Counter{}, value_);
    }

    /// Structural validation: weight lengths, layer chaining, scalar output,
    /// positive strike/maturity. Throws InputError.
    void validate() const;

private:
    Variant value_;
};

inline ResidualAugmented::ResidualAugmented(ModelSpec inner_model)
    : inner(std::make_unique<ModelSpec>(std::move(inner_model))) {}

inline ResidualAugmented::ResidualAugmented(const ResidualAugmented& other)
    : inner(other.inner ? std::make_unique<ModelSpec>(*other.inner) : nullptr) {}

inline ResidualAugmented& ResidualAugmented::operator=(const ResidualAugmented& other) {
    if (this != &other)
        inner = other.inner ? std::make_unique<ModelSpec>(*other.inner) : nullptr;
    return *this;
}

inline void ModelSpec::validate() const {
    struct Validator {
        void operator()(const LinearPortfolio& m) const {
            if (m.weights.empty()) throw InputError("linear model: empty weight vector");
            for (double w : m.weights)
                if (!std::isfinite(w)) throw InputError("linear model: non-finite weight");
        }
        void operator()(const BsmCall& m) const {
            if (!(m.strike > 0.0)) throw InputError("bsm_call model: strike must be > 0");
            if (!(m.maturity > 0.0)) throw InputError("bsm_call model: maturity must be > 0");
        }
        void operator()(const FeedForward& m) const {
            if (m.layers.empty()) throw InputError("mlp model: no layers");
            for (std::size_t l = 0; l < m.layers.size(); ++l) {
                const auto& layer = m.layers[l];
                if (layer.in_dim() == 0 || layer.out_dim() == 0)
                    throw InputError("mlp model: empty layer " + std::to_string(l));
                if (layer.bias.size() != layer.out_dim())
                    throw InputError("mlp model: bias length mismatch in layer " +
                                     std::to_string(l));
                if (!layer.weights.all_finite())
                    throw InputError("mlp model: non-finite weight in layer " + std::to_string(l));
                for (double b : layer.bias)
                    if (!std::isfinite(b))
                        throw InputError("mlp model: non-finite bias in layer " +
                                         std::to_string(l));
                if (l + 1 < m.layers.size() && layer.out_dim() != m.layers[l + 1].in_dim())
                    throw InputError("mlp model: layer " + std::to_string(l) + " has " +
                                     std::to_string(layer.out_dim()) + " outputs but layer " +
                                     std::to_string(l + 1) + " expects " +
                                     std::to_string(m.layers[l + 1].in_dim()) + " inputs");
            }
            if (m.layers.back().out_dim() != 1)
                throw InputError("mlp model: output dimension must be 1, got " +
                                 std::to_string(m.layers.back().out_dim()));
        }
        void operator()(const ResidualAugmented& m) const {
            if (!m.inner) throw InputError("residual_augmented model: missing inner model");
            m.inner->validate();
        }
    };
    std::visit(Validator{}, value_);
}

/// Evaluates the model at an input point of matching dimension.
inline double evaluate_model(const ModelSpec& model, std::span<const double> x) {
    const std::size_t m = model.feature_count();
    if (x.size() != m)
        throw InputError("evaluate_model: input has " + std::to_string(x.size()) +
                         " features, model expects " + std::to_string(m));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]))
            throw InputError("evaluate_model: non-finite input at feature " + std::to_string(i));

    struct Evaluator {
        std::span<const double> x;

        double operator()(const LinearPortfolio& m) const {
            return dot(std::span<const double>(m.weights), x);
        }
        double operator()(const BsmCall& m) const {
            return bsm_price(std::exp(x[0]), m.strike, m.maturity, std::exp(x[1]),
                             std::exp(x[2]));
        }
        double operator()(const FeedForward& m) const {
            std::vector<double> cur(x.begin(), x.end());
            for (std::size_t l = 0; l < m.layers.size(); ++l) {
                const auto& layer = m.layers[l];
                std::vector<double> next(layer.out_dim());
                for (std::size_t j = 0; j < layer.out_dim(); ++j) {
                    double acc = layer.bias[j];
                    for (std::size_t i = 0; i < layer.in_dim(); ++i)
                        acc += cur[i] * layer.weights(i, j);
                    if (!std::isfinite(acc))
                        throw NumericError("mlp: non-finite activation in layer " +
                                           std::to_string(l) + ", unit " + std::to_string(j));
                    next[j] = acc;
                }
                if (l + 1 < m.layers.size())
                    for (double& v : next) v = std::max(v, 0.0);
                cur = std::move(next);
            }
            return cur[0];
        }
        double operator()(const ResidualAugmented& m) const {
            return evaluate_model(*m.inner, x.first(x.size() - 1)) + x.back();
        }
    };
    return std::visit(Evaluator{x}, model.value());
}

} // namespace riskattr
