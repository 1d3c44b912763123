#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "riskattr/errors.hpp"
#include "riskattr/models.hpp"

namespace riskattr {

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const std::string& key,
                                           const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(where + ": missing field \"" + key + "\"");
    return *it;
}

inline std::vector<double> number_array(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw InputError(where + ": expected a number");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

/// Builds a validated ModelSpec from its JSON form. `where` prefixes error
/// messages, typically the file path.
inline ModelSpec model_from_json(const nlohmann::json& j, const std::string& where = "model") {
    if (!j.is_object()) throw InputError(where + ": model must be a JSON object");
    const auto& variant = detail::require_field(j, "variant", where);
    if (!variant.is_string()) throw InputError(where + ": \"variant\" must be a string");
    const std::string kind = variant.get<std::string>();

    ModelSpec spec;
    if (kind == "linear") {
        LinearPortfolio m;
        m.weights = detail::number_array(detail::require_field(j, "weights", where),
                                         where + ".weights");
        spec = ModelSpec(std::move(m));
    } else if (kind == "bsm_call") {
        BsmCall m;
        const auto& strike = detail::require_field(j, "strike", where);
        const auto& maturity = detail::require_field(j, "maturity", where);
        if (!strike.is_number() || !maturity.is_number())
            throw InputError(where + ": strike and maturity must be numbers");
        m.strike = strike.get<double>();
        m.maturity = maturity.get<double>();
        spec = ModelSpec(std::move(m));
    } else if (kind == "mlp") {
        // The exporter must state both activations; only relu hidden layers
        // with a linear output are supported. Any input normalization has to
        // be baked into the first layer.
        const auto& act = detail::require_field(j, "activation", where);
        if (!act.is_string() || act.get<std::string>() != "relu")
            throw InputError(where + ": only \"relu\" hidden activation is supported");
        const auto& out_act = detail::require_field(j, "output_activation", where);
        if (!out_act.is_string() || out_act.get<std::string>() != "linear")
            throw InputError(where + ": only \"linear\" output activation is supported");

        const auto& layers = detail::require_field(j, "layers", where);
        if (!layers.is_array() || layers.empty())
            throw InputError(where + ": \"layers\" must be a non-empty array");
        FeedForward m;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const std::string lwhere = where + ".layers[" + std::to_string(l) + "]";
            const auto& jl = layers[l];
            if (!jl.is_object()) throw InputError(lwhere + ": layer must be an object");
            const auto& rows = detail::require_field(jl, "weights", lwhere);
            if (!rows.is_array() || rows.empty())
                throw InputError(lwhere + ".weights: expected a non-empty nested array");
            FeedForwardLayer layer;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                auto row = detail::number_array(rows[r], lwhere + ".weights[" +
                                                             std::to_string(r) + "]");
                if (r == 0) {
                    layer.weights = Matrix(rows.size(), row.size());
                } else if (row.size() != layer.weights.cols()) {
                    throw InputError(lwhere + ".weights: ragged rows (row " + std::to_string(r) +
                                     " has " + std::to_string(row.size()) + " entries, expected " +
                                     std::to_string(layer.weights.cols()) + ")");
                }
                for (std::size_t c = 0; c < row.size(); ++c) layer.weights(r, c) = row[c];
            }
            layer.bias = detail::number_array(detail::require_field(jl, "bias", lwhere),
                                              lwhere + ".bias");
            m.layers.push_back(std::move(layer));
        }
        spec = ModelSpec(std::move(m));
    } else if (kind == "residual_augmented") {
        spec = ModelSpec(ResidualAugmented(
            model_from_json(detail::require_field(j, "inner", where), where + ".inner")));
    } else {
        throw InputError(where + ": unknown variant \"" + kind +
                         "\" (expected linear|bsm_call|mlp|residual_augmented)");
    }

    spec.validate();
    return spec;
}

/// Loads and validates a model file. Parse and schema errors carry the path
/// and, for parse failures, the byte offset reported by the JSON parser.
inline ModelSpec load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": JSON parse error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
    return model_from_json(j, path);
}

inline nlohmann::json model_to_json(const ModelSpec& model) {
    struct Writer {
        nlohmann::json operator()(const LinearPortfolio& m) const {
            return {{"variant", "linear"}, {"weights", m.weights}};
        }
        nlohmann::json operator()(const BsmCall& m) const {
            return {{"variant", "bsm_call"}, {"strike", m.strike}, {"maturity", m.maturity}};
        }
        nlohmann::json operator()(const FeedForward& m) const {
            nlohmann::json layers = nlohmann::json::array();
            for (const auto& layer : m.layers) {
                nlohmann::json rows = nlohmann::json::array();
                for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
                    nlohmann::json row = nlohmann::json::array();
                    for (std::size_t c = 0; c < layer.weights.cols(); ++c)
                        row.push_back(layer.weights(r, c));
                    rows.push_back(std::move(row));
                }
                layers.push_back({{"weights", std::move(rows)}, {"bias", layer.bias}});
            }
            return {{"variant", "mlp"},
                    {"activation", "relu"},
                    {"output_activation", "linear"},
                    {"layers", std::move(layers)}};
        }
        nlohmann::json operator()(const ResidualAugmented& m) const {
            return {{"variant", "residual_augmented"}, {"inner", model_to_json(*m.inner)}};
        }
    };
    return std::visit(Writer{}, model.value());
}

} // namespace riskattr
