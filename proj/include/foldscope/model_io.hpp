#pragma once

#include <cmath>
#include <istream>
#include <iterator>
#include <string>

#include "foldscope/json_util.hpp"
#include "foldscope/mlp.hpp"

namespace foldscope {

namespace detail {

inline double model_number(const Json& v, std::size_t layer) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "NaN" || s == "Infinity" || s == "-Infinity") {
            throw ModelError(ModelError::Reason::NonFinite, layer, s);
        }
        throw ModelError(ModelError::Reason::Malformed, layer, "expected a number, got string \"" + s + "\"");
    }
    if (!v.is_number()) throw ModelError(ModelError::Reason::Malformed, layer, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ModelError(ModelError::Reason::NonFinite, layer, "number overflows double");
    return d;
}

}  // namespace detail

/// Parses a weight document:
///   {"input_dim": d, "layers": [{"weights": [[...]], "bias": [...], "activation": "relu"}, ...]}
/// weights[i][j] is the weight from input j to neuron i. The last layer is the output layer.
inline Mlp parse_model(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(detail::quote_nonfinite_tokens(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(ModelError::Reason::Malformed, std::nullopt, e.what());
    }
    if (!doc.is_object()) throw ModelError(ModelError::Reason::Malformed, std::nullopt, "top level must be an object");
    if (!doc.contains("input_dim") || !doc["input_dim"].is_number_integer() || doc["input_dim"].get<long long>() <= 0) {
        throw ModelError(ModelError::Reason::Malformed, std::nullopt, "\"input_dim\" must be a positive integer");
    }
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
        throw ModelError(ModelError::Reason::Malformed, std::nullopt, "\"layers\" must be a non-empty array");
    }
    const auto input_dim = static_cast<std::size_t>(doc["input_dim"].get<long long>());

    std::vector<Layer> layers;
    std::size_t k = 0;
    for (const auto& jl : doc["layers"]) {
        if (!jl.is_object()) throw ModelError(ModelError::Reason::Malformed, k, "layer must be an object");
        if (!jl.contains("weights") || !jl["weights"].is_array() || jl["weights"].empty()) {
            throw ModelError(ModelError::Reason::Malformed, k, "\"weights\" must be a non-empty array of rows");
        }
        if (!jl.contains("bias") || !jl["bias"].is_array()) {
            throw ModelError(ModelError::Reason::Malformed, k, "\"bias\" must be an array");
        }
        if (!jl.contains("activation") || !jl["activation"].is_string()) {
            throw ModelError(ModelError::Reason::Malformed, k, "\"activation\" must be a string");
        }
        const auto act_name = jl["activation"].get<std::string>();
        const auto act = parse_activation(act_name);
        if (!act) throw ModelError(ModelError::Reason::Malformed, k, "unknown activation \"" + act_name + "\"");

        const auto& rows = jl["weights"];
        const std::size_t n_rows = rows.size();
        if (!rows[0].is_array()) throw ModelError(ModelError::Reason::Malformed, k, "weight rows must be arrays");
        const std::size_t n_cols = rows[0].size();
        Layer layer;
        layer.weights = Matrix(n_rows, n_cols);
        layer.activation = *act;
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (!rows[i].is_array()) throw ModelError(ModelError::Reason::Malformed, k, "weight rows must be arrays");
            if (rows[i].size() != n_cols) {
                throw ModelError(ModelError::Reason::DimensionMismatch, k, "ragged weight rows");
            }
            for (std::size_t j = 0; j < n_cols; ++j) layer.weights(i, j) = detail::model_number(rows[i][j], k);
        }
        for (const auto& b : jl["bias"]) layer.bias.push_back(detail::model_number(b, k));
        layers.push_back(std::move(layer));
        ++k;
    }
    return Mlp(input_dim, std::move(layers));
}

inline Mlp load_model(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_model(text);
}

inline Mlp load_model_file(const std::string& path) { return parse_model(read_text_file(path)); }

inline Json model_to_json(const Mlp& net) {
    Json doc;
    doc["input_dim"] = net.input_dim();
    Json layers = Json::array();
    for (const auto& l : net.layers()) {
        Json jl;
        Json rows = Json::array();
        for (std::size_t i = 0; i < l.weights.rows; ++i) {
            const auto r = l.weights.row(i);
            rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = l.bias;
        jl["activation"] = std::string(activation_name(l.activation));
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

inline std::string serialize_model(const Mlp& net) { return dump_json(model_to_json(net)); }

inline void save_model_file(const Mlp& net, const std::string& path) { write_text_file(path, serialize_model(net)); }

}  // namespace foldscope
