#ifndef COREPRUNE_MODEL_IO_HPP
#define COREPRUNE_MODEL_IO_HPP

// Model files are JSON documents:
//   {"format_version": 1,
//    "layers": [{"activation": "relu" | null, "softclip_param": 4.0,
//                "weights": [[...], ...], "bias": [...]}, ...]}
// Weights are row-major (one array per output unit). Doubles are written in
// shortest round-trip form, so save/load reproduces every value exactly.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "activation.hpp"
#include "error.hpp"
#include "io.hpp"
#include "network.hpp"

namespace coreprune {

inline constexpr int model_format_version = 1;

inline nlohmann::json model_to_json(const dense_network& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json jl;
        if (l.act) {
            jl["activation"] = std::string(l.act->name());
            if (l.act->param()) jl["softclip_param"] = *l.act->param();
        } else {
            jl["activation"] = nullptr;
        }
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) row.push_back(l.weights(r, c));
            rows.push_back(std::move(row));
        }
        jl["weights"] = std::move(rows);
        nlohmann::json bias = nlohmann::json::array();
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) bias.push_back(l.bias(r));
        jl["bias"] = std::move(bias);
        layers.push_back(std::move(jl));
    }
    return {{"format_version", model_format_version}, {"layers", std::move(layers)}};
}

namespace detail {

inline double model_number(const nlohmann::json& v, const std::string& path) {
    if (!v.is_number()) throw malformed_model(path + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw malformed_model(path + ": non-finite value");
    return x;
}

}  // namespace detail

inline dense_network model_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw malformed_model("<root>: expected an object");
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        throw malformed_model("format_version: missing or not an integer");
    if (doc["format_version"].get<int>() != model_format_version)
        throw malformed_model("format_version: unsupported version " + doc["format_version"].dump());
    if (!doc.contains("layers") || !doc["layers"].is_array())
        throw malformed_model("layers: missing or not an array");
    const auto& jlayers = doc["layers"];
    if (jlayers.empty()) throw malformed_model("layers: network has no layers");

    std::vector<dense_layer> layers;
    for (std::size_t i = 0; i < jlayers.size(); ++i) {
        const std::string base = "layers[" + std::to_string(i) + "]";
        const auto& jl = jlayers[i];
        if (!jl.is_object()) throw malformed_model(base + ": expected an object");
        dense_layer l;

        if (!jl.contains("activation")) throw malformed_model(base + ".activation: missing");
        const auto& ja = jl["activation"];
        if (!ja.is_null()) {
            if (!ja.is_string()) throw malformed_model(base + ".activation: expected a string or null");
            const auto kind = activation::parse_kind(ja.get<std::string>());
            if (!kind) throw malformed_model(base + ".activation: unknown tag '" + ja.get<std::string>() + "'");
            std::optional<double> param;
            if (jl.contains("softclip_param"))
                param = detail::model_number(jl["softclip_param"], base + ".softclip_param");
            try {
                l.act = activation::make(*kind, param);
            } catch (const invalid_parameter& e) {
                throw malformed_model(base + ".softclip_param: " + e.what());
            }
        }

        if (!jl.contains("weights") || !jl["weights"].is_array() || jl["weights"].empty())
            throw malformed_model(base + ".weights: missing or empty");
        const auto& jw = jl["weights"];
        const std::size_t rows = jw.size();
        if (!jw[0].is_array() || jw[0].empty())
            throw malformed_model(base + ".weights[0]: expected a non-empty array");
        const std::size_t cols = jw[0].size();
        l.weights.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string rp = base + ".weights[" + std::to_string(r) + "]";
            if (!jw[r].is_array() || jw[r].size() != cols)
                throw malformed_model(rp + ": expected " + std::to_string(cols) + " entries");
            for (std::size_t c = 0; c < cols; ++c)
                l.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    detail::model_number(jw[r][c], rp + "[" + std::to_string(c) + "]");
        }

        if (!jl.contains("bias") || !jl["bias"].is_array())
            throw malformed_model(base + ".bias: missing or not an array");
        const auto& jb = jl["bias"];
        if (jb.size() != rows)
            throw malformed_model(base + ".bias: length " + std::to_string(jb.size()) + " != " +
                                  std::to_string(rows) + " weight rows");
        l.bias.resize(static_cast<Eigen::Index>(rows));
        for (std::size_t r = 0; r < rows; ++r)
            l.bias(static_cast<Eigen::Index>(r)) =
                detail::model_number(jb[r], base + ".bias[" + std::to_string(r) + "]");

        if (i > 0 && layers.back().out_units() != l.in_units())
            throw malformed_model(base + ".weights: " + std::to_string(cols) + " columns but layers[" +
                                  std::to_string(i - 1) + "] has " +
                                  std::to_string(layers.back().out_units()) + " outputs");
        layers.push_back(std::move(l));
    }
    return dense_network(std::move(layers));
}

inline void save_model(const dense_network& net, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(net).dump() + "\n");
}

inline dense_network load_model(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw malformed_model(path.string() + ": file not found");
    const std::string text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw malformed_model(path.string() + ": " + e.what());
    }
    return model_from_json(doc);
}

}  // namespace coreprune

#endif  // COREPRUNE_MODEL_IO_HPP
