#ifndef COREPRUNE_PRUNING_HPP
#define COREPRUNE_PRUNING_HPP

// Neuron pruning of dense networks.
//
// Pruning layer i treats its neurons as a weighted set: neuron j is the point
// (W_i[j,:], b_i[j]) (bias folded in as an extra coordinate, so the query is
// (x, 1)), and its k weights are the outgoing column W_{i+1}[:, j]. One subset
// of neurons is chosen for all k consumers; layer i keeps only those rows and
// layer i+1 gets the reweighted columns. The network output size is unchanged.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "activation.hpp"
#include "error.hpp"
#include "network.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "scheme.hpp"
#include "weighted_set.hpp"

namespace coreprune {

enum class prune_direction { bottom_up, top_down };

struct layer_report {
    std::size_t layer = 0;
    std::size_t original_width = 0;
    std::size_t new_width = 0;
    std::optional<double> total_sensitivity;  // coreset scheme only
    std::size_t m = 0;
    std::uint64_t seed = 0;
    double beta = 0.0;
};

struct prune_report {
    std::string scheme;
    std::vector<layer_report> layers;
    std::size_t params_before = 0;
    std::size_t params_after = 0;

    double compression_ratio() const {
        return params_before == 0 ? 0.0
                                  : 1.0 - static_cast<double>(params_after) /
                                              static_cast<double>(params_before);
    }
};

struct prune_config {
    std::vector<std::size_t> per_layer_m;           // one per prunable layer
    std::vector<double> per_layer_epsilon;          // if non-empty, m comes from the sample-size bound
    std::vector<double> per_layer_beta;             // empty: data-independent defaults
    scheme_kind scheme = scheme_kind::coreset;
    prune_direction direction = prune_direction::bottom_up;
    std::uint64_t seed = 0;
    double c = 1.0;
    double delta = 0.1;
};

/// Neurons of layer i as a weighted set, consumers = neurons of layer i+1.
inline weighted_set layer_as_weighted_set(const dense_network& net, std::size_t i) {
    if (i + 1 >= net.depth())
        throw not_prunable("layer " + std::to_string(i) + " has no successor layer");
    const auto& cur = net.layer(i);
    const auto& next = net.layer(i + 1);
    Eigen::MatrixXd points(cur.weights.rows(), cur.weights.cols() + 1);
    points.leftCols(cur.weights.cols()) = cur.weights;
    points.col(cur.weights.cols()) = cur.bias;
    Eigen::MatrixXd weights = next.weights.transpose();
    return weighted_set(std::move(points), std::move(weights));
}

/// Radius of the augmented query (x, 1) when ||x|| <= beta.
inline double augmented_radius(double beta) { return std::sqrt(beta * beta + 1.0); }

/// Default input-ball radius for layer i: 1 for the first layer; otherwise
/// sqrt(width of layer i-1) times the largest |output| any neuron of layer i-1
/// can produce, evaluated recursively from the input ball.
inline double default_beta(const dense_network& net, std::size_t i) {
    double beta = 1.0;
    for (std::size_t l = 0; l < i; ++l) {
        const auto& layer = net.layer(l);
        const double radius = augmented_radius(beta);
        double worst = 0.0;
        for (Eigen::Index j = 0; j < layer.weights.rows(); ++j) {
            const double norm = std::sqrt(layer.weights.row(j).squaredNorm() + layer.bias(j) * layer.bias(j));
            const double bound = layer.act ? layer.act->ball_sup(norm, radius) : norm * radius;
            worst = std::max(worst, bound);
        }
        beta = std::sqrt(static_cast<double>(layer.out_units())) * worst;
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw invalid_parameter("default beta for layer " + std::to_string(i) +
                                    " is degenerate; pass per-layer beta explicitly");
    }
    return beta;
}

/// Replaces layer i's neurons by the selected subset and reweights layer i+1.
inline dense_network rebuild_with_coreset(const dense_network& net, std::size_t i, const coreset& cs) {
    const auto& cur = net.layer(i);
    const auto& next = net.layer(i + 1);
    const auto keep = cs.indices();
    if (keep.empty()) throw invalid_parameter("coreset selected no neurons");
    const auto width = static_cast<Eigen::Index>(keep.size());

    dense_layer pruned_cur;
    pruned_cur.act = cur.act;
    pruned_cur.weights.resize(width, cur.weights.cols());
    pruned_cur.bias.resize(width);
    dense_layer pruned_next;
    pruned_next.act = next.act;
    pruned_next.bias = next.bias;
    pruned_next.weights.resize(next.weights.rows(), width);
    for (Eigen::Index r = 0; r < width; ++r) {
        const auto j = keep[static_cast<std::size_t>(r)];
        if (j >= cur.out_units()) throw invalid_parameter("coreset index out of range");
        pruned_cur.weights.row(r) = cur.weights.row(static_cast<Eigen::Index>(j));
        pruned_cur.bias(r) = cur.bias(static_cast<Eigen::Index>(j));
        const auto& u = cs.entries.at(j).weights;
        for (Eigen::Index c = 0; c < next.weights.rows(); ++c)
            pruned_next.weights(c, r) = u.at(static_cast<std::size_t>(c));
    }

    std::vector<dense_layer> layers = net.layers();
    layers[i] = std::move(pruned_cur);
    layers[i + 1] = std::move(pruned_next);
    return dense_network(std::move(layers));
}

struct pruned_layer {
    dense_network net;
    layer_report report;
    coreset selection;
};

/// Prunes layer i to the neurons chosen by `scheme` with sample size m.
inline pruned_layer prune_layer(const dense_network& net, std::size_t i, std::size_t m, double beta,
                                scheme_kind scheme, std::uint64_t seed) {
    if (i + 1 >= net.depth())
        throw not_prunable("layer " + std::to_string(i) + " is the output layer");
    const auto& cur = net.layer(i);
    if (!cur.act) throw not_prunable("layer " + std::to_string(i) + " has no activation");
    if (!(beta > 0.0)) throw invalid_parameter("beta must be positive");

    const auto set = layer_as_weighted_set(net, i);
    const double radius = augmented_radius(beta);
    layer_report rep;
    rep.layer = i;
    rep.original_width = cur.out_units();
    rep.m = m;
    rep.seed = seed;
    rep.beta = beta;
    if (scheme == scheme_kind::coreset)
        rep.total_sensitivity = make_sensitivity_distribution(set, *cur.act, radius).total_sensitivity;

    auto cs = select(set, scheme, m, *cur.act, radius, seed);
    auto rebuilt = rebuild_with_coreset(net, i, cs);
    rep.new_width = cs.size();
    return {std::move(rebuilt), rep, std::move(cs)};
}

struct prune_result {
    dense_network net;
    prune_report report;
};

inline prune_result prune_network(const dense_network& net, const prune_config& cfg) {
    if (net.depth() < 2) throw not_prunable("network needs at least two layers");
    const std::size_t prunable = net.depth() - 1;
    const bool by_epsilon = !cfg.per_layer_epsilon.empty();
    if (by_epsilon ? cfg.per_layer_epsilon.size() != prunable : cfg.per_layer_m.size() != prunable)
        throw invalid_parameter("config lists " +
                                std::to_string(by_epsilon ? cfg.per_layer_epsilon.size()
                                                          : cfg.per_layer_m.size()) +
                                " layer budgets for " + std::to_string(prunable) + " prunable layers");
    if (!cfg.per_layer_beta.empty() && cfg.per_layer_beta.size() != prunable)
        throw invalid_parameter("config lists " + std::to_string(cfg.per_layer_beta.size()) +
                                " betas for " + std::to_string(prunable) + " prunable layers");
    for (auto m : cfg.per_layer_m)
        if (m < 1) throw invalid_parameter("per-layer m must be >= 1");
    for (auto b : cfg.per_layer_beta)
        if (!(b > 0.0)) throw invalid_parameter("per-layer beta must be positive");

    prune_result out{net, {}};
    out.report.scheme = std::string(scheme_name(cfg.scheme));
    out.report.params_before = net.parameter_count();

    std::vector<std::size_t> order(prunable);
    for (std::size_t k = 0; k < prunable; ++k)
        order[k] = cfg.direction == prune_direction::bottom_up ? k : prunable - 1 - k;

    for (const std::size_t i : order) {
        try {
            const double beta = cfg.per_layer_beta.empty() ? default_beta(out.net, i) : cfg.per_layer_beta[i];
            std::size_t m = by_epsilon ? 0 : cfg.per_layer_m[i];
            if (by_epsilon) {
                const auto& layer = out.net.layer(i);
                if (!layer.act) throw not_prunable("layer " + std::to_string(i) + " has no activation");
                const auto set = layer_as_weighted_set(out.net, i);
                const double t =
                    make_sensitivity_distribution(set, *layer.act, augmented_radius(beta)).total_sensitivity;
                m = sample_size(cfg.per_layer_epsilon[i], cfg.delta, cfg.c, set.dimension(), t).m;
            }
            auto step = prune_layer(out.net, i, m, beta, cfg.scheme, derive_seed(cfg.seed, i));
            out.net = std::move(step.net);
            out.report.layers.push_back(step.report);
        } catch (const error& e) {
            const std::string msg = "layer " + std::to_string(i) + ": " + e.message();
            if (dynamic_cast<const all_zero_sensitivity*>(&e)) throw all_zero_sensitivity(msg);
            if (dynamic_cast<const not_prunable*>(&e)) throw not_prunable(msg);
            if (dynamic_cast<const dimension_mismatch*>(&e)) throw dimension_mismatch(msg);
            throw invalid_parameter(msg);
        }
    }
    out.report.params_after = out.net.parameter_count();
    return out;
}

inline nlohmann::json report_to_json(const prune_report& rep) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : rep.layers) {
        nlohmann::json jl{{"layer", l.layer},          {"original_width", l.original_width},
                          {"new_width", l.new_width},  {"m", l.m},
                          {"seed", l.seed},            {"beta", l.beta}};
        jl["t"] = l.total_sensitivity ? nlohmann::json(*l.total_sensitivity) : nlohmann::json(nullptr);
        layers.push_back(std::move(jl));
    }
    return {{"scheme", rep.scheme},
            {"layers", std::move(layers)},
            {"params_before", rep.params_before},
            {"params_after", rep.params_after},
            {"compression_ratio", rep.compression_ratio()}};
}

/// One row per pruned layer, then a "total" row carrying the parameter counts.
inline std::string report_to_csv(const prune_report& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "layer,scheme,original_width,new_width,m,seed,beta,t,params_before,params_after,"
          "compression_ratio\n";
    for (const auto& l : rep.layers) {
        os << l.layer << ',' << rep.scheme << ',' << l.original_width << ',' << l.new_width << ','
           << l.m << ',' << l.seed << ',' << l.beta << ',';
        if (l.total_sensitivity) os << *l.total_sensitivity;
        os << ",,,\n";
    }
    os << "total," << rep.scheme << ",,,,,,," << rep.params_before << ',' << rep.params_after << ','
       << rep.compression_ratio() << '\n';
    return os.str();
}

}  // namespace coreprune

#endif  // COREPRUNE_PRUNING_HPP
