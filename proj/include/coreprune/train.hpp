#ifndef COREPRUNE_TRAIN_HPP
#define COREPRUNE_TRAIN_HPP

// Minibatch SGD on softmax cross-entropy, plus the convergence-driven
// fine-tuning loop used after pruning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "network.hpp"
#include "rng.hpp"

namespace coreprune {

struct sgd_params {
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
};

struct parameter_gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> bias;
    double loss = 0.0;  // mean over the batch
};

/// Column-wise log-softmax of `logits` (classes x batch).
inline Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const double mx = logits.col(c).maxCoeff();
        const double lse = mx + std::log((logits.col(c).array() - mx).exp().sum());
        out.col(c) = logits.col(c).array() - lse;
    }
    return out;
}

/// Mean cross-entropy of column-stacked logits against `labels`.
inline double cross_entropy(const Eigen::MatrixXd& logits, std::span<const int> labels) {
    if (static_cast<std::size_t>(logits.cols()) != labels.size())
        throw dimension_mismatch("logit columns != label count");
    const Eigen::MatrixXd lp = log_softmax(logits);
    double total = 0.0;
    for (std::size_t s = 0; s < labels.size(); ++s)
        total -= lp(labels[s], static_cast<Eigen::Index>(s));
    return total / static_cast<double>(labels.size());
}

/// Mean loss and its gradient over a batch (inputs are columns).
inline parameter_gradients backprop(const dense_network& net, const Eigen::MatrixXd& inputs,
                                    std::span<const int> labels) {
    const std::size_t depth = net.depth();
    if (depth == 0) throw invalid_parameter("network has no layers");
    if (static_cast<std::size_t>(inputs.rows()) != net.input_size())
        throw dimension_mismatch("batch rows != network input size");
    if (static_cast<std::size_t>(inputs.cols()) != labels.size())
        throw dimension_mismatch("batch columns != label count");
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= net.output_size())
            throw dimension_mismatch("label " + std::to_string(y) + " has no output unit");

    // pre[l] = W_l a_{l-1} + b_l, post[l] = phi(pre[l]); post[-1] is the input.
    std::vector<Eigen::MatrixXd> pre(depth), post(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& layer = net.layer(l);
        const Eigen::MatrixXd& in = l == 0 ? inputs : post[l - 1];
        pre[l] = layer.weights * in;
        pre[l].colwise() += layer.bias;
        post[l] = pre[l];
        layer.apply_activation(post[l]);
    }

    const double batch = static_cast<double>(labels.size());
    parameter_gradients g;
    g.weights.resize(depth);
    g.bias.resize(depth);

    const Eigen::MatrixXd lp = log_softmax(post.back());
    double loss = 0.0;
    Eigen::MatrixXd delta = lp.array().exp();  // softmax
    for (std::size_t s = 0; s < labels.size(); ++s) {
        const auto col = static_cast<Eigen::Index>(s);
        loss -= lp(labels[s], col);
        delta(labels[s], col) -= 1.0;
    }
    g.loss = loss / batch;
    delta /= batch;  // d loss / d post[last]

    for (std::size_t l = depth; l-- > 0;) {
        const auto& layer = net.layer(l);
        if (layer.act) {
            const activation& f = *layer.act;
            delta.array() *= pre[l].unaryExpr([&f](double v) { return f.derivative(v); }).array();
        }
        const Eigen::MatrixXd& in = l == 0 ? inputs : post[l - 1];
        g.weights[l] = delta * in.transpose();
        g.bias[l] = delta.rowwise().sum();
        if (l > 0) delta = layer.weights.transpose() * delta;
    }
    return g;
}

namespace detail {

inline void gather_batch(const dataset& data, std::span<const std::size_t> idx, Eigen::MatrixXd& x,
                         std::vector<int>& y) {
    x.resize(data.inputs.rows(), static_cast<Eigen::Index>(idx.size()));
    y.resize(idx.size());
    for (std::size_t s = 0; s < idx.size(); ++s) {
        x.col(static_cast<Eigen::Index>(s)) = data.inputs.col(static_cast<Eigen::Index>(idx[s]));
        y[s] = data.labels[idx[s]];
    }
}

inline void check_trainable(const dense_network& net, const dataset& data) {
    data.validate();
    if (data.size() == 0) throw empty_dataset("training set is empty");
    if (net.input_size() != data.dimension())
        throw dimension_mismatch("network input " + std::to_string(net.input_size()) +
                                 " != data dimension " + std::to_string(data.dimension()));
    if (net.output_size() != static_cast<std::size_t>(data.classes))
        throw dimension_mismatch("network has " + std::to_string(net.output_size()) +
                                 " outputs for " + std::to_string(data.classes) + " classes");
}

/// One pass over `data` in a seeded random order; updates `net` in place.
inline double sgd_epoch(dense_network& net, const dataset& data, double lr, std::size_t batch_size,
                        rng& gen) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[gen.index(i)]);

    Eigen::MatrixXd x;
    std::vector<int> y;
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t len = std::min(batch_size, order.size() - start);
        gather_batch(data, std::span(order).subspan(start, len), x, y);
        const auto g = backprop(net, x, y);
        if (!std::isfinite(g.loss))
            throw non_finite_loss("loss became " + std::to_string(g.loss) + " at batch " +
                                  std::to_string(batches) + "; lower the learning rate");
        for (std::size_t l = 0; l < net.depth(); ++l) {
            auto& layer = net.layer_mut(l);
            layer.weights -= lr * g.weights[l];
            layer.bias -= lr * g.bias[l];
        }
        loss_sum += g.loss;
        ++batches;
    }
    return batches ? loss_sum / static_cast<double>(batches) : 0.0;
}

}  // namespace detail

/// Plain minibatch SGD. Deterministic for a fixed seed.
inline dense_network train_sgd(dense_network net, const dataset& train, const sgd_params& hp,
                               const std::function<void(std::size_t, double)>& on_epoch = {}) {
    detail::check_trainable(net, train);
    if (hp.batch_size == 0) throw invalid_parameter("batch size must be >= 1");
    if (!(hp.learning_rate >= 0.0)) throw invalid_parameter("learning rate must be >= 0");
    rng gen(hp.seed);
    for (std::size_t e = 0; e < hp.epochs; ++e) {
        const double loss = detail::sgd_epoch(net, train, hp.learning_rate, hp.batch_size, gen);
        if (on_epoch) on_epoch(e, loss);
    }
    return net;
}

/// Splits off the last `holdout` samples: {remaining, holdout}.
inline std::pair<dataset, dataset> holdout_split(const dataset& data, std::size_t holdout) {
    if (holdout == 0 || holdout >= data.size())
        throw invalid_parameter("holdout of " + std::to_string(holdout) + " needs 1 <= holdout < " +
                                std::to_string(data.size()));
    const std::size_t keep = data.size() - holdout;
    return {data.slice(0, keep), data.slice(keep, holdout)};
}

struct convergence_rule {
    double min_improvement = 0.0005;  // validation accuracy, absolute
    std::size_t patience = 2;         // consecutive epochs below min_improvement
    std::size_t max_epochs = 20;
};

struct fine_tune_result {
    dense_network net;
    std::size_t epochs = 0;
    std::vector<double> validation_accuracy;  // after each epoch
};

/// SGD until validation accuracy stalls per `rule`.
inline fine_tune_result fine_tune(dense_network net, const dataset& train, const dataset& validation,
                                  const sgd_params& hp, const convergence_rule& rule = {}) {
    detail::check_trainable(net, train);
    if (hp.batch_size == 0) throw invalid_parameter("batch size must be >= 1");
    rng gen(hp.seed);
    fine_tune_result out{std::move(net), 0, {}};
    double previous = accuracy(out.net, validation);
    std::size_t stalled = 0;
    while (out.epochs < rule.max_epochs) {
        detail::sgd_epoch(out.net, train, hp.learning_rate, hp.batch_size, gen);
        ++out.epochs;
        const double acc = accuracy(out.net, validation);
        out.validation_accuracy.push_back(acc);
        stalled = acc - previous < rule.min_improvement ? stalled + 1 : 0;
        previous = acc;
        if (stalled >= rule.patience) break;
    }
    return out;
}

}  // namespace coreprune

#endif  // COREPRUNE_TRAIN_HPP
