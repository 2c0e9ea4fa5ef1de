#ifndef COREPRUNE_NETWORK_HPP
#define COREPRUNE_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "activation.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace coreprune {

/// Fully connected layer y = phi(W x + b). Row j of `weights` is neuron j's
/// incoming weight vector; an empty activation means raw (linear) outputs.
struct dense_layer {
    Eigen::MatrixXd weights;  // out_units x in_units
    Eigen::VectorXd bias;     // out_units
    std::optional<activation> act;

    std::size_t in_units() const noexcept { return static_cast<std::size_t>(weights.cols()); }
    std::size_t out_units() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    std::size_t parameter_count() const noexcept {
        return static_cast<std::size_t>(weights.size() + bias.size());
    }

    Eigen::VectorXd pre_activation(const Eigen::VectorXd& x) const { return weights * x + bias; }

    template <typename Derived>
    void apply_activation(Eigen::MatrixBase<Derived>& z) const {
        if (!act) return;
        const activation& f = *act;
        z = z.unaryExpr([&f](double v) { return f(v); });
    }

    friend bool operator==(const dense_layer& a, const dense_layer& b) {
        return a.act == b.act && a.weights.rows() == b.weights.rows() &&
               a.weights.cols() == b.weights.cols() && a.bias.size() == b.bias.size() &&
               a.weights == b.weights && a.bias == b.bias;
    }
};

class dense_network {
public:
    dense_network() = default;
    explicit dense_network(std::vector<dense_layer> layers) : layers_(std::move(layers)) {
        validate();
    }

    std::size_t depth() const noexcept { return layers_.size(); }
    const std::vector<dense_layer>& layers() const noexcept { return layers_; }
    const dense_layer& layer(std::size_t i) const { return layers_.at(i); }

    /// Mutable access for in-place parameter updates. Callers must keep shapes.
    dense_layer& layer_mut(std::size_t i) { return layers_.at(i); }

    std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in_units(); }
    std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().out_units(); }

    std::size_t parameter_count() const noexcept {
        std::size_t total = 0;
        for (const auto& l : layers_) total += l.parameter_count();
        return total;
    }

    /// Layer widths including the input, e.g. {784, 300, 100, 10}.
    std::vector<std::size_t> widths() const {
        std::vector<std::size_t> w;
        if (layers_.empty()) return w;
        w.push_back(input_size());
        for (const auto& l : layers_) w.push_back(l.out_units());
        return w;
    }

    void validate() const {
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const auto& l = layers_[i];
            const std::string where = "layer " + std::to_string(i);
            if (l.weights.rows() == 0 || l.weights.cols() == 0)
                throw dimension_mismatch(where + " has an empty weight matrix");
            if (l.bias.size() != l.weights.rows())
                throw dimension_mismatch(where + ": bias length " + std::to_string(l.bias.size()) +
                                         " != " + std::to_string(l.weights.rows()) + " rows");
            if (!l.weights.allFinite() || !l.bias.allFinite())
                throw invalid_parameter(where + " has non-finite parameters");
            if (i + 1 < layers_.size() && layers_[i + 1].in_units() != l.out_units())
                throw dimension_mismatch(where + " outputs " + std::to_string(l.out_units()) +
                                         " units but layer " + std::to_string(i + 1) + " expects " +
                                         std::to_string(layers_[i + 1].in_units()));
        }
    }

    friend bool operator==(const dense_network&, const dense_network&) = default;

private:
    std::vector<dense_layer> layers_;
};

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
/// `hidden` is applied to every layer except the last, which stays linear.
inline dense_network make_network(const std::vector<std::size_t>& widths, const activation& hidden,
                                  std::uint64_t seed) {
    if (widths.size() < 2) throw invalid_parameter("a network needs at least input and output widths");
    for (auto w : widths)
        if (w == 0) throw invalid_parameter("layer widths must be positive");
    rng gen(seed);
    std::vector<dense_layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const auto in = static_cast<Eigen::Index>(widths[i]);
        const auto out = static_cast<Eigen::Index>(widths[i + 1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        dense_layer l;
        l.weights.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) l.weights(r, c) = gen.uniform(-limit, limit);
        l.bias = Eigen::VectorXd::Zero(out);
        if (i + 2 < widths.size()) l.act = hidden;
        layers.push_back(std::move(l));
    }
    return dense_network(std::move(layers));
}

/// Outputs of every layer for input `x`; the last entry is the network output.
inline std::vector<Eigen::VectorXd> forward(const dense_network& net, const Eigen::VectorXd& x) {
    if (net.depth() == 0) throw invalid_parameter("network has no layers");
    if (static_cast<std::size_t>(x.size()) != net.input_size())
        throw dimension_mismatch("input has " + std::to_string(x.size()) + " entries, network expects " +
                                 std::to_string(net.input_size()));
    std::vector<Eigen::VectorXd> outs;
    outs.reserve(net.depth());
    const Eigen::VectorXd* cur = &x;
    for (const auto& l : net.layers()) {
        Eigen::VectorXd z = l.pre_activation(*cur);
        l.apply_activation(z);
        outs.push_back(std::move(z));
        cur = &outs.back();
    }
    return outs;
}

/// Network outputs for a batch of column-stacked inputs (in_units x batch).
inline Eigen::MatrixXd predict(const dense_network& net, const Eigen::MatrixXd& inputs) {
    if (net.depth() == 0) throw invalid_parameter("network has no layers");
    if (static_cast<std::size_t>(inputs.rows()) != net.input_size())
        throw dimension_mismatch("inputs have " + std::to_string(inputs.rows()) +
                                 " rows, network expects " + std::to_string(net.input_size()));
    Eigen::MatrixXd cur = inputs;
    for (const auto& l : net.layers()) {
        Eigen::MatrixXd z = l.weights * cur;
        z.colwise() += l.bias;
        l.apply_activation(z);
        cur = std::move(z);
    }
    return cur;
}

/// Labelled samples stored column-wise: inputs.col(s) is sample s.
struct dataset {
    Eigen::MatrixXd inputs;  // dim x count
    std::vector<int> labels;
    int classes = 10;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(inputs.rows()); }

    void validate() const {
        if (static_cast<std::size_t>(inputs.cols()) != labels.size())
            throw dimension_mismatch("dataset has " + std::to_string(inputs.cols()) + " inputs but " +
                                     std::to_string(labels.size()) + " labels");
        for (int y : labels)
            if (y < 0 || y >= classes)
                throw invalid_parameter("label " + std::to_string(y) + " outside [0," +
                                        std::to_string(classes) + ")");
    }

    /// Samples [first, first+count).
    dataset slice(std::size_t first, std::size_t count) const {
        if (first + count > size()) throw invalid_parameter("dataset slice out of range");
        dataset out;
        out.inputs = inputs.middleCols(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
        out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                          labels.begin() + static_cast<std::ptrdiff_t>(first + count));
        out.classes = classes;
        return out;
    }
};

/// Index of the largest entry; the lowest index wins ties.
template <typename Derived>
Eigen::Index argmax(const Eigen::MatrixBase<Derived>& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return best;
}

inline double accuracy(const dense_network& net, const dataset& data) {
    if (data.size() == 0) throw empty_dataset("cannot measure accuracy on an empty dataset");
    data.validate();
    if (net.output_size() != static_cast<std::size_t>(data.classes))
        throw dimension_mismatch("network has " + std::to_string(net.output_size()) +
                                 " outputs for " + std::to_string(data.classes) + " classes");
    constexpr Eigen::Index chunk = 1000;
    std::size_t correct = 0;
    const Eigen::Index n = data.inputs.cols();
    for (Eigen::Index start = 0; start < n; start += chunk) {
        const Eigen::Index len = std::min(chunk, n - start);
        const Eigen::MatrixXd out = predict(net, data.inputs.middleCols(start, len));
        for (Eigen::Index s = 0; s < len; ++s)
            if (argmax(out.col(s)) == data.labels[static_cast<std::size_t>(start + s)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace coreprune

#endif  // COREPRUNE_NETWORK_HPP
