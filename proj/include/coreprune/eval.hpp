#ifndef COREPRUNE_EVAL_HPP
#define COREPRUNE_EVAL_HPP

// Approximation-error metrics and error-vs-size sweeps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "activation.hpp"
#include "error.hpp"
#include "network.hpp"
#include "pruning.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "scheme.hpp"
#include "weighted_set.hpp"

namespace coreprune {

/// Exact per-consumer sums sum_p w_i(p) phi(p^T x).
inline Eigen::VectorXd full_response(const weighted_set& set, const activation& act,
                                     const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != set.dimension())
        throw dimension_mismatch("query has dimension " + std::to_string(x.size()) + ", points have " +
                                 std::to_string(set.dimension()));
    const Eigen::VectorXd phi = (set.coords() * x).unaryExpr([&act](double v) { return act(v); });
    return set.weights().transpose() * phi;
}

/// Coreset estimate sum_{q in C} u_i(q) phi(q^T x) per consumer.
inline Eigen::VectorXd coreset_response(const weighted_set& set, const coreset& cs,
                                        const activation& act, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != set.dimension())
        throw dimension_mismatch("query has dimension " + std::to_string(x.size()) + ", points have " +
                                 std::to_string(set.dimension()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.consumers()));
    for (const auto& [q, e] : cs.entries) {
        const double phi = act(set.point(q).dot(x));
        for (std::size_t i = 0; i < set.consumers(); ++i)
            out(static_cast<Eigen::Index>(i)) += e.weights.at(i) * phi;
    }
    return out;
}

/// Mean over queries (columns of `queries`) and consumers of the additive error.
inline double neuron_additive_error(const weighted_set& set, const coreset& cs, const activation& act,
                                    const Eigen::MatrixXd& queries) {
    if (queries.cols() == 0) throw invalid_parameter("need at least one query");
    if (static_cast<std::size_t>(queries.rows()) != set.dimension())
        throw dimension_mismatch("queries have dimension " + std::to_string(queries.rows()) +
                                 ", points have " + std::to_string(set.dimension()));
    double total = 0.0;
    for (Eigen::Index c = 0; c < queries.cols(); ++c) {
        const Eigen::VectorXd x = queries.col(c);
        total += (full_response(set, act, x) - coreset_response(set, cs, act, x)).cwiseAbs().mean();
    }
    return total / static_cast<double>(queries.cols());
}

/// Same metric as neuron_additive_error, with phi(P X^T) computed once so many
/// coresets of one set can be scored cheaply.
class neuron_error_evaluator {
public:
    neuron_error_evaluator(const weighted_set& set, const activation& act, const Eigen::MatrixXd& queries)
        : consumers_(static_cast<Eigen::Index>(set.consumers())) {
        if (queries.cols() == 0) throw invalid_parameter("need at least one query");
        if (static_cast<std::size_t>(queries.rows()) != set.dimension())
            throw dimension_mismatch("queries have dimension " + std::to_string(queries.rows()) +
                                     ", points have " + std::to_string(set.dimension()));
        phi_ = (set.coords() * queries).unaryExpr([&act](double v) { return act(v); });
        exact_ = set.weights().transpose() * phi_;  // k x Q
    }

    double operator()(const coreset& cs) const {
        Eigen::MatrixXd approx = Eigen::MatrixXd::Zero(exact_.rows(), exact_.cols());
        Eigen::VectorXd u(consumers_);
        for (const auto& [q, e] : cs.entries) {
            for (Eigen::Index i = 0; i < consumers_; ++i) u(i) = e.weights.at(static_cast<std::size_t>(i));
            approx.noalias() += u * phi_.row(static_cast<Eigen::Index>(q));
        }
        return (exact_ - approx).cwiseAbs().mean();
    }

    const Eigen::MatrixXd& exact() const noexcept { return exact_; }

private:
    Eigen::Index consumers_;
    Eigen::MatrixXd phi_;    // n x Q
    Eigen::MatrixXd exact_;  // k x Q
};

/// Mean L1 distance between the two networks' outputs over the query columns.
inline double network_l1_error(const dense_network& original, const dense_network& pruned,
                               const Eigen::MatrixXd& queries) {
    if (original.input_size() != pruned.input_size() || original.output_size() != pruned.output_size())
        throw dimension_mismatch("networks differ in input or output dimension");
    if (queries.cols() == 0) throw invalid_parameter("need at least one query");
    const Eigen::MatrixXd a = predict(original, queries);
    const Eigen::MatrixXd b = predict(pruned, queries);
    return (a - b).cwiseAbs().colwise().sum().mean();
}

/// `count` points uniform in the ball of `radius` in R^dim, as columns.
inline Eigen::MatrixXd unit_ball_queries(std::size_t count, std::size_t dim, std::uint64_t seed,
                                         double radius = 1.0) {
    if (dim == 0) throw invalid_parameter("query dimension must be positive");
    rng gen(seed);
    Eigen::MatrixXd q(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
        double nrm = 0.0;
        while (nrm == 0.0) {
            for (Eigen::Index r = 0; r < q.rows(); ++r) q(r, c) = gen.normal();
            nrm = q.col(c).norm();
        }
        const double r = radius * std::pow(gen.uniform(), 1.0 / static_cast<double>(dim));
        q.col(c) *= r / nrm;
    }
    return q;
}

enum class weight_distribution { gaussian, uniform };

/// Synthetic single-neuron source: n standard-normal points in R^d scaled by
/// the largest norm (so every point lies in the unit ball), with standard
/// normal or U[0,1) weights.
inline weighted_set synthetic_source(weight_distribution dist, std::size_t n, std::size_t d,
                                     std::uint64_t seed) {
    if (n == 0 || d == 0) throw invalid_parameter("synthetic source needs n, d >= 1");
    rng gen(seed);
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < pts.rows(); ++r)
        for (Eigen::Index c = 0; c < pts.cols(); ++c) pts(r, c) = gen.normal();
    const double max_norm = pts.rowwise().norm().maxCoeff();
    if (max_norm > 0.0) pts /= max_norm;
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < w.size(); ++r)
        w(r) = dist == weight_distribution::gaussian ? gen.normal() : gen.uniform();
    return weighted_set::single(std::move(pts), w);
}

/// Layer i of `net` as a single-neuron source; consumer selects the outgoing
/// weights of one neuron of layer i+1 (all of them when empty).
inline weighted_set model_layer_source(const dense_network& net, std::size_t i,
                                       std::optional<std::size_t> consumer = std::nullopt) {
    auto full = layer_as_weighted_set(net, i);
    if (!consumer) return full;
    if (*consumer >= full.consumers())
        throw invalid_parameter("consumer " + std::to_string(*consumer) + " out of range");
    return weighted_set::single(full.coords(), full.weights().col(static_cast<Eigen::Index>(*consumer)));
}

/// Appends a row of ones so queries match bias-augmented points.
inline Eigen::MatrixXd augment_queries(const Eigen::MatrixXd& queries) {
    Eigen::MatrixXd out(queries.rows() + 1, queries.cols());
    out.topRows(queries.rows()) = queries;
    out.row(queries.rows()).setOnes();
    return out;
}

struct sweep_record {
    std::string scheme;
    std::size_t m = 0;
    std::size_t runs = 0;
    double mean_error = 0.0;
    double std_error = 0.0;  // sample standard deviation across runs
};

struct sweep_spec {
    std::vector<scheme_kind> schemes;
    std::vector<std::size_t> sizes;  // ascending
    std::size_t runs = 10;
    activation act = activation::relu();
    double beta = 1.0;  // radius passed to the coreset sensitivities
    std::uint64_t seed = 0;
};

/// Error-vs-size table. Run r at size index s uses seed derive_seed(seed, s, r)
/// for every stochastic scheme; percentile is deterministic and runs once.
inline std::vector<sweep_record> run_sweep(const weighted_set& set, const Eigen::MatrixXd& queries,
                                           const sweep_spec& spec) {
    if (spec.runs < 1) throw invalid_parameter("runs must be >= 1");
    if (spec.sizes.empty()) throw invalid_parameter("need at least one size");
    if (!std::is_sorted(spec.sizes.begin(), spec.sizes.end()))
        throw invalid_parameter("sizes must be ascending");
    const neuron_error_evaluator score(set, spec.act, queries);

    std::vector<sweep_record> out;
    for (const auto scheme : spec.schemes) {
        for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
            const std::size_t m = spec.sizes[s];
            const std::size_t runs = is_stochastic(scheme) ? spec.runs : 1;
            std::vector<double> errs(runs);
            for (std::size_t r = 0; r < runs; ++r)
                errs[r] = score(select(set, scheme, m, spec.act, spec.beta, derive_seed(spec.seed, s, r)));
            const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(runs);
            double var = 0.0;
            for (double e : errs) var += (e - mean) * (e - mean);
            var = runs > 1 ? var / static_cast<double>(runs - 1) : 0.0;
            out.push_back({std::string(scheme_name(scheme)), m, runs, mean, std::sqrt(var)});
        }
    }
    return out;
}

/// CSV with header scheme,m,runs,mean_error,std_error,source,queries (LF endings).
inline std::string sweep_to_csv(const std::vector<sweep_record>& records, const std::string& source,
                                const std::string& queries) {
    std::ostringstream os;
    os.precision(17);
    os << "scheme,m,runs,mean_error,std_error,source,queries\n";
    for (const auto& r : records)
        os << r.scheme << ',' << r.m << ',' << r.runs << ',' << r.mean_error << ',' << r.std_error << ','
           << source << ',' << queries << '\n';
    return os.str();
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw invalid_parameter("need >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw invalid_parameter("log-log fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace coreprune

#endif  // COREPRUNE_EVAL_HPP
