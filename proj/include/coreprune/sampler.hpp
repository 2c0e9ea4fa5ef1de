#ifndef COREPRUNE_SAMPLER_HPP
#define COREPRUNE_SAMPLER_HPP

// Sensitivity sampling of weighted neuron sets.
//
// A point p with weights w_1(p)..w_k(p) has sensitivity
//     s(p) = max_i |w_i(p)| * sup_{||x||<=beta} |phi(p^T x)|,
// and is drawn i.i.d. with probability s(p)/t, t = sum_p s(p). Each draw of q
// adds w_i(q) / (m pr(q)) to the new weight u_i(q), so every consumer's
// weighted sum is estimated without bias from one shared subset.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "activation.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "weighted_set.hpp"

namespace coreprune {

struct sensitivity_distribution {
    std::vector<double> sensitivities;  // s(p)
    std::vector<double> probabilities;  // s(p) / t
    double total_sensitivity = 0.0;     // t
};

struct coreset_entry {
    std::vector<double> weights;  // u_1(q)..u_k(q)
    std::size_t draws = 0;        // multiplicity of q in the sample

    friend bool operator==(const coreset_entry&, const coreset_entry&) = default;
};

/// Distinct selected indices with their new per-consumer weights.
struct coreset {
    std::map<std::size_t, coreset_entry> entries;
    std::size_t sample_count = 0;  // m
    std::uint64_t seed = 0;
    std::size_t consumers = 1;

    std::size_t size() const noexcept { return entries.size(); }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(entries.size());
        for (const auto& [idx, e] : entries) out.push_back(idx);
        return out;
    }

    double weight(std::size_t index, std::size_t consumer) const {
        const auto it = entries.find(index);
        return it == entries.end() ? 0.0 : it->second.weights.at(consumer);
    }

    friend bool operator==(const coreset&, const coreset&) = default;
};

struct sample_size_plan {
    double epsilon;
    double delta;
    double c;
    std::size_t vc_dim;
    double t;
    std::size_t m;
};

/// Sensitivities and the sampling distribution over `set`.
///
/// Throws all_zero_sensitivity when every point has s(p) = 0.
inline sensitivity_distribution make_sensitivity_distribution(const weighted_set& set,
                                                              const activation& act, double beta) {
    if (!(beta > 0.0)) throw invalid_parameter("beta must be positive");
    const std::size_t n = set.size();
    sensitivity_distribution out;
    out.sensitivities.resize(n);
    out.probabilities.assign(n, 0.0);
    const Eigen::VectorXd max_abs_w = set.weights().cwiseAbs().rowwise().maxCoeff();
    double t = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = max_abs_w(static_cast<Eigen::Index>(j)) * act.ball_sup(set.norm(j), beta);
        out.sensitivities[j] = s;
        t += s;
    }
    if (!std::isfinite(t))
        throw invalid_parameter("total sensitivity overflowed; reduce beta or the point norms");
    if (t <= 0.0)
        throw all_zero_sensitivity("every point has zero sensitivity under " +
                                   std::string(act.name()) + " on the ball of radius " +
                                   std::to_string(beta));
    out.total_sensitivity = t;
    for (std::size_t j = 0; j < n; ++j) out.probabilities[j] = out.sensitivities[j] / t;
    return out;
}

/// Sample size m = ceil(c t / eps^2 * (d ln(max(t, e)) + ln(1/delta))), at least 1.
inline sample_size_plan sample_size(double epsilon, double delta, double c, std::size_t vc_dim,
                                    double t) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw invalid_parameter("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_parameter("delta must lie in (0,1)");
    if (!(c > 0.0)) throw invalid_parameter("c must be positive");
    if (vc_dim < 1) throw invalid_parameter("vc dimension must be >= 1");
    if (!(t > 0.0) || !std::isfinite(t)) throw invalid_parameter("t must be positive and finite");
    const double log_t = std::log(std::max(t, std::numbers::e));
    const double bound =
        c * t / (epsilon * epsilon) * (static_cast<double>(vc_dim) * log_t + std::log(1.0 / delta));
    const double m = std::max(1.0, std::ceil(bound));
    if (m > 1e15) throw invalid_parameter("sample size bound is unreasonably large");
    return {epsilon, delta, c, vc_dim, t, static_cast<std::size_t>(m)};
}

namespace detail {

/// m i.i.d. draws from `probabilities` with the unbiased reweighting rule.
inline coreset importance_sample(const weighted_set& set, std::span<const double> probabilities,
                                 std::size_t m, std::uint64_t seed) {
    if (m < 1) throw invalid_parameter("sample size m must be >= 1");
    const std::size_t n = set.size();
    if (probabilities.size() != n) throw dimension_mismatch("probability vector length != set size");

    std::vector<double> cumulative(n);
    double acc = 0.0;
    std::size_t last_positive = n;
    for (std::size_t j = 0; j < n; ++j) {
        acc += probabilities[j];
        cumulative[j] = acc;
        if (probabilities[j] > 0.0) last_positive = j;
    }
    if (last_positive == n) throw all_zero_sensitivity("sampling distribution has no mass");

    const std::size_t k = set.consumers();
    const double md = static_cast<double>(m);
    coreset out;
    out.sample_count = m;
    out.seed = seed;
    out.consumers = k;

    rng gen(seed);
    for (std::size_t draw = 0; draw < m; ++draw) {
        const double target = gen.uniform() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t q = it == cumulative.end() ? last_positive
                                               : static_cast<std::size_t>(it - cumulative.begin());
        auto& entry = out.entries[q];
        if (entry.weights.empty()) entry.weights.assign(k, 0.0);
        ++entry.draws;
        const double scale = 1.0 / (md * probabilities[q]);
        for (std::size_t i = 0; i < k; ++i) entry.weights[i] += set.weight(q, i) * scale;
    }
    return out;
}

}  // namespace detail

/// One coreset shared by all k consumers of `set`.
inline coreset coreset_layer(const weighted_set& set, std::size_t m, const activation& act,
                             double beta, std::uint64_t seed) {
    const auto dist = make_sensitivity_distribution(set, act, beta);
    return detail::importance_sample(set, dist.probabilities, m, seed);
}

/// Coreset for a single neuron; `set` must carry exactly one weight per point.
inline coreset coreset_single(const weighted_set& set, std::size_t m, const activation& act,
                              double beta, std::uint64_t seed) {
    if (set.consumers() != 1)
        throw invalid_parameter("coreset_single expects one weight per point, got " +
                                std::to_string(set.consumers()));
    return coreset_layer(set, m, act, beta, seed);
}

}  // namespace coreprune

#endif  // COREPRUNE_SAMPLER_HPP
