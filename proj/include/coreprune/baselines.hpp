#ifndef COREPRUNE_BASELINES_HPP
#define COREPRUNE_BASELINES_HPP

// Comparison schemes for neuron selection. The stochastic ones share the
// importance-sampling estimator of the coreset and differ only in the
// sampling distribution; percentile keeps the largest-norm points verbatim.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "sampler.hpp"
#include "weighted_set.hpp"

namespace coreprune {

enum class baseline_kind { uniform, percentile, l1, l2, l1l2 };

inline std::string_view baseline_name(baseline_kind k) noexcept {
    switch (k) {
        case baseline_kind::uniform: return "uniform";
        case baseline_kind::percentile: return "percentile";
        case baseline_kind::l1: return "l1";
        case baseline_kind::l2: return "l2";
        case baseline_kind::l1l2: return "l1l2";
    }
    return "?";
}

inline std::optional<baseline_kind> parse_baseline(std::string_view s) noexcept {
    for (auto k : {baseline_kind::uniform, baseline_kind::percentile, baseline_kind::l1,
                   baseline_kind::l2, baseline_kind::l1l2})
        if (baseline_name(k) == s) return k;
    return std::nullopt;
}

inline coreset uniform_coreset(const weighted_set& set, std::size_t m, std::uint64_t seed) {
    const std::vector<double> pr(set.size(), 1.0 / static_cast<double>(set.size()));
    return detail::importance_sample(set, pr, m, seed);
}

/// The m largest-norm points with their original weights; ties go to the lower index.
inline coreset percentile_coreset(const weighted_set& set, std::size_t m) {
    const std::size_t n = set.size();
    if (m < 1) throw invalid_parameter("sample size m must be >= 1");
    if (m > n)
        throw invalid_parameter("percentile needs m <= n (m=" + std::to_string(m) +
                                ", n=" + std::to_string(n) + ")");
    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = set.norm(j);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    coreset out;
    out.sample_count = m;
    out.consumers = set.consumers();
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t j = order[r];
        auto& e = out.entries[j];
        e.draws = 1;
        e.weights.resize(set.consumers());
        for (std::size_t i = 0; i < set.consumers(); ++i) e.weights[i] = set.weight(j, i);
    }
    return out;
}

/// Sampling scores of the matrix-sparsification schemes, one per point.
inline std::vector<double> norm_scores(const weighted_set& set, baseline_kind kind) {
    const std::size_t n = set.size();
    std::vector<double> scores(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double best = 0.0;
        for (std::size_t i = 0; i < set.consumers(); ++i) {
            const double w = set.weight(j, i);
            double s = 0.0;
            switch (kind) {
                case baseline_kind::l1: s = std::abs(w); break;
                case baseline_kind::l2: s = w * w; break;
                case baseline_kind::l1l2: s = 0.5 * (std::abs(w) + w * w); break;
                default: throw invalid_parameter("norm sampling needs l1, l2 or l1l2");
            }
            best = std::max(best, s);
        }
        scores[j] = best;
    }
    return scores;
}

inline std::vector<double> norm_sampling_probabilities(const weighted_set& set, baseline_kind kind) {
    auto scores = norm_scores(set, kind);
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    if (!(total > 0.0))
        throw all_zero_sensitivity("every point has a zero " + std::string(baseline_name(kind)) +
                                   " score");
    for (auto& s : scores) s /= total;
    return scores;
}

inline coreset norm_sampling_coreset(const weighted_set& set, std::size_t m, baseline_kind kind,
                                     std::uint64_t seed) {
    const auto pr = norm_sampling_probabilities(set, kind);
    return detail::importance_sample(set, pr, m, seed);
}

}  // namespace coreprune

#endif  // COREPRUNE_BASELINES_HPP
