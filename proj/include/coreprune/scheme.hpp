#ifndef COREPRUNE_SCHEME_HPP
#define COREPRUNE_SCHEME_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "activation.hpp"
#include "baselines.hpp"
#include "sampler.hpp"

namespace coreprune {

/// Any of the selection schemes: the sensitivity coreset or one of the baselines.
enum class scheme_kind { coreset, uniform, percentile, l1, l2, l1l2 };

inline constexpr std::array<scheme_kind, 6> all_schemes = {
    scheme_kind::coreset, scheme_kind::uniform, scheme_kind::percentile,
    scheme_kind::l1,      scheme_kind::l2,      scheme_kind::l1l2};

inline std::string_view scheme_name(scheme_kind k) noexcept {
    switch (k) {
        case scheme_kind::coreset: return "coreset";
        case scheme_kind::uniform: return "uniform";
        case scheme_kind::percentile: return "percentile";
        case scheme_kind::l1: return "l1";
        case scheme_kind::l2: return "l2";
        case scheme_kind::l1l2: return "l1l2";
    }
    return "?";
}

inline std::optional<scheme_kind> parse_scheme(std::string_view s) noexcept {
    for (auto k : all_schemes)
        if (scheme_name(k) == s) return k;
    return std::nullopt;
}

inline bool is_stochastic(scheme_kind k) noexcept { return k != scheme_kind::percentile; }

/// Runs scheme `kind` on `set`. `act` and `beta` matter only for the coreset.
inline coreset select(const weighted_set& set, scheme_kind kind, std::size_t m,
                      const activation& act, double beta, std::uint64_t seed) {
    switch (kind) {
        case scheme_kind::coreset: return coreset_layer(set, m, act, beta, seed);
        case scheme_kind::uniform: return uniform_coreset(set, m, seed);
        case scheme_kind::percentile: return percentile_coreset(set, m);
        case scheme_kind::l1: return norm_sampling_coreset(set, m, baseline_kind::l1, seed);
        case scheme_kind::l2: return norm_sampling_coreset(set, m, baseline_kind::l2, seed);
        case scheme_kind::l1l2: return norm_sampling_coreset(set, m, baseline_kind::l1l2, seed);
    }
    throw invalid_parameter("unknown scheme");
}

}  // namespace coreprune

#endif  // COREPRUNE_SCHEME_HPP
