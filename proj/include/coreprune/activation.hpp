#ifndef COREPRUNE_ACTIVATION_HPP
#define COREPRUNE_ACTIVATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace coreprune {

enum class activation_kind { relu, sigmoid, binary, softplus, softclip, gauss };

inline constexpr std::array<activation_kind, 6> all_activation_kinds = {
    activation_kind::relu,     activation_kind::sigmoid,  activation_kind::binary,
    activation_kind::softplus, activation_kind::softclip, activation_kind::gauss};

namespace detail {

// ln(1 + e^x) without overflow for large |x|.
inline double softplus(double x) noexcept {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double logistic(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace detail

/// A monotone scalar activation together with its parameter.
///
/// `param` carries the steepness of the soft-clip and is empty for every other
/// kind. It is unrelated to any norm bound on the inputs.
class activation {
public:
    static activation relu() { return activation(activation_kind::relu); }
    static activation sigmoid() { return activation(activation_kind::sigmoid); }
    static activation binary() { return activation(activation_kind::binary); }
    static activation softplus() { return activation(activation_kind::softplus); }
    static activation gauss() { return activation(activation_kind::gauss); }
    static activation softclip(double steepness) {
        if (!(steepness > 0.0) || !std::isfinite(steepness))
            throw invalid_parameter("softclip steepness must be a positive finite number");
        return activation(activation_kind::softclip, steepness);
    }

    /// Builds any kind; `param` must be present exactly for softclip.
    static activation make(activation_kind kind, std::optional<double> param = std::nullopt) {
        if (kind == activation_kind::softclip) {
            if (!param) throw invalid_parameter("softclip requires a steepness parameter");
            return softclip(*param);
        }
        if (param) throw invalid_parameter("only softclip takes a parameter");
        return activation(kind);
    }

    activation_kind kind() const noexcept { return kind_; }
    std::optional<double> param() const noexcept { return param_; }

    double operator()(double x) const noexcept {
        switch (kind_) {
            case activation_kind::relu: return x > 0.0 ? x : 0.0;
            case activation_kind::sigmoid: return detail::logistic(x);
            case activation_kind::binary: return x < 0.0 ? 0.0 : 1.0;
            case activation_kind::softplus: return detail::softplus(x);
            case activation_kind::softclip: {
                const double a = *param_;
                return (detail::softplus(a * x) - detail::softplus(a * (x - 1.0))) / a;
            }
            case activation_kind::gauss: return std::exp(-x);
        }
        return 0.0;
    }

    /// d/dx of the activation; the step has zero derivative almost everywhere.
    double derivative(double x) const noexcept {
        switch (kind_) {
            case activation_kind::relu: return x > 0.0 ? 1.0 : 0.0;
            case activation_kind::sigmoid: {
                const double s = detail::logistic(x);
                return s * (1.0 - s);
            }
            case activation_kind::binary: return 0.0;
            case activation_kind::softplus: return detail::logistic(x);
            case activation_kind::softclip: {
                const double a = *param_;
                return detail::logistic(a * x) - detail::logistic(a * (x - 1.0));
            }
            case activation_kind::gauss: return -std::exp(-x);
        }
        return 0.0;
    }

    /// sup over ||x|| <= beta of |phi(p^T x)| for a point of norm `point_norm`.
    ///
    /// p^T x ranges over [-||p|| beta, ||p|| beta]; a monotone phi attains the
    /// largest magnitude at one of the two endpoints.
    double ball_sup(double point_norm, double beta) const {
        if (!(point_norm >= 0.0)) throw invalid_parameter("point norm must be non-negative");
        if (!(beta > 0.0)) throw invalid_parameter("ball radius must be positive");
        const double r = point_norm * beta;
        return std::max(std::abs((*this)(r)), std::abs((*this)(-r)));
    }

    std::string_view name() const noexcept { return kind_name(kind_); }

    static std::string_view kind_name(activation_kind k) noexcept {
        switch (k) {
            case activation_kind::relu: return "relu";
            case activation_kind::sigmoid: return "sigmoid";
            case activation_kind::binary: return "binary";
            case activation_kind::softplus: return "softplus";
            case activation_kind::softclip: return "softclip";
            case activation_kind::gauss: return "gauss";
        }
        return "?";
    }

    static std::optional<activation_kind> parse_kind(std::string_view s) noexcept {
        for (auto k : all_activation_kinds)
            if (kind_name(k) == s) return k;
        return std::nullopt;
    }

    friend bool operator==(const activation&, const activation&) = default;

private:
    explicit activation(activation_kind k, std::optional<double> p = std::nullopt)
        : kind_(k), param_(p) {}

    activation_kind kind_;
    std::optional<double> param_;
};

}  // namespace coreprune

#endif  // COREPRUNE_ACTIVATION_HPP
