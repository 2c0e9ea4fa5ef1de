#ifndef COREPRUNE_WEIGHTED_SET_HPP
#define COREPRUNE_WEIGHTED_SET_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace coreprune {

struct weighted_point {
    std::vector<double> coords;
    std::vector<double> weights;  // one entry per consumer; signed
};

/// Points p_1..p_n in R^d, each carrying k signed weights w_1(p)..w_k(p).
///
/// Row j of `coords()` is p_j, row j of `weights()` holds the k weights of p_j.
/// Immutable after construction.
class weighted_set {
public:
    weighted_set(Eigen::MatrixXd coords, Eigen::MatrixXd weights)
        : coords_(std::move(coords)), weights_(std::move(weights)) {
        validate();
    }

    explicit weighted_set(const std::vector<weighted_point>& points) {
        if (points.empty()) throw invalid_parameter("weighted set needs at least one point");
        const auto d = points.front().coords.size();
        const auto k = points.front().weights.size();
        coords_.resize(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(d));
        weights_.resize(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < points.size(); ++j) {
            const auto& p = points[j];
            if (p.coords.size() != d)
                throw dimension_mismatch("point " + std::to_string(j) + " has dimension " +
                                         std::to_string(p.coords.size()) + ", expected " +
                                         std::to_string(d));
            if (p.weights.size() != k)
                throw dimension_mismatch("point " + std::to_string(j) + " has " +
                                         std::to_string(p.weights.size()) + " weights, expected " +
                                         std::to_string(k));
            const auto r = static_cast<Eigen::Index>(j);
            for (std::size_t c = 0; c < d; ++c) coords_(r, static_cast<Eigen::Index>(c)) = p.coords[c];
            for (std::size_t c = 0; c < k; ++c) weights_(r, static_cast<Eigen::Index>(c)) = p.weights[c];
        }
        validate();
    }

    /// Single-consumer convenience: one weight per point.
    static weighted_set single(Eigen::MatrixXd coords, const Eigen::VectorXd& weights) {
        Eigen::MatrixXd w = weights;
        return weighted_set(std::move(coords), std::move(w));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(coords_.cols()); }
    std::size_t consumers() const noexcept { return static_cast<std::size_t>(weights_.cols()); }

    const Eigen::MatrixXd& coords() const noexcept { return coords_; }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }

    auto point(std::size_t j) const { return coords_.row(static_cast<Eigen::Index>(j)); }
    double weight(std::size_t j, std::size_t consumer) const {
        return weights_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(consumer));
    }
    double norm(std::size_t j) const { return point(j).norm(); }

    weighted_point at(std::size_t j) const {
        weighted_point p;
        const auto r = static_cast<Eigen::Index>(j);
        p.coords.resize(dimension());
        for (std::size_t c = 0; c < dimension(); ++c) p.coords[c] = coords_(r, static_cast<Eigen::Index>(c));
        p.weights.resize(consumers());
        for (std::size_t c = 0; c < consumers(); ++c) p.weights[c] = weights_(r, static_cast<Eigen::Index>(c));
        return p;
    }

private:
    void validate() const {
        if (coords_.rows() == 0) throw invalid_parameter("weighted set needs at least one point");
        if (coords_.cols() == 0) throw invalid_parameter("points must have dimension >= 1");
        if (weights_.cols() == 0) throw invalid_parameter("points must carry at least one weight");
        if (weights_.rows() != coords_.rows())
            throw dimension_mismatch("weight rows (" + std::to_string(weights_.rows()) +
                                     ") != point count (" + std::to_string(coords_.rows()) + ")");
        if (!coords_.allFinite()) throw invalid_parameter("point coordinates must be finite");
        if (!weights_.allFinite()) throw invalid_parameter("weights must be finite");
    }

    Eigen::MatrixXd coords_;
    Eigen::MatrixXd weights_;
};

/// The query domain: all x in R^dimension with ||x|| <= radius.
struct query_ball {
    double radius;
    std::size_t dimension;

    query_ball(double r, std::size_t d) : radius(r), dimension(d) {
        if (!(r > 0.0) || !std::isfinite(r)) throw invalid_parameter("ball radius must be positive");
        if (d == 0) throw invalid_parameter("ball dimension must be positive");
    }
};

}  // namespace coreprune

#endif  // COREPRUNE_WEIGHTED_SET_HPP
