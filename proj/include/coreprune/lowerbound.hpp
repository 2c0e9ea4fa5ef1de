#ifndef COREPRUNE_LOWERBOUND_HPP
#define COREPRUNE_LOWERBOUND_HPP

// A point set with no small multiplicative-error coreset under ReLU.
//
// All points lie on the (d-1)-sphere {p : ||p|| = alpha, p_d = alpha/2}. For
// each point p there is a short query x_p with x_p^T p > 0 and x_p^T q < 0 for
// every other point q, so phi(x_p^T q) = 0 for all q != p. A subset that
// leaves p out estimates 0 at x_p while the true sum is positive: relative
// error exactly 1, whatever the reweighting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "activation.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace coreprune {

struct sphere_instance {
    Eigen::MatrixXd points;  // n x d, row j is p_j
    double alpha = 1.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(points.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(points.cols()); }
};

inline sphere_instance make_sphere_instance(std::size_t n, std::size_t d, double alpha, std::uint64_t seed) {
    if (n < 2) throw invalid_parameter("sphere instance needs n >= 2");
    if (d < 3) throw invalid_parameter("sphere instance needs d >= 3");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw invalid_parameter("alpha must be positive");
    rng gen(seed);
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(d);
    const double ring = alpha * std::sqrt(3.0) / 2.0;  // sqrt(alpha^2 - (alpha/2)^2)
    sphere_instance inst;
    inst.alpha = alpha;
    inst.points.resize(rows, cols);
    for (Eigen::Index j = 0; j < rows; ++j) {
        Eigen::VectorXd dir(cols - 1);
        double nrm = 0.0;
        while (nrm == 0.0) {
            for (Eigen::Index c = 0; c < dir.size(); ++c) dir(c) = gen.normal();
            nrm = dir.norm();
        }
        inst.points.row(j).head(cols - 1) = (ring / nrm) * dir.transpose();
        inst.points(j, cols - 1) = alpha / 2.0;
    }
    return inst;
}

/// Query of norm <= beta that is positive on point j and negative on all others.
///
/// With v_q the unit direction of q's first d-1 coordinates and c the largest
/// cosine between v_j and any other v_q, the query is eta (v_j, -gamma) with
/// gamma alpha/2 = r (1 + c)/2, r = alpha sqrt(3)/2. Then x^T p_j = eta r (1-c)/2
/// and x^T q <= -eta r (1-c)/2. eta scales the query to norm beta/2.
inline Eigen::VectorXd separating_query(const sphere_instance& inst, std::size_t j, double beta) {
    const std::size_t n = inst.size();
    const auto d = static_cast<Eigen::Index>(inst.dimension());
    if (j >= n) throw invalid_parameter("point index out of range");
    if (!(beta > 0.0)) throw invalid_parameter("beta must be positive");
    const double alpha = inst.alpha;
    const double ring = alpha * std::sqrt(3.0) / 2.0;

    const auto head = [&](std::size_t q) -> Eigen::VectorXd {
        return inst.points.row(static_cast<Eigen::Index>(q)).head(d - 1).transpose();
    };
    const Eigen::VectorXd vj = head(j).normalized();
    double max_cos = -1.0;
    for (std::size_t q = 0; q < n; ++q) {
        if (q == j) continue;
        if ((inst.points.row(static_cast<Eigen::Index>(q)) - inst.points.row(static_cast<Eigen::Index>(j)))
                .norm() < 1e-12)
            throw degenerate_instance("points " + std::to_string(j) + " and " + std::to_string(q) +
                                      " coincide");
        max_cos = std::max(max_cos, vj.dot(head(q).normalized()));
    }
    if (!(max_cos < 1.0)) throw degenerate_instance("no separating direction for point " + std::to_string(j));

    const double gamma = ring * (1.0 + max_cos) / alpha;
    Eigen::VectorXd x(d);
    x.head(d - 1) = vj;
    x(d - 1) = -gamma;
    x *= (beta / 2.0) / x.norm();
    return x;
}

struct multiplicative_certificate {
    double worst_relative_error = 0.0;     // over all n separating queries
    std::size_t worst_query = 0;           // point whose query attains it
    std::size_t excluded_index = 0;        // a point left out of the subset
    double excluded_relative_error = 0.0;  // error at that point's query
};

/// Relative errors |sum_P phi - sum_C u phi| / sum_P phi at every separating
/// query for the weighted subset (subset[i], u[i]). Requires a proper subset
/// and an activation with phi(b) > 0 iff b > 0 (ReLU).
inline multiplicative_certificate verify_no_multiplicative_coreset(const sphere_instance& inst,
                                                                   const activation& act,
                                                                   const std::vector<std::size_t>& subset,
                                                                   const std::vector<double>& u,
                                                                   double beta) {
    if (act.kind() != activation_kind::relu)
        throw invalid_parameter("the certificate needs phi(b) > 0 iff b > 0; only relu qualifies");
    if (subset.size() != u.size()) throw invalid_parameter("subset and weights differ in length");
    const std::size_t n = inst.size();
    const std::set<std::size_t> chosen(subset.begin(), subset.end());
    if (chosen.size() != subset.size()) throw invalid_parameter("subset has repeated indices");
    for (auto s : chosen)
        if (s >= n) throw invalid_parameter("subset index out of range");
    if (chosen.size() == n) throw invalid_parameter("subset equals the full point set");

    multiplicative_certificate cert;
    bool found_excluded = false;
    for (std::size_t j = 0; j < n; ++j) {
        const Eigen::VectorXd x = separating_query(inst, j, beta);
        const Eigen::VectorXd dots = inst.points * x;
        double exact = 0.0;
        for (Eigen::Index q = 0; q < dots.size(); ++q) exact += act(dots(q));
        double approx = 0.0;
        for (std::size_t s = 0; s < subset.size(); ++s)
            approx += u[s] * act(dots(static_cast<Eigen::Index>(subset[s])));
        const double rel = std::abs(exact - approx) / exact;
        if (rel > cert.worst_relative_error || j == 0) {
            cert.worst_relative_error = rel;
            cert.worst_query = j;
        }
        if (!found_excluded && !chosen.count(j)) {
            found_excluded = true;
            cert.excluded_index = j;
            cert.excluded_relative_error = rel;
        }
    }
    if (!found_excluded) throw invalid_parameter("subset equals the full point set");
    return cert;
}

}  // namespace coreprune

#endif  // COREPRUNE_LOWERBOUND_HPP
